"""Finite-dimensional Lie algebras from exact structure constants."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import sympy

from ..config import config
from ..errors import ClosureError, NotSupportedError, ValidationError
from .expr import ONE, ZERO, Expr, ExpAtom, Symbol, SymbolKind, as_expr
from .linalg import intersect_complement, matmul, nullspace, rank, rref, solve_in_span, trace
from .vfield import VectorField, lie_bracket

logger = logging.getLogger(__name__)

Subspace = List[List[Fraction]]
Coordinate = Union[Fraction, int, Expr]


class LieAlgebra:
    """Basis labels and constants c[i][j][k] = C^k_ij with [v_i, v_j] = sum_k C^k_ij v_k."""

    def __init__(self, labels: Sequence[str], constants: Sequence[Sequence[Sequence[Fraction]]]):
        self.labels = tuple(labels)
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValidationError("basis labels must be distinct")
        self.constants = tuple(
            tuple(tuple(Fraction(c) for c in constants[i][j]) for j in range(n))
            for i in range(n)
        )
        self._validate()
        self._adjoints: Optional[List["AdjointMatrix"]] = None

    @property
    def dim(self) -> int:
        return len(self.labels)

    def _validate(self) -> None:
        n = self.dim
        c = self.constants
        for i, j in product(range(n), repeat=2):
            if len(c[i][j]) != n:
                raise ValidationError("structure constants must be an n x n x n array")
            for k in range(n):
                if c[i][j][k] != -c[j][i][k]:
                    raise ValidationError(
                        f"structure constants are not antisymmetric at [{self.labels[i]}, {self.labels[j]}]"
                    )
        for i, j, k, l in product(range(n), repeat=4):
            total = sum(
                c[i][j][m] * c[m][k][l] + c[j][k][m] * c[m][i][l] + c[k][i][m] * c[m][j][l]
                for m in range(n)
            )
            if total:
                raise ValidationError(
                    f"Jacobi identity fails for ({self.labels[i]}, {self.labels[j]}, {self.labels[k]})"
                )

    @classmethod
    def from_brackets(
        cls, labels: Sequence[str], brackets: Mapping[Tuple[int, int], Mapping[int, Fraction]]
    ) -> "LieAlgebra":
        n = len(labels)
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), result in brackets.items():
            for k, value in result.items():
                value = Fraction(value)
                for (a, b, sign) in ((i, j, 1), (j, i, -1)):
                    current = c[a][b][k]
                    if current and current != sign * value:
                        raise ValidationError(
                            f"conflicting entries for [{labels[i]}, {labels[j]}]"
                        )
                    c[a][b][k] = sign * value
        return cls(labels, c)

    @classmethod
    def from_table(cls, data: Mapping) -> "LieAlgebra":
        """Build from {"labels": [...], "brackets": [{"left", "right", "value": {label: "p/q"}}]}."""
        try:
            labels = list(data["labels"])
            entries = data.get("brackets", [])
        except (KeyError, TypeError, AttributeError):
            raise ValidationError("table needs 'labels' and 'brackets'") from None
        index = {label: i for i, label in enumerate(labels)}
        brackets: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
        for entry in entries:
            try:
                i = index[entry["left"]]
                j = index[entry["right"]]
                value = {index[k]: Fraction(str(v)) for k, v in entry["value"].items()}
            except KeyError as exc:
                raise ValidationError(f"unknown label or field {exc} in bracket table") from None
            except (ValueError, ZeroDivisionError):
                raise ValidationError(f"malformed coefficient in bracket {entry!r}") from None
            if i == j and any(value.values()):
                raise ValidationError(f"[{labels[i]}, {labels[i]}] must vanish")
            brackets[(i, j)] = value
        return cls.from_brackets(labels, brackets)

    def to_table(self) -> dict:
        entries = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                value = {
                    self.labels[k]: _fraction_text(v)
                    for k, v in enumerate(self.constants[i][j])
                    if v
                }
                if value:
                    entries.append({"left": self.labels[i], "right": self.labels[j], "value": value})
        return {"labels": list(self.labels), "brackets": entries}

    # brackets

    def basis_vector(self, i: int) -> Tuple[Fraction, ...]:
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def bracket(self, x: Sequence[Coordinate], y: Sequence[Coordinate]) -> tuple:
        """Bracket of coordinate vectors; Expr coordinates give Expr results."""
        symbolic = any(isinstance(v, Expr) for v in list(x) + list(y))
        n = self.dim
        if symbolic:
            out = [ZERO] * n
            xs = [as_expr(v) for v in x]
            ys = [as_expr(v) for v in y]
            for i, j in product(range(n), repeat=2):
                if xs[i].is_zero or ys[j].is_zero:
                    continue
                row = self.constants[i][j]
                if not any(row):
                    continue
                term = xs[i] * ys[j]
                for k in range(n):
                    if row[k]:
                        out[k] = out[k] + term * row[k]
            return tuple(out)
        out_q = [Fraction(0)] * n
        for i, j in product(range(n), repeat=2):
            if not x[i] or not y[j]:
                continue
            row = self.constants[i][j]
            for k in range(n):
                if row[k]:
                    out_q[k] += Fraction(x[i]) * Fraction(y[j]) * row[k]
        return tuple(out_q)

    def ad(self, i: int) -> List[List[Fraction]]:
        """Row convention: row j holds the coordinates of [v_i, v_j]."""
        return [list(self.constants[i][j]) for j in range(self.dim)]

    def ad_vector(self, x: Sequence[Fraction]) -> List[List[Fraction]]:
        n = self.dim
        out = [[Fraction(0)] * n for _ in range(n)]
        for i, xi in enumerate(x):
            if xi:
                for j in range(n):
                    for k in range(n):
                        out[j][k] += Fraction(xi) * self.constants[i][j][k]
        return out

    def commutator_table(self) -> List[List[Tuple[Fraction, ...]]]:
        return [[tuple(self.constants[i][j]) for j in range(self.dim)] for i in range(self.dim)]

    def format_vector(self, coords: Sequence[Coordinate]) -> str:
        return format_vector(self.labels, coords)

    def span_of_brackets(self, left: Subspace, right: Subspace) -> Subspace:
        vectors = [list(self.bracket(a, b)) for a in left for b in right]
        vectors = [v for v in vectors if any(v)]
        return rref(vectors)[0] if vectors else []

    def adjoints(self) -> List["AdjointMatrix"]:
        """Ad(exp(eps v_i)) for every basis vector, computed once."""
        if self._adjoints is None:
            self._adjoints = [adjoint_matrix(self, i) for i in range(self.dim)]
        return self._adjoints

    def full_space(self) -> Subspace:
        return [list(self.basis_vector(i)) for i in range(self.dim)]

    def is_ideal(self, subspace: Subspace) -> bool:
        if not subspace:
            return True
        image = self.span_of_brackets(self.full_space(), subspace)
        return all(solve_in_span(subspace, v) is not None for v in image)


def _fraction_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def format_vector(labels: Sequence[str], coords: Sequence[Coordinate]) -> str:
    parts: List[str] = []
    for label, raw in zip(labels, coords):
        coeff = as_expr(raw) if not isinstance(raw, Expr) else raw
        if coeff.is_zero:
            continue
        if coeff == ONE:
            parts.append(label)
        elif coeff == -ONE:
            parts.append(f"-{label}")
        elif coeff.needs_parentheses() and len(coeff.terms) > 1:
            parts.append(f"({coeff})*{label}")
        else:
            parts.append(f"{coeff}*{label}")
    if not parts:
        return "0"
    text = parts[0]
    for part in parts[1:]:
        text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return text


def from_fields(fields: Sequence[VectorField], labels: Optional[Sequence[str]] = None) -> LieAlgebra:
    """Structure constants of the span of independent point fields."""
    labels = list(labels or [f"v{i + 1}" for i in range(len(fields))])
    vectors = [f.vector() for f in fields]
    keys = set()
    for vec in vectors:
        keys.update(vec)
    brackets: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    pending = {}
    for i in range(len(fields)):
        for j in range(i + 1, len(fields)):
            b = lie_bracket(fields[i], fields[j])
            pending[(i, j)] = b.vector()
            keys.update(pending[(i, j)])
    ordered = sorted(keys, key=lambda k: (k[0], [a.sort_key + (e,) for a, e in k[1]]))
    dense = [[vec.get(k, Fraction(0)) for k in ordered] for vec in vectors]
    if rank(dense) != len(fields):
        raise ValidationError("basis fields are linearly dependent")
    for (i, j), vec in pending.items():
        target = [vec.get(k, Fraction(0)) for k in ordered]
        coeffs = solve_in_span(dense, target)
        if coeffs is None:
            raise ClosureError(
                f"[{labels[i]}, {labels[j]}] = {lie_bracket(fields[i], fields[j]).render()} "
                "is not in the span of the basis"
            )
        brackets[(i, j)] = {k: c for k, c in enumerate(coeffs) if c}
    return LieAlgebra(labels, _antisymmetric(len(fields), brackets))


def _antisymmetric(n: int, brackets: Mapping[Tuple[int, int], Mapping[int, Fraction]]):
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for (i, j), value in brackets.items():
        for k, v in value.items():
            c[i][j][k] = v
            c[j][i][k] = -v
    return c


# adjoint action


def default_parameter() -> Symbol:
    return Symbol(config.group_parameter, SymbolKind.GROUP_PARAMETER)


@dataclass(frozen=True)
class AdjointMatrix:
    """Row j holds Ad(exp(eps v_i)) v_j in the basis."""

    entries: Tuple[Tuple[Expr, ...], ...]
    parameter: Symbol

    @property
    def size(self) -> int:
        return len(self.entries)

    def apply(self, coords: Sequence[Coordinate]) -> Tuple[Expr, ...]:
        n = self.size
        out = [ZERO] * n
        for j, xj in enumerate(coords):
            xj = as_expr(xj)
            if xj.is_zero:
                continue
            for k in range(n):
                if not self.entries[j][k].is_zero:
                    out[k] = out[k] + xj * self.entries[j][k]
        return tuple(out)

    def at(self, value) -> "AdjointMatrix":
        value = as_expr(value)
        parameter = self.parameter
        for atom in value.atoms():
            if isinstance(atom, Symbol) and atom.kind == SymbolKind.GROUP_PARAMETER:
                parameter = atom
        return AdjointMatrix(
            tuple(tuple(e.substitute({self.parameter: value}) for e in row) for row in self.entries),
            parameter,
        )

    def __matmul__(self, other: "AdjointMatrix") -> "AdjointMatrix":
        n = self.size
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                total = ZERO
                for k in range(n):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if not a.is_zero and not b.is_zero:
                        total = total + a * b
                row.append(total)
            rows.append(tuple(row))
        return AdjointMatrix(tuple(rows), self.parameter)

    def is_polynomial(self) -> bool:
        return not any(
            isinstance(atom, ExpAtom) for row in self.entries for e in row for atom in e.atoms()
        )

    def is_identity(self) -> bool:
        return all(
            e == (ONE if i == j else ZERO)
            for i, row in enumerate(self.entries)
            for j, e in enumerate(row)
        )

    def derivative_at_zero(self) -> List[List[Fraction]]:
        return [
            [e.partial(self.parameter).substitute({self.parameter: ZERO}).constant_value() for e in row]
            for row in self.entries
        ]

    def evaluate(self, epsilon: Fraction) -> List[List[Fraction]]:
        """Rational matrix at a rational parameter value; polynomial matrices only."""
        if not self.is_polynomial():
            raise NotSupportedError("exponential entries have no rational value")
        return [[e.substitute({self.parameter: Expr.constant(epsilon)}).constant_value() for e in row] for row in self.entries]

    def rows_text(self) -> List[List[str]]:
        return [[str(e) for e in row] for row in self.entries]


def _to_sympy(m: Sequence[Sequence[Fraction]]) -> sympy.Matrix:
    n = len(m)
    return sympy.Matrix(n, n, lambda i, j: sympy.Rational(m[i][j].numerator, m[i][j].denominator))


def _from_sympy(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def exp_matrix(a: Sequence[Sequence[Fraction]], parameter: Symbol) -> Tuple[Tuple[Expr, ...], ...]:
    """exp(-parameter * a) exactly, via the Jordan form over the rationals."""
    n = len(a)
    m = _to_sympy(a)
    entries = [[ZERO] * n for _ in range(n)]
    if m.is_zero_matrix:
        return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))
    try:
        eigenvalues = m.eigenvals()
    except NotImplementedError:
        raise NotSupportedError("eigenvalues of the adjoint matrix are not computable") from None
    if not all(ev.is_rational for ev in eigenvalues):
        raise NotSupportedError(
            "adjoint matrix has irrational eigenvalues; exact exponentials are not supported"
        )
    p, j = m.jordan_form()
    p_inv = p.inv()
    eps = Expr.atom(parameter)
    start = 0
    while start < n:
        end = start
        while end + 1 < n and j[end, end + 1] == 1:
            end += 1
        size = end - start + 1
        lam = _from_sympy(j[start, start])
        shift = sympy.zeros(size, size)
        for r in range(size - 1):
            shift[r, r + 1] = 1
        power = sympy.eye(size)
        growth = Expr.exp(-lam, parameter)
        for k in range(size):
            block = p[:, start : end + 1] * power * p_inv[start : end + 1, :]
            scalar = Fraction((-1) ** k, factorial(k))
            factor = growth * eps**k * scalar
            for r in range(n):
                for c in range(n):
                    value = _from_sympy(block[r, c])
                    if value:
                        entries[r][c] = entries[r][c] + factor * value
            power = power * shift
        start = end + 1
    return tuple(tuple(row) for row in entries)


def adjoint_matrix(g: LieAlgebra, i: int, parameter: Optional[Symbol] = None) -> AdjointMatrix:
    """Ad(exp(eps v_i)) = exp(-eps ad(v_i)) in the row convention."""
    parameter = parameter or default_parameter()
    return AdjointMatrix(exp_matrix(g.ad(i), parameter), parameter)


# one-dimensional normal forms


@dataclass(frozen=True)
class Move:
    generator: int
    epsilon: Fraction


@dataclass(frozen=True)
class NormalForm:
    vector: Tuple[Fraction, ...]
    moves: Tuple[Move, ...]
    scale: Fraction

    def transcript(self, labels: Sequence[str]) -> List[str]:
        lines = [f"Ad(exp({_fraction_text(m.epsilon)}*{labels[m.generator]}))" for m in self.moves]
        if self.scale != 1:
            lines.append(f"scale by {_fraction_text(self.scale)}")
        return lines


def _support(vector: Sequence[Fraction]) -> int:
    return sum(1 for v in vector if v)


def rational_roots(poly: Expr, parameter: Symbol) -> List[Fraction]:
    degree = poly.degree(parameter)
    if degree == 0:
        return []
    coefficients = [Fraction(0)] * (degree + 1)
    for key, coeff in poly.collect({parameter}).items():
        power = key[0][1] if key else 0
        coefficients[power] = coeff.constant_value()
    eps = sympy.Symbol("e")
    sp = sympy.Poly(
        [sympy.Rational(c.numerator, c.denominator) for c in reversed(coefficients)], eps, domain="QQ"
    )
    return sorted(_from_sympy(r) for r in sp.ground_roots())


def apply_move(g: LieAlgebra, vector: Sequence[Fraction], move: Move) -> Tuple[Fraction, ...]:
    m = g.adjoints()[move.generator].evaluate(move.epsilon)
    n = g.dim
    return tuple(sum((Fraction(vector[j]) * m[j][k] for j in range(n)), Fraction(0)) for k in range(n))


def normalize_1d(g: LieAlgebra, x: Sequence[Fraction]) -> NormalForm:
    """Greedy support reduction by polynomial adjoint moves, then unit last coordinate."""
    vector = tuple(Fraction(v) for v in x)
    if not any(vector):
        raise ValidationError("cannot normalize the zero vector")
    matrices = g.adjoints()
    usable = [i for i, m in enumerate(matrices) if m.is_polynomial() and not m.is_identity()]
    moves: List[Move] = []
    while True:
        best = None
        for i in usable:
            image = matrices[i].apply(vector)
            for k, coord in enumerate(vector):
                if not coord:
                    continue
                for root in rational_roots(image[k], matrices[i].parameter):
                    if not root:
                        continue
                    candidate = apply_move(g, vector, Move(i, root))
                    if _support(candidate) >= _support(vector):
                        continue
                    key = (abs(root), i, k)
                    if best is None or key < best[0]:
                        best = (key, Move(i, root), candidate)
        if best is None:
            break
        moves.append(best[1])
        vector = best[2]
        logger.debug("move %s -> %s", best[1], vector)
    last = max(k for k, v in enumerate(vector) if v)
    scale = 1 / vector[last]
    return NormalForm(tuple(v * scale for v in vector), tuple(moves), scale)


def replay(g: LieAlgebra, x: Sequence[Fraction], form: NormalForm) -> Tuple[Fraction, ...]:
    vector = tuple(Fraction(v) for v in x)
    for move in form.moves:
        vector = apply_move(g, vector, move)
    return tuple(v * form.scale for v in vector)


# structure


def derived_series(g: LieAlgebra) -> List[Subspace]:
    series = [g.full_space()]
    while series[-1]:
        nxt = g.span_of_brackets(series[-1], series[-1])
        if len(nxt) == len(series[-1]):
            break
        series.append(nxt)
    return series


def lower_central_series(g: LieAlgebra) -> List[Subspace]:
    series = [g.full_space()]
    while series[-1]:
        nxt = g.span_of_brackets(g.full_space(), series[-1])
        if len(nxt) == len(series[-1]):
            break
        series.append(nxt)
    return series


def is_solvable(g: LieAlgebra) -> bool:
    return not derived_series(g)[-1]


def is_nilpotent(g: LieAlgebra) -> bool:
    return not lower_central_series(g)[-1]


def killing_form(g: LieAlgebra) -> List[List[Fraction]]:
    ads = [g.ad(i) for i in range(g.dim)]
    return [[trace(matmul(ads[i], ads[j])) for j in range(g.dim)] for i in range(g.dim)]


def killing_value(g: LieAlgebra, x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    k = killing_form(g)
    n = g.dim
    return sum((Fraction(x[i]) * k[i][j] * Fraction(y[j]) for i in range(n) for j in range(n)), Fraction(0))


def radical(g: LieAlgebra) -> Subspace:
    """Orthogonal complement of [g, g] under the Killing form."""
    derived = g.span_of_brackets(g.full_space(), g.full_space())
    if not derived:
        return g.full_space()
    return intersect_complement(derived, killing_form(g))


def center(g: LieAlgebra) -> Subspace:
    n = g.dim
    rows = []
    for j in range(n):
        for k in range(n):
            row = {i: g.constants[i][j][k] for i in range(n) if g.constants[i][j][k]}
            if row:
                rows.append(row)
    basis = nullspace(rows, n)
    return rref(basis)[0] if basis else []


SUPERSCRIPTS = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _abelian_name(dim: int) -> str:
    return "ℝ" if dim == 1 else "ℝ" + str(dim).translate(SUPERSCRIPTS)


@dataclass(frozen=True)
class Decomposition:
    abelian: Subspace
    complement: Subspace
    name: str


def _name_of(g: LieAlgebra, subspace: Subspace) -> str:
    dim = len(subspace)
    inner = g.span_of_brackets(subspace, subspace)
    if not inner:
        return _abelian_name(dim)
    if dim == 2:
        return "a(1)"
    return f"non-abelian ideal of dimension {dim}"


def decompose(g: LieAlgebra) -> Decomposition:
    """g = center ⊕ ideal when the center meets [g, g] trivially."""
    z = center(g)
    derived = g.span_of_brackets(g.full_space(), g.full_space())
    if not derived:
        return Decomposition(g.full_space(), [], _abelian_name(g.dim))
    if not z or rank(z + derived) < len(z) + len(derived):
        return Decomposition([], g.full_space(), _name_of(g, g.full_space()))
    complement = [list(v) for v in derived]
    for i in range(g.dim):
        candidate = list(g.basis_vector(i))
        if rank(z + complement + [candidate]) > len(z) + len(complement):
            complement.append(candidate)
    complement = rref(complement)[0]
    name = f"{_abelian_name(len(z))} ⊕ {_name_of(g, complement)}"
    return Decomposition(z, complement, name)


def format_subspace(g: LieAlgebra, subspace: Subspace) -> str:
    if not subspace:
        return "0"
    return "⟨" + ", ".join(g.format_vector(v) for v in subspace) + "⟩"
