"""Subalgebra closure tests and optimal-system case analysis."""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from ..errors import ValidationError
from .expr import ONE, ZERO, Expr, Symbol, SymbolKind, as_expr
from .liealg import (
    LieAlgebra,
    Move,
    NormalForm,
    apply_move,
    center,
    format_vector,
    normalize_1d,
    rational_roots,
)
from .linalg import maximal_minors, rank, rref

logger = logging.getLogger(__name__)

SymbolicVector = Tuple[Expr, ...]


def coefficient_symbols(prefix: str, count: int, start: int = 1) -> List[Symbol]:
    """Free real coefficients such as α1, β3."""
    return [Symbol(f"{prefix}{i}", SymbolKind.PARAMETER) for i in range(start, start + count)]


def unknowns(names: Iterable[str]) -> List[Symbol]:
    return [Symbol(name, SymbolKind.ANSATZ_UNKNOWN) for name in names]


def symbolic_vector(coords: Sequence) -> SymbolicVector:
    return tuple(as_expr(c) for c in coords)


def combination(dim: int, terms: Mapping[int, object]) -> SymbolicVector:
    """Vector with the given coefficients at 0-based basis positions."""
    coords = [ZERO] * dim
    for index, value in terms.items():
        coords[index] = as_expr(value)
    return tuple(coords)


def render_span(g: LieAlgebra, vectors: Sequence[SymbolicVector]) -> str:
    return "⟨" + ", ".join(format_vector(g.labels, v) for v in vectors) + "⟩"


def _monic(e: Expr) -> Expr:
    lead = e.sorted_terms()[0][1]
    return e * (1 / lead)


def _dedupe(polys: Iterable[Expr]) -> List[Expr]:
    seen: Dict[Expr, None] = {}
    for p in polys:
        if not p.is_zero:
            seen.setdefault(_monic(p), None)
    return list(seen)


def _specialize(vector: SymbolicVector, zeros: Iterable[Symbol]) -> SymbolicVector:
    bindings = {s: ZERO for s in zeros}
    if not bindings:
        return vector
    return tuple(c.substitute(bindings) for c in vector)


def _random_value(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 89), rng.randint(1, 17)) * rng.choice((1, -1))


def _atoms_of(vectors: Iterable[SymbolicVector]) -> List:
    found = set()
    for v in vectors:
        for c in v:
            found.update(c.atoms())
    return sorted(found, key=lambda a: a.sort_key)


def sample(vectors: Sequence[SymbolicVector], rng: random.Random) -> List[List[Fraction]]:
    """Rational instance with every symbol drawn at random (generically nonzero)."""
    values = {atom: _random_value(rng) for atom in _atoms_of(vectors)}
    return [[c.evaluate(values) for c in v] for v in vectors]


def generic_rank(vectors: Sequence[SymbolicVector], trials: int = 3, seed: int = 0) -> int:
    if not vectors:
        return 0
    rng = random.Random(seed)
    return max(rank(sample(vectors, rng)) for _ in range(trials))


# closure


class Closure(str, Enum):
    CLOSED = "closed"
    NOT_CLOSED = "not closed"
    CONDITIONAL = "closed under conditions"


@dataclass(frozen=True)
class ClosureCheck:
    status: Closure
    conditions: Tuple[Expr, ...] = ()
    independent: bool = True
    failures: Tuple[Tuple[int, int], ...] = ()

    @property
    def holds(self) -> bool:
        return self.status is Closure.CLOSED


def is_subalgebra(
    g: LieAlgebra, vectors: Sequence[SymbolicVector], nonzero: Iterable[Symbol] = ()
) -> ClosureCheck:
    """Every bracket [x_i, x_j] must lie in span{x}; minors give the conditions."""
    vectors = [symbolic_vector(v) for v in vectors]
    if any(len(v) != g.dim for v in vectors):
        raise ValidationError(f"vectors must have {g.dim} coordinates")
    nonzero = set(nonzero)
    conditions: List[Expr] = []
    failures: List[Tuple[int, int]] = []
    impossible = False
    for i, j in combinations(range(len(vectors)), 2):
        b = g.bracket(vectors[i], vectors[j])
        if all(c.is_zero for c in b):
            continue
        minors = _dedupe(maximal_minors(list(vectors) + [b]))
        if not minors:
            continue
        failures.append((i, j))
        for m in minors:
            if m.is_constant() or _is_nonvanishing(m, nonzero):
                impossible = True
        conditions.extend(minors)
    independent = generic_rank(vectors) == len(vectors)
    if impossible:
        status = Closure.NOT_CLOSED
    elif conditions:
        status = Closure.CONDITIONAL
    else:
        status = Closure.CLOSED
    return ClosureCheck(status, tuple(_dedupe(conditions)), independent, tuple(failures))


def _is_nonvanishing(e: Expr, nonzero: set) -> bool:
    """A single term whose atoms are all known to be nonzero."""
    if len(e) != 1:
        return False
    ((monomial, _),) = e.terms.items()
    return all(atom in nonzero for atom, _ in monomial)


# extension conditions


class CaseStatus(str, Enum):
    ALWAYS = "always"
    NEVER = "never"
    CONDITIONAL = "conditional"
    DEPENDENT = "dependent"


@dataclass(frozen=True)
class SupportCase:
    """Outcome when exactly the unknowns in support are nonzero."""

    support: Tuple[int, ...]
    status: CaseStatus
    constraints: Tuple[Expr, ...] = ()

    def label(self, g: LieAlgebra) -> str:
        return "{" + ", ".join(g.labels[k] for k in self.support) + "}"


@dataclass(frozen=True)
class ExtensionCondition:
    """The bracket system, its eliminated constraints and the support case split."""

    base: Tuple[SymbolicVector, ...]
    unknown: SymbolicVector
    system: Tuple[Expr, ...]
    constraints: Tuple[Expr, ...]
    cases: Tuple[SupportCase, ...]

    def solutions(self) -> List[SupportCase]:
        return [c for c in self.cases if c.status is CaseStatus.ALWAYS]

    def case(self, support: Iterable[int]) -> SupportCase:
        key = tuple(sorted(support))
        for c in self.cases:
            if c.support == key:
                return c
        raise ValidationError(f"no case for support {key}")


def _bracket_system(
    g: LieAlgebra,
    left: SymbolicVector,
    unknown: SymbolicVector,
    multipliers: Sequence[Tuple[Symbol, SymbolicVector]],
) -> List[Expr]:
    """Coordinates of [left, unknown] - sum of multiplier * vector."""
    b = g.bracket(left, unknown)
    rows = []
    for i in range(g.dim):
        value = b[i]
        for symbol, vector in multipliers:
            value = value - Expr.atom(symbol) * vector[i]
        rows.append(value)
    return rows


def _classify(
    base: Sequence[SymbolicVector],
    unknown: SymbolicVector,
    brackets: Sequence[SymbolicVector],
    a: Sequence[Symbol],
    support: Tuple[int, ...],
    nonzero: set,
) -> SupportCase:
    zeros = {a[k]: ZERO for k in range(len(a)) if k not in support}
    y = tuple(c.substitute(zeros) for c in unknown)
    spanning = list(base) + [y]
    if not maximal_minors(spanning):
        return SupportCase(support, CaseStatus.DEPENDENT)
    constraints: List[Expr] = []
    for b in brackets:
        b = tuple(c.substitute(zeros) for c in b)
        if all(c.is_zero for c in b):
            continue
        constraints.extend(maximal_minors(spanning + [b]))
    constraints = _dedupe(constraints)
    if not constraints:
        return SupportCase(support, CaseStatus.ALWAYS)
    known = nonzero | {a[k] for k in support}
    if any(c.is_constant() or _is_nonvanishing(c, known) for c in constraints):
        return SupportCase(support, CaseStatus.NEVER, tuple(constraints))
    return SupportCase(support, CaseStatus.CONDITIONAL, tuple(constraints))


def _supports(n: int, excluded: Iterable[int] = ()) -> List[Tuple[int, ...]]:
    allowed = [k for k in range(n) if k not in set(excluded)]
    return [s for size in range(1, len(allowed) + 1) for s in combinations(allowed, size)]


def _extension(
    g: LieAlgebra,
    base: Sequence[SymbolicVector],
    multiplier_names: Sequence[Sequence[str]],
    nonzero: Iterable[Symbol],
) -> ExtensionCondition:
    a = unknowns(f"a{k + 1}" for k in range(g.dim))
    y = tuple(Expr.atom(s) for s in a)
    system: List[Expr] = []
    brackets = []
    for left, names in zip(base, multiplier_names):
        symbols = unknowns(names)
        system.extend(_bracket_system(g, left, y, list(zip(symbols, [y] + list(base)))))
        brackets.append(g.bracket(left, y))
    constraints: List[Expr] = []
    for b in brackets:
        constraints.extend(maximal_minors(list(base) + [y, b]))
    nonzero = set(nonzero)
    cases = tuple(
        _classify(base, y, brackets, a, support, nonzero) for support in _supports(g.dim)
    )
    return ExtensionCondition(
        tuple(base), y, tuple(system), tuple(_dedupe(constraints)), cases
    )


def solve_pair_condition(
    g: LieAlgebra, x1: SymbolicVector, nonzero: Iterable[Symbol] = ()
) -> ExtensionCondition:
    """All X with [x1, X] = λ x1 + μ X, by support pattern of X."""
    x1 = symbolic_vector(x1)
    if all(c.is_zero for c in x1):
        raise ValidationError("the first generator must be nonzero")
    return _extension(g, [x1], [("λ", "μ")], nonzero)


def solve_triple_condition(
    g: LieAlgebra, y1: SymbolicVector, y2: SymbolicVector, nonzero: Iterable[Symbol] = ()
) -> ExtensionCondition:
    """All Y with [y_r, Y] = λ_r Y + μ_r y1 + ν_r y2 for r = 1, 2."""
    y1, y2 = symbolic_vector(y1), symbolic_vector(y2)
    check = is_subalgebra(g, [y1, y2], nonzero)
    if check.status is not Closure.CLOSED:
        raise ValidationError(f"{render_span(g, [y1, y2])} is not a subalgebra")
    if not check.independent:
        raise ValidationError(f"{render_span(g, [y1, y2])} is not two-dimensional")
    return _extension(g, [y1, y2], [("λ1", "μ1", "ν1"), ("λ2", "μ2", "ν2")], nonzero)


def extends(g: LieAlgebra, base: Sequence[SymbolicVector], y: SymbolicVector) -> bool:
    """True when base + [y] is a subalgebra of one dimension more."""
    vectors = [symbolic_vector(v) for v in base] + [symbolic_vector(y)]
    if generic_rank(vectors) != len(vectors):
        return False
    return is_subalgebra(g, vectors).holds


# one-dimensional classes


@dataclass(frozen=True)
class OrbitClass:
    """Normal forms sharing the same non-central support."""

    coordinates: Tuple[int, ...]
    representative: SymbolicVector
    members: int
    example: Tuple[Fraction, ...]
    example_form: NormalForm

    def render(self, g: LieAlgebra) -> str:
        return format_vector(g.labels, self.representative)


def _central_coordinates(g: LieAlgebra) -> List[int]:
    z = center(g)
    return [i for i in range(g.dim) if rank(z + [list(g.basis_vector(i))]) == len(z)]


def one_dimensional_classes(g: LieAlgebra, grid: Sequence[int] = range(-2, 3)) -> List[OrbitClass]:
    """Group normal forms of every nonzero grid vector by their non-central support."""
    central = set(_central_coordinates(g))
    groups: Dict[Tuple[int, ...], List[Tuple[Tuple[Fraction, ...], NormalForm]]] = {}
    for coords in product(grid, repeat=g.dim):
        if not any(coords):
            continue
        vector = tuple(Fraction(c) for c in coords)
        form = normalize_1d(g, vector)
        key = tuple(k for k, v in enumerate(form.vector) if v and k not in central)
        groups.setdefault(key, []).append((vector, form))
    alpha = coefficient_symbols("α", g.dim)
    classes = []
    for key in sorted(groups, key=lambda k: (len(k), k)):
        coordinates = tuple(sorted(central | set(key)))
        last = max(key) if key else None
        terms = {
            k: (ONE if k == last else Expr.atom(alpha[k])) for k in coordinates
        }
        members = groups[key]
        example, example_form = members[0]
        classes.append(
            OrbitClass(coordinates, combination(g.dim, terms), len(members), example, example_form)
        )
        logger.debug("1D class %s: %d grid vectors", coordinates, len(members))
    return classes


# two-dimensional classes


Signature = Tuple[Tuple[int, ...], Tuple[Tuple[int, ...], ...]]


def _pattern(rows: Sequence[Sequence[Fraction]]) -> Signature:
    reduced, pivots = rref(rows)
    return tuple(pivots), tuple(tuple(k for k, v in enumerate(r) if v) for r in reduced)


def _weight(rows: Sequence[Sequence[Fraction]]) -> int:
    reduced, _ = rref(rows)
    return sum(1 for r in reduced for v in r if v)


def normalize_subspace(
    g: LieAlgebra, basis: Sequence[Sequence[Fraction]]
) -> Tuple[List[List[Fraction]], List[Move]]:
    """Greedy polynomial adjoint moves that shrink the RREF support of a rational subspace."""
    rows, _ = rref([[Fraction(v) for v in r] for r in basis])
    matrices = g.adjoints()
    moves: List[Move] = []
    while True:
        best = None
        for i, m in enumerate(matrices):
            if not m.is_polynomial() or m.is_identity():
                continue
            for row in rows:
                for k, image in enumerate(m.apply(row)):
                    for root in rational_roots(image, m.parameter):
                        if not root:
                            continue
                        moved, _ = rref([apply_move(g, r, Move(i, root)) for r in rows])
                        if _weight(moved) >= _weight(rows):
                            continue
                        key = (abs(root), i, k)
                        if best is None or key < best[0]:
                            best = (key, Move(i, root), moved)
        if best is None:
            return rows, moves
        moves.append(best[1])
        rows = best[2]


def signature(g: LieAlgebra, vectors: Sequence[SymbolicVector], seed: int = 0) -> Signature:
    """Pivot and zero pattern of the normalized RREF at a generic rational point."""
    rows = sample(vectors, random.Random(seed))
    normalized, _ = normalize_subspace(g, rows)
    return _pattern(normalized)


@dataclass(frozen=True)
class PublishedClass:
    name: str
    vectors: Tuple[SymbolicVector, ...]
    condition: str = ""


@dataclass
class CandidateClass:
    """A two-dimensional subalgebra family found from a one-dimensional class."""

    vectors: Tuple[SymbolicVector, ...]
    signature: Signature
    source: str
    matches: List[str] = field(default_factory=list)

    @property
    def listed(self) -> bool:
        return bool(self.matches)


def _class_symbols(vector: SymbolicVector) -> List[Symbol]:
    return [a for a in _atoms_of([vector]) if isinstance(a, Symbol)]


def two_dimensional_classes(
    g: LieAlgebra, classes: Sequence[OrbitClass], seed: int = 0
) -> List[CandidateClass]:
    """Pair every specialization of every 1D class with each admissible support."""
    found: Dict[Signature, CandidateClass] = {}
    for orbit in classes:
        symbols = _class_symbols(orbit.representative)
        for size in range(len(symbols) + 1):
            for zeros in combinations(symbols, size):
                x1 = _specialize(orbit.representative, zeros)
                if all(c.is_zero for c in x1):
                    continue
                last = max(k for k, c in enumerate(x1) if not c.is_zero)
                live = [s for s in symbols if s not in zeros]
                condition = solve_pair_condition(g, x1, nonzero=live)
                for case in condition.cases:
                    if last in case.support or case.status is not CaseStatus.ALWAYS:
                        continue
                    a = unknowns(f"a{k + 1}" for k in range(g.dim))
                    x = tuple(
                        Expr.atom(a[k]) if k in case.support else ZERO for k in range(g.dim)
                    )
                    sig = signature(g, [x1, x], seed)
                    if sig not in found:
                        found[sig] = CandidateClass(
                            (x1, x), sig, f"{format_vector(g.labels, x1)} with {case.label(g)}"
                        )
    return sorted(found.values(), key=lambda c: c.signature)


def published_signatures(
    g: LieAlgebra, published: PublishedClass, seed: int = 0
) -> List[Signature]:
    """Signatures of the class and of each specialization with some coefficients zero."""
    symbols = _atoms_of(published.vectors)
    out: List[Signature] = []
    for size in range(len(symbols) + 1):
        for zeros in combinations(symbols, size):
            vectors = [_specialize(v, zeros) for v in published.vectors]
            if generic_rank(vectors) != len(vectors):
                continue
            sig = signature(g, vectors, seed)
            if sig not in out:
                out.append(sig)
    return out


def match_published(
    g: LieAlgebra,
    candidates: Sequence[CandidateClass],
    published: Sequence[PublishedClass],
    seed: int = 0,
) -> List[CandidateClass]:
    for entry in published:
        signatures = published_signatures(g, entry, seed)
        for candidate in candidates:
            if candidate.signature in signatures and entry.name not in candidate.matches:
                candidate.matches.append(entry.name)
    return list(candidates)
