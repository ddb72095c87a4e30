"""Canonical multivariate polynomials with exact rational coefficients.

An ``Expr`` is a finite map from monomials to nonzero ``Fraction``
coefficients. Monomials are tuples of ``(atom, exponent)`` pairs sorted by
``atom.sort_key``; atoms are ``Symbol``, ``ExpAtom`` or any hashable object
exposing a ``sort_key`` (jet coordinates live in ``lsa.core.jet``).

Atom order is fixed: symbol kind rank (independent, dependent, parameter,
group parameter, ansatz unknown, jet coordinate, exponential), then name,
then multi-index. Two expressions are equal iff their term maps are equal.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from types import MappingProxyType
from typing import (
    Callable,
    Dict,
    Iterable,
    List,
    Mapping,
    Optional,
    Tuple,
    Union,
)

from ..config import config
from ..errors import CapacityError, ValidationError


class SymbolKind(IntEnum):
    INDEPENDENT = 0
    DEPENDENT = 1
    PARAMETER = 2
    GROUP_PARAMETER = 3
    ANSATZ_UNKNOWN = 4


JET_RANK = 5
EXP_RANK = 6


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: SymbolKind

    @property
    def sort_key(self) -> tuple:
        return (int(self.kind), self.name, ())

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ExpAtom:
    """exp(rate * argument) for a group-parameter symbol."""

    rate: Fraction
    argument: Symbol

    def __post_init__(self):
        if self.argument.kind != SymbolKind.GROUP_PARAMETER:
            raise ValidationError(
                f"exp atoms need a group parameter, got '{self.argument.name}'"
            )

    @property
    def sort_key(self) -> tuple:
        return (EXP_RANK, self.argument.name, (self.rate,))

    def __str__(self) -> str:
        if self.rate == 1:
            return f"exp({self.argument.name})"
        if self.rate == -1:
            return f"exp(-{self.argument.name})"
        return f"exp({_format_rational(self.rate)}*{self.argument.name})"


Atom = object
Monomial = Tuple[Tuple[Atom, int], ...]
Scalar = Union[int, Fraction]

ONE_MONOMIAL: Monomial = ()


def _format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _atom_key(pair: Tuple[Atom, int]) -> tuple:
    return pair[0].sort_key


def _check_exponent(exponent: int) -> None:
    if exponent > config.max_exponent:
        raise CapacityError(
            f"exponent {exponent} exceeds the configured bound {config.max_exponent}"
        )


def canonical_monomial(powers: Mapping[Atom, int]) -> Monomial:
    """Sort atoms, drop zero powers and merge exponentials of one argument."""
    rates: Dict[Symbol, Fraction] = {}
    out: List[Tuple[Atom, int]] = []
    for atom, exponent in powers.items():
        if exponent == 0:
            continue
        if isinstance(atom, ExpAtom):
            rates[atom.argument] = rates.get(atom.argument, Fraction(0)) + (
                atom.rate * exponent
            )
            continue
        if exponent < 0:
            raise ValidationError("negative exponents are not polynomial")
        _check_exponent(exponent)
        out.append((atom, exponent))
    for argument, rate in rates.items():
        if rate != 0:
            out.append((ExpAtom(Fraction(rate), argument), 1))
    out.sort(key=_atom_key)
    return tuple(out)


def multiply_monomials(left: Monomial, right: Monomial) -> Monomial:
    if not left:
        return right
    if not right:
        return left
    powers: Dict[Atom, int] = dict(left)
    for atom, exponent in right:
        powers[atom] = powers.get(atom, 0) + exponent
    return canonical_monomial(powers)


def monomial_degree(monomial: Monomial) -> int:
    return sum(e for a, e in monomial if not isinstance(a, ExpAtom))


def format_monomial(monomial: Monomial) -> str:
    parts = []
    for atom, exponent in monomial:
        parts.append(str(atom) if exponent == 1 else f"{atom}^{exponent}")
    return "*".join(parts) if parts else "1"


class Expr:
    """Immutable canonical polynomial. Use the operators to combine."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        # trusted constructor: monomials must already be canonical
        clean: Dict[Monomial, Fraction] = {}
        if terms:
            for monomial, coeff in terms.items():
                if coeff != 0:
                    clean[monomial] = Fraction(coeff)
        self._terms = clean
        self._hash: Optional[int] = None

    # construction

    @classmethod
    def constant(cls, value: Scalar) -> "Expr":
        return cls({ONE_MONOMIAL: value})

    @classmethod
    def atom(cls, atom: Atom) -> "Expr":
        return cls({canonical_monomial({atom: 1}): 1})

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[Mapping[Atom, int], Scalar]]) -> "Expr":
        out: Dict[Monomial, Fraction] = {}
        for powers, coeff in terms:
            monomial = canonical_monomial(powers)
            out[monomial] = out.get(monomial, Fraction(0)) + Fraction(coeff)
        return cls(out)

    @classmethod
    def exp(cls, rate: Scalar, argument: Symbol) -> "Expr":
        if rate == 0:
            return cls.constant(1)
        return cls.atom(ExpAtom(Fraction(rate), argument))

    # inspection

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def sorted_terms(self) -> List[Tuple[Monomial, Fraction]]:
        return sorted(
            self._terms.items(),
            key=lambda item: (
                -monomial_degree(item[0]),
                [a.sort_key + (e,) for a, e in item[0]],
            ),
        )

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_value(self) -> Fraction:
        """The rational value of a constant expression."""
        if not self.is_constant():
            raise ValidationError(f"'{self}' is not a rational constant")
        return self._terms.get(ONE_MONOMIAL, Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get(ONE_MONOMIAL, Fraction(0))

    def atoms(self) -> set:
        found = set()
        for monomial in self._terms:
            for atom, _ in monomial:
                found.add(atom)
        return found

    def degree(self, atom: Atom) -> int:
        best = 0
        for monomial in self._terms:
            for a, e in monomial:
                if a == atom and e > best:
                    best = e
        return best

    def total_degree(self) -> int:
        return max((monomial_degree(m) for m in self._terms), default=0)

    def is_unit_monomial(self) -> bool:
        """True for c * exp(...) with c a nonzero rational."""
        if len(self._terms) != 1:
            return False
        (monomial,) = self._terms
        return all(isinstance(a, ExpAtom) for a, _ in monomial)

    def unit_inverse(self) -> "Expr":
        if not self.is_unit_monomial():
            raise ValidationError(f"'{self}' is not invertible in the kernel")
        ((monomial, coeff),) = self._terms.items()
        inverse = tuple(
            (ExpAtom(-a.rate, a.argument), 1) for a, _ in monomial
        )
        return Expr({canonical_monomial(dict(inverse)): 1 / coeff})

    # arithmetic

    def __add__(self, other) -> "Expr":
        other = as_expr(other)
        if not other._terms:
            return self
        out = dict(self._terms)
        for monomial, coeff in other._terms.items():
            value = out.get(monomial, 0) + coeff
            if value:
                out[monomial] = value
            else:
                out.pop(monomial, None)
        return Expr(out)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Expr":
        return self + (-as_expr(other))

    def __rsub__(self, other) -> "Expr":
        return as_expr(other) - self

    def __mul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Expr()
            return Expr({m: c * other for m, c in self._terms.items()})
        other = as_expr(other)
        if not self._terms or not other._terms:
            return Expr()
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                monomial = multiply_monomials(m1, m2)
                out[monomial] = out.get(monomial, 0) + c1 * c2
        return Expr(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Expr":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValidationError("only nonnegative integer powers are polynomial")
        if len(self._terms) == 1 and exponent > 0:
            ((monomial, coeff),) = self._terms.items()
            powers = {a: e * exponent for a, e in monomial}
            return Expr({canonical_monomial(powers): coeff**exponent})
        _check_exponent(exponent)
        result = Expr.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Expr.constant(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # calculus and rewriting

    def partial(self, atom: Atom) -> "Expr":
        """Formal partial derivative; exp(r*eps) differentiates to r*exp(r*eps)."""
        out: Dict[Monomial, Fraction] = {}

        def add(powers: Dict[Atom, int], coeff: Fraction) -> None:
            monomial = canonical_monomial(powers)
            value = out.get(monomial, 0) + coeff
            if value:
                out[monomial] = value
            else:
                out.pop(monomial, None)

        for monomial, coeff in self._terms.items():
            powers = dict(monomial)
            exponent = powers.get(atom, 0)
            if exponent:
                reduced = dict(powers)
                reduced[atom] = exponent - 1
                add(reduced, coeff * exponent)
            if isinstance(atom, Symbol) and atom.kind == SymbolKind.GROUP_PARAMETER:
                for a in monomial:
                    if isinstance(a[0], ExpAtom) and a[0].argument == atom:
                        add(dict(powers), coeff * a[0].rate)
        return Expr(out)

    def substitute(self, bindings: Mapping[Atom, "ExprLike"]) -> "Expr":
        """Simultaneous substitution; exp atoms follow their group parameter."""
        replacements = {a: as_expr(e) for a, e in bindings.items()}
        _check_acyclic(replacements)
        cache: Dict[Tuple[Atom, int], Expr] = {}

        def power(atom: Atom, exponent: int) -> Expr:
            key = (atom, exponent)
            if key not in cache:
                if isinstance(atom, ExpAtom) and atom.argument in replacements:
                    cache[key] = _exp_of(
                        atom.rate * exponent, replacements[atom.argument]
                    )
                elif atom in replacements:
                    cache[key] = replacements[atom] ** exponent
                else:
                    cache[key] = Expr({canonical_monomial({atom: exponent}): 1})
            return cache[key]

        result = Expr()
        for monomial, coeff in self._terms.items():
            term = Expr.constant(coeff)
            for atom, exponent in monomial:
                term = term * power(atom, exponent)
            result = result + term
        return result

    def collect(
        self, focus: Union[Iterable[Atom], Callable[[Atom], bool]]
    ) -> Dict[Monomial, "Expr"]:
        """Split into focus monomials times focus-free coefficients."""
        if callable(focus):
            in_focus = focus
        else:
            focus_set = set(focus)
            in_focus = focus_set.__contains__
        groups: Dict[Monomial, Dict[Monomial, Fraction]] = {}
        for monomial, coeff in self._terms.items():
            key = tuple(p for p in monomial if in_focus(p[0]))
            rest = tuple(p for p in monomial if not in_focus(p[0]))
            bucket = groups.setdefault(key, {})
            bucket[rest] = bucket.get(rest, 0) + coeff
        return {key: Expr(bucket) for key, bucket in groups.items() if any(bucket.values())}

    def coefficient(self, monomial: Monomial) -> Fraction:
        return self._terms.get(monomial, Fraction(0))

    def evaluate(self, values: Mapping[Atom, Scalar]) -> Fraction:
        """Exact value at a rational point; every atom must be assigned."""
        total = Fraction(0)
        for monomial, coeff in self._terms.items():
            term = coeff
            for atom, exponent in monomial:
                if isinstance(atom, ExpAtom):
                    value = values.get(atom.argument)
                    if value is None or value * atom.rate != 0:
                        raise ValidationError(f"cannot evaluate {atom} rationally")
                    continue
                if atom not in values:
                    raise ValidationError(f"no value for atom '{atom}'")
                term *= Fraction(values[atom]) ** exponent
            total += term
        return total

    # rendering

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces: List[str] = []
        for index, (monomial, coeff) in enumerate(self.sorted_terms()):
            negative = coeff < 0
            magnitude = -coeff if negative else coeff
            if not monomial:
                body = _format_rational(magnitude)
            elif magnitude == 1:
                body = format_monomial(monomial)
            else:
                body = f"{_format_rational(magnitude)}*{format_monomial(monomial)}"
            if index == 0:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"Expr({self})"

    def needs_parentheses(self) -> bool:
        if len(self._terms) > 1:
            return True
        if len(self._terms) == 1:
            ((monomial, coeff),) = self._terms.items()
            return coeff.denominator != 1 and bool(monomial)
        return False

    def to_json(self) -> dict:
        return {
            "terms": [
                {
                    "coeff": _format_rational(coeff),
                    "atoms": [
                        str(a) if e == 1 else f"{a}^{e}" for a, e in monomial
                    ],
                }
                for monomial, coeff in self.sorted_terms()
            ]
        }


ExprLike = Union[Expr, int, Fraction, Symbol, ExpAtom]

ZERO = Expr()
ONE = Expr.constant(1)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Expr.constant(value)
    if hasattr(value, "sort_key"):
        return Expr.atom(value)
    raise ValidationError(f"cannot convert {value!r} to an expression")


def _exp_of(rate: Fraction, argument: Expr) -> Expr:
    """exp(rate * argument) for an argument linear in group parameters."""
    result = Expr.constant(1)
    for monomial, coeff in argument.terms.items():
        if not monomial:
            if rate * coeff != 0:
                raise ValidationError(
                    f"exp of the constant {_format_rational(rate * coeff)} is not exact"
                )
            continue
        if (
            len(monomial) != 1
            or monomial[0][1] != 1
            or not isinstance(monomial[0][0], Symbol)
            or monomial[0][0].kind != SymbolKind.GROUP_PARAMETER
        ):
            raise ValidationError(
                f"exp argument '{argument}' must be linear in group parameters"
            )
        result = result * Expr.exp(rate * coeff, monomial[0][0])
    return result


def _check_acyclic(replacements: Mapping[Atom, Expr]) -> None:
    graph = {}
    for atom, expr in replacements.items():
        referenced = set(expr.atoms())
        for a in list(referenced):
            if isinstance(a, ExpAtom):
                referenced.add(a.argument)
        graph[atom] = {a for a in referenced if a in replacements and a != atom}
    state: Dict[Atom, int] = {}

    def visit(node: Atom) -> None:
        state[node] = 1
        for nxt in graph[node]:
            if state.get(nxt) == 1:
                raise ValidationError(
                    f"cyclic bindings between '{node}' and '{nxt}'"
                )
            if state.get(nxt) is None:
                visit(nxt)
        state[node] = 2

    for node in sorted(graph, key=lambda a: a.sort_key):
        if node not in state:
            visit(node)


# raw expression trees


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Leaf:
    atom: Atom


@dataclass(frozen=True)
class Add:
    terms: tuple


@dataclass(frozen=True)
class Mul:
    factors: tuple


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


Tree = Union[Num, Leaf, Add, Mul, Neg, Pow]


def normalize(tree: Tree) -> Expr:
    if isinstance(tree, Num):
        return Expr.constant(tree.value)
    if isinstance(tree, Leaf):
        return Expr.atom(tree.atom)
    if isinstance(tree, Add):
        result = Expr()
        for term in tree.terms:
            result = result + normalize(term)
        return result
    if isinstance(tree, Mul):
        result = ONE
        for factor in tree.factors:
            result = result * normalize(factor)
        return result
    if isinstance(tree, Neg):
        return -normalize(tree.operand)
    if isinstance(tree, Pow):
        if tree.exponent < 0:
            raise ValidationError("negative powers are not polynomial")
        _check_exponent(tree.exponent)
        return normalize(tree.base) ** tree.exponent
    raise ValidationError(f"unknown expression node {tree!r}")


class Context:
    """Symbol table: names are unique and kinds immutable."""

    def __init__(self):
        self._symbols: Dict[str, Symbol] = {}
        self._nonzero: set = set()

    def declare(self, name: str, kind: SymbolKind, nonzero: bool = False) -> Symbol:
        if name in self._symbols:
            raise ValidationError(f"'{name}' is already declared")
        symbol = Symbol(name, kind)
        self._symbols[name] = symbol
        if nonzero:
            self._nonzero.add(symbol)
        return symbol

    def symbol(self, name: str) -> Symbol:
        try:
            return self._symbols[name]
        except KeyError:
            raise ValidationError(f"'{name}' is not declared") from None

    def __contains__(self, name: str) -> bool:
        return name in self._symbols

    def of_kind(self, kind: SymbolKind) -> Tuple[Symbol, ...]:
        return tuple(s for s in self._symbols.values() if s.kind == kind)

    @property
    def independents(self) -> Tuple[Symbol, ...]:
        return self.of_kind(SymbolKind.INDEPENDENT)

    @property
    def dependents(self) -> Tuple[Symbol, ...]:
        return self.of_kind(SymbolKind.DEPENDENT)

    @property
    def parameters(self) -> Tuple[Symbol, ...]:
        return self.of_kind(SymbolKind.PARAMETER)

    @property
    def coordinates(self) -> Tuple[Symbol, ...]:
        return self.independents + self.dependents

    def is_nonzero(self, symbol: Symbol) -> bool:
        return symbol in self._nonzero

    def group_parameter(self, name: Optional[str] = None) -> Symbol:
        name = name or config.group_parameter
        if name in self._symbols:
            symbol = self._symbols[name]
            if symbol.kind != SymbolKind.GROUP_PARAMETER:
                raise ValidationError(f"'{name}' is not a group parameter")
            return symbol
        return self.declare(name, SymbolKind.GROUP_PARAMETER)

    def unknown(self, name: str) -> Symbol:
        if name in self._symbols:
            return self._symbols[name]
        return self.declare(name, SymbolKind.ANSATZ_UNKNOWN)
