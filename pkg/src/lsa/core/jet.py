"""Jet coordinates and total derivatives."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from ..errors import ValidationError
from .expr import (
    JET_RANK,
    Expr,
    ExpAtom,
    Monomial,
    Symbol,
    SymbolKind,
    canonical_monomial,
)


@dataclass(frozen=True)
class MultiIndex:
    """Derivative counts per independent variable, zero entries dropped."""

    counts: Tuple[Tuple[Symbol, int], ...] = ()

    @classmethod
    def of(cls, variables: Iterable[Symbol]) -> "MultiIndex":
        tally: Dict[Symbol, int] = {}
        for var in variables:
            if var.kind != SymbolKind.INDEPENDENT:
                raise ValidationError(
                    f"'{var.name}' is not an independent variable"
                )
            tally[var] = tally.get(var, 0) + 1
        return cls._build(tally)

    @classmethod
    def _build(cls, tally: Mapping[Symbol, int]) -> "MultiIndex":
        counts = tuple(
            sorted(
                ((s, c) for s, c in tally.items() if c),
                key=lambda item: item[0].sort_key,
            )
        )
        return cls(counts)

    @property
    def order(self) -> int:
        return sum(c for _, c in self.counts)

    def count(self, var: Symbol) -> int:
        for s, c in self.counts:
            if s == var:
                return c
        return 0

    def increment(self, var: Symbol) -> "MultiIndex":
        tally = dict(self.counts)
        tally[var] = tally.get(var, 0) + 1
        return MultiIndex._build(tally)

    def variables(self) -> Tuple[Symbol, ...]:
        out: List[Symbol] = []
        for s, c in self.counts:
            out.extend([s] * c)
        return tuple(out)

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        tally = dict(self.counts)
        for s, c in other.counts:
            tally[s] = tally.get(s, 0) + c
        return MultiIndex._build(tally)

    def __bool__(self) -> bool:
        return bool(self.counts)

    def __str__(self) -> str:
        return "".join(s.name for s in self.variables())


@dataclass(frozen=True)
class JetCoordinate:
    dependent: Symbol
    index: MultiIndex

    def __post_init__(self):
        if self.dependent.kind != SymbolKind.DEPENDENT:
            raise ValidationError(f"'{self.dependent.name}' is not a dependent variable")
        if not self.index:
            raise ValidationError("order-0 jets are the dependent variable itself")

    @property
    def order(self) -> int:
        return self.index.order

    @property
    def sort_key(self) -> tuple:
        return (
            JET_RANK,
            self.dependent.name,
            (self.order,) + tuple((s.name, c) for s, c in self.index.counts),
        )

    def __str__(self) -> str:
        names = ",".join(s.name for s in self.index.variables())
        return f"D({self.dependent.name},{names})"


def jet(dependent: Symbol, *variables: Symbol):
    """The atom u_J; with no variables this is the dependent symbol itself."""
    index = MultiIndex.of(variables)
    if not index:
        return dependent
    return JetCoordinate(dependent, index)


def jet_of(atom, index: MultiIndex):
    """Differentiate a dependent symbol or jet coordinate by a multi-index."""
    if isinstance(atom, JetCoordinate):
        return JetCoordinate(atom.dependent, atom.index + index)
    if not index:
        return atom
    return JetCoordinate(atom, index)


def split_jet(atom) -> Tuple[Symbol, MultiIndex]:
    if isinstance(atom, JetCoordinate):
        return atom.dependent, atom.index
    return atom, MultiIndex()


def is_jet_atom(atom) -> bool:
    return isinstance(atom, JetCoordinate)


def is_fiber_atom(atom) -> bool:
    """Dependent variables and their derivatives."""
    return isinstance(atom, JetCoordinate) or (
        isinstance(atom, Symbol) and atom.kind == SymbolKind.DEPENDENT
    )


def jet_order(e: Expr) -> int:
    return max((a.order for a in e.atoms() if isinstance(a, JetCoordinate)), default=0)


def multi_indices(independents: Sequence[Symbol], order: int) -> List[MultiIndex]:
    return [MultiIndex.of(c) for c in combinations_with_replacement(independents, order)]


def jet_coordinates(
    independents: Sequence[Symbol], dependents: Sequence[Symbol], order: int
) -> List[JetCoordinate]:
    """Every jet coordinate of order 1..order, grouped by dependent."""
    out: List[JetCoordinate] = []
    for dep in dependents:
        for k in range(1, order + 1):
            out.extend(JetCoordinate(dep, idx) for idx in multi_indices(independents, k))
    return out


def total_derivative(e: Expr, wrt: Symbol) -> Expr:
    """D_wrt e, differentiating base and jet atoms through the chain rule."""
    if not isinstance(wrt, Symbol) or wrt.kind != SymbolKind.INDEPENDENT:
        raise ValidationError(f"cannot take a total derivative with respect to '{wrt}'")
    step = MultiIndex.of([wrt])
    out: Dict[Monomial, Fraction] = {}
    for monomial, coeff in e.terms.items():
        powers = dict(monomial)
        for atom, exponent in monomial:
            if isinstance(atom, ExpAtom):
                raise ValidationError("exponential atoms have no total derivative")
            if atom == wrt:
                target = None
            elif is_fiber_atom(atom):
                target = jet_of(atom, step)
            else:
                continue
            reduced = dict(powers)
            reduced[atom] = exponent - 1
            if target is not None:
                reduced[target] = reduced.get(target, 0) + 1
            key = canonical_monomial(reduced)
            value = out.get(key, 0) + coeff * exponent
            if value:
                out[key] = value
            else:
                out.pop(key, None)
    return Expr(out)


def total_derivative_multi(e: Expr, index: MultiIndex) -> Expr:
    for var in index.variables():
        e = total_derivative(e, var)
    return e
