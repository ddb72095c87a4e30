"""Determining equations for point symmetries and their polynomial-ansatz solution."""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from ..config import config
from ..errors import CapacityError, InvariantViolation, ValidationError
from .expr import ONE, ZERO, Context, Expr, Monomial, Symbol, SymbolKind
from .jet import (
    JetCoordinate,
    MultiIndex,
    is_jet_atom,
    jet_coordinates,
    jet_of,
    total_derivative,
)
from .linalg import nullspace, rank, rref
from .vfield import VectorField, apply, prolong

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolvedForm:
    """leading = numerator / denominator on solutions of the system."""

    leading: JetCoordinate
    numerator: Expr
    denominator: Expr
    equation: int
    derived: bool = False

    def render(self) -> str:
        rhs = str(self.numerator)
        if self.denominator != ONE:
            if self.numerator.needs_parentheses():
                rhs = f"({rhs})"
            den = str(self.denominator)
            if self.denominator.needs_parentheses() or "*" in den:
                den = f"({den})"
            rhs = f"{rhs}/{den}"
        return f"{self.leading} -> {rhs}"


def _eliminate(e: Expr, rule: SolvedForm, degree: Optional[int] = None) -> Expr:
    """Replace rule.leading in e, multiplying through by denominator**degree."""
    k = e.degree(rule.leading)
    target = k if degree is None else degree
    if target < k:
        raise InvariantViolation(f"clearing degree {target} is below {k} for {rule.leading}")
    if k == 0:
        return e * rule.denominator**target if target else e
    out = ZERO
    for key, coeff in e.collect({rule.leading}).items():
        j = key[0][1] if key else 0
        out = out + coeff * rule.numerator**j * rule.denominator ** (target - j)
    return out


@dataclass(frozen=True)
class PDESystem:
    ctx: Context
    equations: Tuple[Expr, ...]
    rules: Tuple[SolvedForm, ...]
    prolong_order: int = 2

    @property
    def solved_forms(self) -> Dict[JetCoordinate, SolvedForm]:
        return {r.leading: r for r in self.rules}

    @property
    def leading_atoms(self) -> Tuple[JetCoordinate, ...]:
        return tuple(r.leading for r in self.rules)

    def primary_rules(self) -> List[SolvedForm]:
        return [r for r in self.rules if not r.derived]

    def reduce(
        self, e: Expr, clearing: Optional[Dict[JetCoordinate, int]] = None
    ) -> Tuple[Expr, Dict[JetCoordinate, int]]:
        """e times a nonzero parameter monomial, with every leading atom replaced."""
        degrees: Dict[JetCoordinate, int] = {}
        for rule in self.rules:
            k = e.degree(rule.leading)
            target = k if clearing is None else clearing.get(rule.leading, k)
            degrees[rule.leading] = target
            if target:
                e = _eliminate(e, rule, target)
        return e, degrees

    def is_zero_mod(self, e: Expr) -> bool:
        return self.reduce(e)[0].is_zero


def _leading_key(ctx: Context, atom: JetCoordinate) -> tuple:
    deps = ctx.dependents
    return (
        -atom.order,
        deps.index(atom.dependent),
        tuple(-atom.index.count(x) for x in ctx.independents),
    )


def _admissible_coefficient(ctx: Context, e: Expr, atom: JetCoordinate) -> Optional[Expr]:
    if e.degree(atom) != 1:
        return None
    parts = e.collect({atom})
    coeff = parts.get(((atom, 1),))
    if coeff is None or len(coeff.terms) != 1:
        return None
    ((monomial, _),) = coeff.terms.items()
    for a, _ in monomial:
        if not (isinstance(a, Symbol) and a.kind == SymbolKind.PARAMETER and ctx.is_nonzero(a)):
            return None
    return coeff


def solved_forms(
    ctx: Context,
    equations: Sequence[Expr],
    leading: Optional[Sequence[Optional[JetCoordinate]]] = None,
    prolong_order: Optional[int] = None,
) -> PDESystem:
    """Solve each equation for a leading derivative and close the rules under D_x."""
    order = config.prolong_order if prolong_order is None else prolong_order
    leading = list(leading or [None] * len(equations))
    rules: List[SolvedForm] = []

    def current() -> PDESystem:
        return PDESystem(ctx, tuple(equations), tuple(rules), order)

    def add(rule: SolvedForm) -> None:
        for idx, old in enumerate(rules):
            k = old.numerator.degree(rule.leading)
            if k:
                rules[idx] = replace(
                    old,
                    numerator=_eliminate(old.numerator, rule),
                    denominator=old.denominator * rule.denominator**k,
                )
        rules.append(rule)

    def clearing_factor(degrees: Dict[JetCoordinate, int]) -> Expr:
        factor = ONE
        for rule in rules:
            k = degrees.get(rule.leading, 0)
            if k:
                factor = factor * rule.denominator**k
        return factor

    for index, equation in enumerate(equations):
        reduced, _ = current().reduce(equation)
        label = f"equation {index + 1}"
        if reduced.is_zero:
            raise ValidationError(f"{label} vanishes modulo the previous equations")
        candidates = sorted(
            (a for a in reduced.atoms() if is_jet_atom(a)),
            key=lambda a: _leading_key(ctx, a),
        )
        chosen = leading[index] if index < len(leading) else None
        if chosen is not None:
            if _admissible_coefficient(ctx, reduced, chosen) is None:
                raise ValidationError(
                    f"{label}: '{chosen}' cannot be its leading derivative; "
                    "it must occur linearly with a nonzero parameter-monomial coefficient"
                )
        else:
            chosen = next(
                (a for a in candidates if _admissible_coefficient(ctx, reduced, a) is not None),
                None,
            )
            if chosen is None:
                raise ValidationError(
                    f"{label} has no derivative with a nonzero parameter-monomial coefficient"
                )
        coeff = _admissible_coefficient(ctx, reduced, chosen)
        rest = reduced - coeff * Expr.atom(chosen)
        (sign,) = coeff.terms.values()
        if sign < 0:
            rule = SolvedForm(chosen, rest, -coeff, index)
        else:
            rule = SolvedForm(chosen, -rest, coeff, index)
        add(rule)
        logger.debug("%s solved for %s", label, chosen)

        worklist = [chosen]
        while worklist:
            atom = worklist.pop(0)
            base = next(r for r in rules if r.leading == atom)
            if base.leading.order >= order:
                continue
            for var in ctx.independents:
                target = jet_of(base.leading, MultiIndex.of([var]))
                if any(r.leading == target for r in rules):
                    continue
                numerator, degrees = current().reduce(total_derivative(base.numerator, var))
                if numerator.degree(target):
                    raise InvariantViolation(f"derived rule for {target} is implicit")
                add(
                    SolvedForm(
                        target,
                        numerator,
                        base.denominator * clearing_factor(degrees),
                        base.equation,
                        derived=True,
                    )
                )
                worklist.append(target)

    leading_set = {r.leading for r in rules}
    for rule in rules:
        stray = leading_set & rule.numerator.atoms()
        if stray:
            raise InvariantViolation(f"solved form for {rule.leading} still contains {sorted(map(str, stray))}")
    return current()


# ansatz and determining equations


@dataclass(frozen=True)
class Ansatz:
    """Complete polynomial ansatz, one unknown and one column field per coefficient monomial."""

    unknowns: Tuple[Symbol, ...]
    columns: Tuple[VectorField, ...]
    degree: int

    @property
    def field(self) -> VectorField:
        total = None
        for unknown, column in zip(self.unknowns, self.columns):
            term = column * Expr.atom(unknown)
            total = term if total is None else total + term
        return total

    def field_from(self, values: Sequence[Fraction]) -> VectorField:
        total = self.columns[0] * 0
        for value, column in zip(values, self.columns):
            if value:
                total = total + column * value
        return total


def ansatz_size(ctx: Context, degree: int) -> int:
    n = len(ctx.coordinates)
    return n * comb(n + degree, degree)


def build_ansatz(ctx: Context, degree: int) -> Ansatz:
    if degree < 0:
        raise ValidationError("ansatz degree must be nonnegative")
    coords = ctx.coordinates
    monomials: List[Expr] = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(coords, d):
            term = ONE
            for c in combo:
                term = term * Expr.atom(c)
            monomials.append(term)
    unknowns = []
    columns = []
    for slot in coords:
        for mono in monomials:
            unknowns.append(Symbol(f"c[{slot.name}:{mono}]", SymbolKind.ANSATZ_UNKNOWN))
            columns.append(VectorField.from_context(ctx, {slot: mono}))
    return Ansatz(tuple(unknowns), tuple(columns), degree)


def _normalized(e: Expr) -> Expr:
    """Scale so the first sorted term has coefficient 1."""
    lead = e.sorted_terms()[0][1]
    return e * (1 / lead) if lead != 1 else e


def _is_unknown(atom) -> bool:
    return isinstance(atom, Symbol) and atom.kind == SymbolKind.ANSATZ_UNKNOWN


@dataclass(frozen=True)
class DeterminingSystem:
    unknowns: Tuple[Symbol, ...]
    equations: Tuple[Expr, ...]
    sources: Tuple[Tuple[int, Monomial], ...]

    def rows(self) -> List[Dict[int, Fraction]]:
        """Split each equation over base and parameter monomials into linear rows."""
        position = {u: i for i, u in enumerate(self.unknowns)}
        out: List[Dict[int, Fraction]] = []
        for equation in self.equations:
            parts = equation.collect(lambda a: not _is_unknown(a))
            for _, linear in sorted(parts.items(), key=lambda kv: [a.sort_key + (e,) for a, e in kv[0]]):
                row: Dict[int, Fraction] = {}
                for monomial, coeff in linear.terms.items():
                    if len(monomial) != 1 or monomial[0][1] != 1 or monomial[0][0] not in position:
                        raise InvariantViolation(
                            f"determining equation is not linear homogeneous: {equation}"
                        )
                    row[position[monomial[0][0]]] = coeff
                out.append(row)
        return out


def invariance_condition(system: PDESystem, ansatz: Ansatz) -> DeterminingSystem:
    """Collect the reduced invariance condition of every equation over jet monomials."""
    seen: Dict[Expr, Tuple[int, Monomial]] = {}
    for index, equation in enumerate(system.equations):
        needed = [a for a in equation.atoms() if is_jet_atom(a)]
        raw = [
            apply(prolong(column, system.prolong_order, only=needed), equation)
            for column in ansatz.columns
        ]
        clearing = {
            rule.leading: max((r.degree(rule.leading) for r in raw), default=0)
            for rule in system.rules
        }
        groups: Dict[Monomial, Expr] = {}
        for unknown, residual in zip(ansatz.unknowns, raw):
            if residual.is_zero:
                continue
            reduced, _ = system.reduce(residual, clearing)
            marker = Expr.atom(unknown)
            for jet_monomial, coeff in reduced.collect(is_jet_atom).items():
                groups[jet_monomial] = groups.get(jet_monomial, ZERO) + coeff * marker
        for jet_monomial in sorted(groups, key=lambda m: [a.sort_key + (e,) for a, e in m]):
            equation_expr = groups[jet_monomial]
            if equation_expr.is_zero:
                continue
            key = _normalized(equation_expr)
            if key not in seen:
                seen[key] = (index, jet_monomial)
        logger.debug("equation %d: %d jet monomials", index + 1, len(groups))
    return DeterminingSystem(
        ansatz.unknowns,
        tuple(seen),
        tuple(seen.values()),
    )


@dataclass(frozen=True)
class SymmetryBasis:
    fields: Tuple[VectorField, ...]
    ansatz_degree: int
    equation_count: int = 0
    unknown_count: int = 0
    row_count: int = 0

    @property
    def dimension(self) -> int:
        return len(self.fields)


def solve_determining(system: PDESystem, degree: Optional[int] = None) -> SymmetryBasis:
    degree = config.ansatz_degree if degree is None else degree
    size = ansatz_size(system.ctx, degree)
    if size > config.max_unknowns:
        raise CapacityError(
            f"degree {degree} needs {size} unknowns, above the limit {config.max_unknowns}"
        )
    ansatz = build_ansatz(system.ctx, degree)
    determining = invariance_condition(system, ansatz)
    rows = determining.rows()
    null = nullspace(rows, len(ansatz.unknowns))
    echelon = rref(null)[0] if null else []
    fields = tuple(ansatz.field_from(vec) for vec in echelon)
    logger.info(
        "degree %d: %d determining equations, %d unknowns, null space of dimension %d",
        degree,
        len(determining.equations),
        len(ansatz.unknowns),
        len(fields),
    )
    return SymmetryBasis(
        fields,
        degree,
        equation_count=len(determining.equations),
        unknown_count=len(ansatz.unknowns),
        row_count=len(rows),
    )


# verification


@dataclass(frozen=True)
class Verification:
    holds: bool
    residuals: Tuple[Expr, ...]


def verify_symmetry(system: PDESystem, v: VectorField) -> Verification:
    v.validate_point()
    pv = prolong(v, system.prolong_order)
    residuals = tuple(system.reduce(apply(pv, eq))[0] for eq in system.equations)
    return Verification(all(r.is_zero for r in residuals), residuals)


def _sample(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        value = Fraction(rng.randint(-20, 20), rng.randint(1, 7))
        if value or not nonzero:
            return value


def numeric_point_oracle(
    system: PDESystem, v: VectorField, trials: int, seed: Optional[int] = None
) -> bool:
    """Evaluate the invariance condition at random points of the solution manifold."""
    if trials < 1:
        raise ValidationError("the oracle needs at least one trial")
    rng = random.Random(config.oracle_seed if seed is None else seed)
    ctx = system.ctx
    pv = prolong(v, system.prolong_order)
    conditions = [apply(pv, eq) for eq in system.equations]
    leading = set(system.leading_atoms)
    free_jets = [
        j
        for j in jet_coordinates(ctx.independents, ctx.dependents, system.prolong_order)
        if j not in leading
    ]
    for _ in range(trials):
        values: Dict[object, Fraction] = {}
        for sym in ctx.coordinates:
            values[sym] = _sample(rng)
        for sym in ctx.parameters:
            values[sym] = _sample(rng, nonzero=True)
        for j in free_jets:
            values[j] = _sample(rng)
        for rule in system.rules:
            values[rule.leading] = rule.numerator.evaluate(values) / rule.denominator.evaluate(values)
        if any(cond.evaluate(values) != 0 for cond in conditions):
            return False
    return True


# sample equations and spans


@dataclass(frozen=True)
class SampleTerm:
    coefficient: Fraction
    factors: Tuple[str, ...]
    target: str
    derivatives: Tuple[str, ...] = ()


@dataclass(frozen=True)
class SampleEquation:
    text: str
    terms: Tuple[SampleTerm, ...]
    note: str = ""


def _target_coefficient(ctx: Context, v: VectorField, target: str) -> Expr:
    if target.startswith("xi"):
        return v.coefficient(ctx.independents[int(target[2:]) - 1])
    if target.startswith("eta"):
        return v.coefficient(ctx.dependents[int(target[3:]) - 1])
    raise ValidationError(f"unknown infinitesimal '{target}'")


def evaluate_sample(ctx: Context, sample: SampleEquation, v: VectorField) -> Expr:
    """Left side of a printed determining equation evaluated on a concrete field."""
    total = ZERO
    for term in sample.terms:
        value = _target_coefficient(ctx, v, term.target)
        for name in term.derivatives:
            value = value.partial(ctx.symbol(name))
        factor = Expr.constant(term.coefficient)
        for name in term.factors:
            factor = factor * Expr.atom(ctx.symbol(name))
        total = total + factor * value
    return total


def _dense(fields: Sequence[VectorField]) -> List[List[Fraction]]:
    vectors = [f.vector() for f in fields]
    keys = sorted(
        {k for vec in vectors for k in vec},
        key=lambda k: (k[0], [a.sort_key + (e,) for a, e in k[1]]),
    )
    return [[vec.get(k, Fraction(0)) for k in keys] for vec in vectors]


def span_rank(fields: Sequence[VectorField]) -> int:
    if not fields:
        return 0
    return rank(_dense(fields))


def span_contains(big: Sequence[VectorField], small: Sequence[VectorField]) -> bool:
    return span_rank(list(big) + list(small)) == span_rank(big)


def same_span(a: Sequence[VectorField], b: Sequence[VectorField]) -> bool:
    return span_contains(a, b) and span_contains(b, a)
