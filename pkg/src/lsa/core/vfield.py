"""Infinitesimal generators: characteristics, prolongation, brackets, flows and invariants."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from ..errors import NotSupportedError, ValidationError
from .expr import (
    ONE,
    ZERO,
    Expr,
    ExpAtom,
    Symbol,
    SymbolKind,
    as_expr,
)
from .jet import (
    JetCoordinate,
    MultiIndex,
    is_jet_atom,
    jet_coordinates,
    jet_of,
    multi_indices,
    total_derivative,
)

logger = logging.getLogger(__name__)


class VectorField:
    """sum_i xi_i d/dx_i + sum_a phi_a d/du_a on the total space."""

    __slots__ = ("independents", "dependents", "_coeffs")

    def __init__(
        self,
        independents: Sequence[Symbol],
        dependents: Sequence[Symbol],
        coefficients: Optional[Mapping[Symbol, object]] = None,
    ):
        self.independents = tuple(independents)
        self.dependents = tuple(dependents)
        coords = set(self.independents) | set(self.dependents)
        coeffs: Dict[Symbol, Expr] = {}
        for sym, value in (coefficients or {}).items():
            if sym not in coords:
                raise ValidationError(f"'{sym}' is not a coordinate of this field")
            value = as_expr(value)
            if not value.is_zero:
                coeffs[sym] = value
        self._coeffs = coeffs

    @classmethod
    def from_context(cls, ctx, coefficients: Optional[Mapping[Symbol, object]] = None) -> "VectorField":
        return cls(ctx.independents, ctx.dependents, coefficients)

    @classmethod
    def partial(cls, ctx, coordinate: Symbol) -> "VectorField":
        return cls.from_context(ctx, {coordinate: ONE})

    @property
    def coordinates(self) -> Tuple[Symbol, ...]:
        return self.independents + self.dependents

    def coefficient(self, coordinate: Symbol) -> Expr:
        return self._coeffs.get(coordinate, ZERO)

    @property
    def xi(self) -> Dict[Symbol, Expr]:
        return {s: self.coefficient(s) for s in self.independents}

    @property
    def phi(self) -> Dict[Symbol, Expr]:
        return {s: self.coefficient(s) for s in self.dependents}

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def _like(self, coefficients: Mapping[Symbol, Expr]) -> "VectorField":
        return VectorField(self.independents, self.dependents, coefficients)

    def __add__(self, other: "VectorField") -> "VectorField":
        return self._like(
            {s: self.coefficient(s) + other.coefficient(s) for s in self.coordinates}
        )

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def __neg__(self) -> "VectorField":
        return self._like({s: -c for s, c in self._coeffs.items()})

    def __mul__(self, scalar) -> "VectorField":
        scalar = as_expr(scalar)
        return self._like({s: c * scalar for s, c in self._coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.coordinates == other.coordinates and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.coordinates, frozenset(self._coeffs.items())))

    def substitute(self, bindings: Mapping) -> "VectorField":
        return self._like({s: c.substitute(bindings) for s, c in self._coeffs.items()})

    def validate_point(self) -> None:
        """Point symmetries have coefficients on the base space only."""
        for sym, coeff in self._coeffs.items():
            for atom in coeff.atoms():
                if is_jet_atom(atom) or isinstance(atom, ExpAtom):
                    raise ValidationError(
                        f"coefficient of d/d{sym.name} contains '{atom}'"
                    )

    def act(self, e: Expr) -> Expr:
        """The field as a derivation on functions of the base coordinates."""
        result = ZERO
        for sym, coeff in self._coeffs.items():
            derivative = e.partial(sym)
            if not derivative.is_zero:
                result = result + coeff * derivative
        return result

    def vector(self) -> Dict[tuple, Fraction]:
        """Flatten to {(coordinate name, monomial): coefficient}."""
        out: Dict[tuple, Fraction] = {}
        for sym, coeff in self._coeffs.items():
            for monomial, value in coeff.terms.items():
                out[(sym.name, monomial)] = value
        return out

    def render(self) -> str:
        """Report form, e.g. ``T ∂_T``."""
        parts = []
        for sym in self.coordinates:
            coeff = self._coeffs.get(sym)
            if coeff is None:
                continue
            if coeff == ONE:
                body = f"∂_{sym.name}"
            elif coeff == -ONE:
                body = f"-∂_{sym.name}"
            elif coeff.needs_parentheses():
                body = f"({coeff}) ∂_{sym.name}"
            else:
                body = f"{coeff} ∂_{sym.name}"
            parts.append(body)
        if not parts:
            return "0"
        text = parts[0]
        for part in parts[1:]:
            text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
        return text

    def to_dsl(self) -> str:
        """DSL form, e.g. ``T * d/dT``."""
        parts = []
        for sym in self.coordinates:
            coeff = self._coeffs.get(sym)
            if coeff is None:
                continue
            if coeff == ONE:
                parts.append(f"d/d{sym.name}")
            elif coeff == -ONE:
                parts.append(f"-d/d{sym.name}")
            else:
                text = str(coeff)
                if coeff.needs_parentheses():
                    text = f"({text})"
                parts.append(f"{text} * d/d{sym.name}")
        if not parts:
            return "0"
        text = parts[0]
        for part in parts[1:]:
            text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
        return text

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"VectorField({self.render()})"


def characteristic(v: VectorField) -> Dict[Symbol, Expr]:
    """Q_a = phi_a - sum_i xi_i u_a,i for every dependent variable."""
    out: Dict[Symbol, Expr] = {}
    for dep in v.dependents:
        q = v.coefficient(dep)
        for var in v.independents:
            xi = v.coefficient(var)
            if not xi.is_zero:
                q = q - xi * Expr.atom(jet_of(dep, MultiIndex.of([var])))
        out[dep] = q
    return out


@dataclass(frozen=True)
class ProlongedField:
    base: VectorField
    order: int
    jet_coeffs: Mapping[JetCoordinate, Expr] = field(compare=False)

    def coefficient(self, atom) -> Expr:
        if isinstance(atom, JetCoordinate):
            if atom.order > self.order:
                raise ValidationError(
                    f"'{atom}' exceeds the prolongation order {self.order}"
                )
            try:
                return self.jet_coeffs[atom]
            except KeyError:
                raise ValidationError(f"'{atom}' was not prolonged") from None
        if isinstance(atom, Symbol) and atom in self.base.coordinates:
            return self.base.coefficient(atom)
        return ZERO


def prolong(
    v: VectorField, n: int, only: Optional[Iterable[JetCoordinate]] = None
) -> ProlongedField:
    """phi^J_a = D_J Q_a + sum_i xi_i u_a,J+i for 1 <= |J| <= n.

    ``only`` restricts the computation to the given jet coordinates.
    """
    if n < 1:
        raise ValidationError("prolongation order must be at least 1")
    q = characteristic(v)
    wanted = None if only is None else set(only)
    coeffs: Dict[JetCoordinate, Expr] = {}
    for dep in v.dependents:
        derived: Dict[MultiIndex, Expr] = {MultiIndex(): q[dep]}
        for k in range(1, n + 1):
            for index in multi_indices(v.independents, k):
                atom = JetCoordinate(dep, index)
                if wanted is not None and atom not in wanted:
                    continue
                value = _derived_characteristic(derived, index) + _transport(v, atom)
                coeffs[atom] = value
    return ProlongedField(v, n, coeffs)


def _derived_characteristic(cache: Dict[MultiIndex, Expr], index: MultiIndex) -> Expr:
    if index in cache:
        return cache[index]
    variables = index.variables()
    last = variables[-1]
    parent = MultiIndex.of(variables[:-1])
    value = total_derivative(_derived_characteristic(cache, parent), last)
    cache[index] = value
    return value


def _transport(v: VectorField, atom: JetCoordinate) -> Expr:
    out = ZERO
    for var in v.independents:
        xi = v.coefficient(var)
        if not xi.is_zero:
            out = out + xi * Expr.atom(jet_of(atom, MultiIndex.of([var])))
    return out


def prolong_recursive(v: VectorField, n: int) -> ProlongedField:
    """phi^{J,i} = D_i phi^J - sum_j (D_i xi_j) u_{J,j}; order by order."""
    coeffs: Dict[JetCoordinate, Expr] = {}
    dxi = {
        (i, j): total_derivative(v.coefficient(j), i)
        for i in v.independents
        for j in v.independents
    }
    for dep in v.dependents:
        previous: Dict[object, Expr] = {dep: v.coefficient(dep)}
        for k in range(1, n + 1):
            current: Dict[object, Expr] = {}
            for index in multi_indices(v.independents, k):
                variables = index.variables()
                i = variables[-1]
                parent_atom = jet_of(dep, MultiIndex.of(variables[:-1]))
                value = total_derivative(previous[parent_atom], i)
                for j in v.independents:
                    if not dxi[(i, j)].is_zero:
                        value = value - dxi[(i, j)] * Expr.atom(
                            jet_of(parent_atom, MultiIndex.of([j]))
                        )
                atom = JetCoordinate(dep, index)
                current[atom] = value
                coeffs[atom] = value
            previous = current
    return ProlongedField(v, n, coeffs)


def lie_bracket(v: VectorField, w: VectorField) -> VectorField:
    if v.coordinates != w.coordinates:
        raise ValidationError("fields live on different coordinate sets")
    return v._like({s: v.act(w.coefficient(s)) - w.act(v.coefficient(s)) for s in v.coordinates})


def apply(pv: ProlongedField, e: Expr) -> Expr:
    """The prolonged field as a derivation on jet-space functions."""
    result = ZERO
    for atom in sorted(e.atoms(), key=lambda a: a.sort_key):
        coeff = pv.coefficient(atom)
        if coeff.is_zero:
            continue
        result = result + coeff * e.partial(atom)
    return result


# flows


@dataclass(frozen=True)
class PointMap:
    """Images of the base coordinates as functions of the source point and group parameters."""

    coordinates: Tuple[Symbol, ...]
    images: Tuple[Expr, ...]
    parameters: Tuple[Symbol, ...]

    @classmethod
    def identity(cls, coordinates: Sequence[Symbol], parameters: Sequence[Symbol] = ()) -> "PointMap":
        return cls(tuple(coordinates), tuple(Expr.atom(c) for c in coordinates), tuple(parameters))

    def image(self, coordinate: Symbol) -> Expr:
        return self.images[self.coordinates.index(coordinate)]

    def bindings(self) -> Dict[Symbol, Expr]:
        return dict(zip(self.coordinates, self.images))

    def compose(self, inner: "PointMap") -> "PointMap":
        """self after inner."""
        mapping = inner.bindings()
        params = self.parameters + tuple(p for p in inner.parameters if p not in self.parameters)
        return PointMap(
            self.coordinates,
            tuple(img.substitute(mapping) for img in self.images),
            params,
        )

    def at(self, values: Mapping[Symbol, object]) -> "PointMap":
        """Substitute values for group parameters."""
        bindings = {p: as_expr(v) for p, v in values.items()}
        remaining = tuple(p for p in self.parameters if p not in bindings)
        for value in bindings.values():
            for atom in value.atoms():
                if isinstance(atom, Symbol) and atom.kind == SymbolKind.GROUP_PARAMETER and atom not in remaining:
                    remaining = remaining + (atom,)
        return PointMap(
            self.coordinates,
            tuple(img.substitute(bindings) for img in self.images),
            remaining,
        )

    def is_identity(self) -> bool:
        return all(img == Expr.atom(c) for c, img in zip(self.coordinates, self.images))

    def derivative_at_zero(self, independents: Sequence[Symbol], dependents: Sequence[Symbol]) -> VectorField:
        if len(self.parameters) != 1:
            raise ValidationError("the tangent field needs a one-parameter map")
        (eps,) = self.parameters
        coeffs = {
            c: img.partial(eps).substitute({eps: ZERO})
            for c, img in zip(self.coordinates, self.images)
        }
        return VectorField(independents, dependents, coeffs)

    def render(self) -> str:
        return "(" + ", ".join(str(img) for img in self.images) + ")"

    def __str__(self) -> str:
        return self.render()


def _affine_parts(v: VectorField, coordinate: Symbol) -> Tuple[Fraction, Fraction]:
    """(a, b) with coefficient = a + b*coordinate, both rational."""
    coeff = v.coefficient(coordinate)
    a = Fraction(0)
    b = Fraction(0)
    own = Expr.atom(coordinate).terms
    (own_monomial,) = own
    for monomial, value in coeff.terms.items():
        if not monomial:
            a = value
        elif monomial == own_monomial:
            b = value
        else:
            raise NotSupportedError(
                f"coefficient of d/d{coordinate.name} is '{coeff}'; "
                "only a + b*z with rational a, b in its own coordinate z is supported"
            )
    return a, b


def flow(v: VectorField, parameter: Symbol) -> PointMap:
    """exp(eps v) for decoupled affine fields, solved coordinate by coordinate."""
    v.validate_point()
    images = []
    for z in v.coordinates:
        a, b = _affine_parts(v, z)
        zexpr = Expr.atom(z)
        if b == 0:
            images.append(zexpr + Expr.atom(parameter) * a)
        else:
            growth = Expr.exp(b, parameter)
            images.append(zexpr * growth + (growth - ONE) * (a / b))
    logger.debug("flow of %s computed", v.render())
    return PointMap(v.coordinates, tuple(images), (parameter,))


def general_element(fields: Sequence[VectorField], parameters: Sequence[Symbol]) -> PointMap:
    """exp(eps_n v_n) o ... o exp(eps_1 v_1)."""
    if len(fields) != len(parameters):
        raise ValidationError("one group parameter is needed per field")
    result = None
    for v, eps in zip(fields, parameters):
        step = flow(v, eps)
        result = step if result is None else step.compose(result)
    if result is None:
        raise ValidationError("no fields given")
    return result


@dataclass(frozen=True)
class Invariant:
    """numerator / denominator * exp(exp_rate * exp_coordinate)."""

    numerator: Expr
    denominator: Expr = ONE
    exp_rate: Fraction = Fraction(0)
    exp_coordinate: Optional[Symbol] = None

    def annihilated_by(self, v: VectorField) -> bool:
        n, d = self.numerator, self.denominator
        residual = v.act(n) * d - n * v.act(d)
        if self.exp_coordinate is not None and self.exp_rate:
            residual = residual + v.act(Expr.atom(self.exp_coordinate)) * n * d * self.exp_rate
        return residual.is_zero

    def is_polynomial(self) -> bool:
        return self.denominator == ONE and not self.exp_rate

    def as_expr(self) -> Expr:
        if not self.is_polynomial():
            raise ValidationError(f"invariant '{self}' is not a polynomial")
        return self.numerator

    def __str__(self) -> str:
        text = str(self.numerator)
        if self.denominator != ONE:
            num = f"({text})" if self.numerator.needs_parentheses() else text
            den = str(self.denominator)
            if self.denominator.needs_parentheses() or len(self.denominator.terms) > 1:
                den = f"({den})"
            text = f"{num}/{den}"
        if self.exp_rate:
            rate = self.exp_rate
            name = self.exp_coordinate.name
            if rate == 1:
                arg = name
            elif rate == -1:
                arg = f"-{name}"
            else:
                arg = f"{rate}*{name}"
            base = f"({text})" if self.numerator.needs_parentheses() and self.denominator == ONE else text
            text = f"{base}*exp({arg})"
        return text


def _shifted(z: Symbol, a: Fraction, b: Fraction) -> Expr:
    return Expr.atom(z) + a / b


def invariants(v: VectorField) -> List[Invariant]:
    """A maximal independent set of invariants, in coordinate order."""
    v.validate_point()
    parts = {z: _affine_parts(v, z) for z in v.coordinates}
    active = [z for z in v.coordinates if parts[z] != (0, 0)]
    if not active:
        return [Invariant(Expr.atom(z)) for z in v.coordinates]
    translations = [z for z in active if parts[z][1] == 0]
    out: List[Invariant] = []
    if translations:
        t0 = translations[0]
        a_t0 = parts[t0][0]
        for z in v.coordinates:
            if z == t0:
                continue
            a, b = parts[z]
            if (a, b) == (0, 0):
                out.append(Invariant(Expr.atom(z)))
            elif b == 0:
                out.append(Invariant(Expr.atom(t0) * a - Expr.atom(z) * a_t0))
            else:
                out.append(Invariant(_shifted(z, a, b), ONE, -b / a_t0, t0))
        return out
    s0 = active[0]
    a0, b0 = parts[s0]
    base = _shifted(s0, a0, b0)
    for z in v.coordinates:
        if z == s0:
            continue
        a, b = parts[z]
        if (a, b) == (0, 0):
            out.append(Invariant(Expr.atom(z)))
            continue
        ratio = b / b0
        p, q = ratio.numerator, ratio.denominator
        if p > 0:
            out.append(Invariant(_shifted(z, a, b) ** q, base**p))
        else:
            out.append(Invariant(_shifted(z, a, b) ** q * base ** (-p)))
    return out


# transformed solutions


@dataclass(frozen=True)
class SolutionComponent:
    """u = scale * function(arguments) + shift."""

    function: str
    arguments: Tuple[Expr, ...]
    scale: Expr = ONE
    shift: Expr = ZERO

    def render(self) -> str:
        call = f"{self.function}({', '.join(str(a) for a in self.arguments)})"
        if self.scale == -ONE:
            text = f"-{call}"
        elif self.scale != ONE:
            scale = str(self.scale)
            if self.scale.needs_parentheses():
                scale = f"({scale})"
            text = f"{scale}*{call}"
        else:
            text = call
        if not self.shift.is_zero:
            shift = str(self.shift)
            if shift.startswith("-"):
                text += f" - {shift[1:]}" if not self.shift.needs_parentheses() else f" + ({shift})"
            else:
                text += f" + {shift}"
        return text


DEFAULT_FUNCTION_NAMES = ("f", "g", "h", "r")


@dataclass(frozen=True)
class SolutionForm:
    dependents: Tuple[Symbol, ...]
    components: Tuple[SolutionComponent, ...]

    @classmethod
    def generic(
        cls,
        independents: Sequence[Symbol],
        dependents: Sequence[Symbol],
        names: Optional[Sequence[str]] = None,
    ) -> "SolutionForm":
        names = list(names or DEFAULT_FUNCTION_NAMES)
        while len(names) < len(dependents):
            names.append(f"f{len(names) + 1}")
        args = tuple(Expr.atom(x) for x in independents)
        return cls(
            tuple(dependents),
            tuple(SolutionComponent(names[i], args) for i in range(len(dependents))),
        )

    def component(self, dependent: Symbol) -> SolutionComponent:
        return self.components[self.dependents.index(dependent)]

    def render(self, suffix: str = "") -> List[str]:
        return [
            f"{dep.name}{suffix} = {comp.render()}"
            for dep, comp in zip(self.dependents, self.components)
        ]


def transform_solution(g: PointMap, form: SolutionForm) -> SolutionForm:
    """u_1(x) = W^-1(u(X(x))) for g = (X, W) acting on the graph of u."""
    mapping = g.bindings()
    dependents = set(form.dependents)
    independents = [c for c in g.coordinates if c not in dependents]
    for x in independents:
        if any(a in dependents for a in mapping[x].atoms()):
            raise NotSupportedError(
                f"image of '{x.name}' depends on dependent variables"
            )
    base_bindings = {x: mapping[x] for x in independents}
    components = []
    for dep, comp in zip(form.dependents, form.components):
        image = mapping[dep]
        collected = image.collect({dep})
        allowed = set(collected) <= {(), ((dep, 1),)}
        scale = collected.get(((dep, 1),), ZERO)
        shift = collected.get((), ZERO)
        if not allowed or not scale.is_unit_monomial() or any(
            a in g.coordinates for a in shift.atoms()
        ):
            raise NotSupportedError(
                f"image of '{dep.name}' is not affine in '{dep.name}' alone"
            )
        inverse = scale.unit_inverse()
        components.append(
            SolutionComponent(
                comp.function,
                tuple(arg.substitute(base_bindings) for arg in comp.arguments),
                comp.scale * inverse,
                (comp.shift - shift) * inverse,
            )
        )
    return SolutionForm(form.dependents, tuple(components))
