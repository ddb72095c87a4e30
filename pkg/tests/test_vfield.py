from fractions import Fraction

import pytest

from lsa.core.expr import ONE, Context, Expr, SymbolKind
from lsa.core.jet import jet
from lsa.core.vfield import (
    Invariant,
    SolutionForm,
    VectorField,
    apply,
    characteristic,
    flow,
    general_element,
    invariants,
    lie_bracket,
    prolong,
    prolong_recursive,
    transform_solution,
)
from lsa.errors import NotSupportedError, ValidationError

from .conftest import random_expr


def field(ctx, **coeffs):
    return VectorField.from_context(ctx, {ctx.symbol(k): v for k, v in coeffs.items()})


def atom(ctx, name):
    return Expr.atom(ctx.symbol(name))


def test_rendering(ctx):
    v = field(ctx, T=atom(ctx, "T"))
    assert v.render() == "T ∂_T"
    assert v.to_dsl() == "T * d/dT"
    w = field(ctx, x=1, y=-1)
    assert w.render() == "∂_x - ∂_y"
    assert w.to_dsl() == "d/dx - d/dy"
    assert VectorField.from_context(ctx).render() == "0"


def test_linear_combinations(ctx):
    dx = VectorField.partial(ctx, ctx.symbol("x"))
    dy = VectorField.partial(ctx, ctx.symbol("y"))
    v = dx * 2 - dy
    assert v.coefficient(ctx.symbol("x")) == Expr.constant(2)
    assert v.coefficient(ctx.symbol("y")) == Expr.constant(-1)
    assert (v - v).is_zero


def test_coefficients_must_be_coordinates(ctx):
    with pytest.raises(ValidationError):
        field(ctx, nu=1)


def test_point_fields_reject_jets(ctx):
    U, x = ctx.symbol("U"), ctx.symbol("x")
    v = VectorField.from_context(ctx, {U: Expr.atom(jet(U, x))})
    with pytest.raises(ValidationError):
        v.validate_point()


def test_bracket_of_translation_and_scaling(ctx):
    d_t = field(ctx, T=1)
    t_d_t = field(ctx, T=atom(ctx, "T"))
    assert lie_bracket(d_t, t_d_t) == d_t
    assert lie_bracket(t_d_t, d_t) == -d_t
    assert lie_bracket(d_t, d_t).is_zero


def test_scaling_prolongs_to_scaling(ctx):
    T, y = ctx.symbol("T"), ctx.symbol("y")
    pv = prolong(field(ctx, T=Expr.atom(T)), 2)
    assert pv.coefficient(jet(T, y, y)) == Expr.atom(jet(T, y, y))


def test_prolongation_formulas_agree(ctx, rng):
    atoms = [ctx.symbol(n) for n in ("x", "y", "U", "V")]
    for _ in range(100):
        v = field(
            ctx,
            x=random_expr(rng, atoms, terms=2, degree=2),
            y=random_expr(rng, atoms, terms=2, degree=2),
            U=random_expr(rng, atoms, terms=2, degree=2),
        )
        assert dict(prolong(v, 2).jet_coeffs) == dict(prolong_recursive(v, 2).jet_coeffs)


def test_prolongation_order_is_checked(ctx):
    T, y = ctx.symbol("T"), ctx.symbol("y")
    pv = prolong(field(ctx, T=1), 1)
    with pytest.raises(ValidationError):
        pv.coefficient(jet(T, y, y))


def test_scaling_leaves_linear_equation_invariant(ctx):
    T, U, V, x, y = (ctx.symbol(n) for n in ("T", "U", "V", "x", "y"))
    alpha = ctx.symbol("alpha")
    e = (
        Expr.atom(U) * Expr.atom(jet(T, x))
        + Expr.atom(V) * Expr.atom(jet(T, y))
        - Expr.atom(alpha) * Expr.atom(jet(T, y, y))
    )
    assert apply(prolong(field(ctx, T=Expr.atom(T)), 2), e) == e


def test_translation_flow(ctx):
    eps = ctx.group_parameter()
    g = flow(field(ctx, x=1), eps)
    assert g.render() == "(x + eps, y, U, V, P, T)"
    assert g.derivative_at_zero(ctx.independents, ctx.dependents) == field(ctx, x=1)


def test_scaling_flow(ctx):
    eps = ctx.group_parameter()
    T = ctx.symbol("T")
    g = flow(field(ctx, T=Expr.atom(T)), eps)
    assert g.image(T) == Expr.atom(T) * Expr.exp(1, eps)
    assert g.at({eps: 0}).is_identity()


def test_affine_flow_in_one_coordinate(ctx):
    eps = ctx.group_parameter()
    T = ctx.symbol("T")
    g = flow(field(ctx, T=Expr.atom(T) + 1), eps)
    grow = Expr.exp(1, eps)
    assert g.image(T) == Expr.atom(T) * grow + grow - 1


def test_flow_rejects_coupled_fields(ctx):
    eps = ctx.group_parameter()
    with pytest.raises(NotSupportedError):
        flow(field(ctx, x=atom(ctx, "y")), eps)


def test_general_element_composes(ctx):
    e1 = ctx.group_parameter("e1")
    e2 = ctx.group_parameter("e2")
    T = ctx.symbol("T")
    g = general_element([field(ctx, T=1), field(ctx, T=Expr.atom(T))], [e1, e2])
    assert g.image(T) == (Expr.atom(T) + Expr.atom(e1)) * Expr.exp(1, e2)


def test_invariants_of_diagonal_translation(ctx):
    found = invariants(field(ctx, x=1, y=1))
    assert [str(i) for i in found] == ["x - y", "U", "V", "P", "T"]
    assert all(i.annihilated_by(field(ctx, x=1, y=1)) for i in found)


def test_invariants_of_mixed_translation_and_scaling(ctx):
    v = field(ctx, x=1, T=atom(ctx, "T"))
    found = invariants(v)
    assert "T*exp(-x)" in [str(i) for i in found]
    assert all(i.annihilated_by(v) for i in found)
    assert not all(i.is_polynomial() for i in found)


def test_invariants_of_two_scalings(ctx):
    v = field(ctx, U=atom(ctx, "U"), T=atom(ctx, "T") * 2)
    found = invariants(v)
    assert all(i.annihilated_by(v) for i in found)
    assert Invariant(atom(ctx, "T"), atom(ctx, "U") ** 2) in found


def test_transformed_solution_of_scaling(ctx):
    eps = ctx.group_parameter()
    g = flow(field(ctx, T=atom(ctx, "T")), eps)
    form = transform_solution(g, SolutionForm.generic(ctx.independents, ctx.dependents))
    assert form.render("1")[3] == "T1 = exp(-eps)*r(x, y)"
    assert form.render("1")[0] == "U1 = f(x, y)"


def test_transformed_solution_of_translation(ctx):
    eps = ctx.group_parameter()
    g = flow(field(ctx, x=1), eps)
    form = transform_solution(g, SolutionForm.generic(ctx.independents, ctx.dependents))
    assert form.render("1")[0] == "U1 = f(x + eps, y)"


def test_transformed_solution_shift(ctx):
    eps = ctx.group_parameter()
    g = flow(field(ctx, T=1), eps)
    component = transform_solution(
        g, SolutionForm.generic(ctx.independents, ctx.dependents)
    ).components[3]
    assert component.shift == -Expr.atom(eps)
    assert component.scale == ONE
    assert component.render() == "r(x, y) - eps"


def test_transformed_solution_needs_base_images(ctx):
    eps = ctx.group_parameter()
    g = flow(field(ctx, x=atom(ctx, "x") * Fraction(1, 2)), eps)
    form = transform_solution(g, SolutionForm.generic(ctx.independents, ctx.dependents))
    assert form.components[0].arguments[0] == atom(ctx, "x") * Expr.exp(Fraction(1, 2), eps)


def test_characteristic(ctx):
    U, T, x = ctx.symbol("U"), ctx.symbol("T"), ctx.symbol("x")
    q = characteristic(field(ctx, x=1, T=atom(ctx, "T")))
    assert q[U] == -Expr.atom(jet(U, x))
    assert q[T] == Expr.atom(T) - Expr.atom(jet(T, x))


def random_field(ctx, rng, names=("x", "y", "U", "V"), terms=2, degree=2):
    atoms = [ctx.symbol(n) for n in names]
    return field(
        ctx,
        **{name: random_expr(rng, atoms, terms=terms, degree=degree) for name in ("x", "y", "U")},
    )


def test_bracket_is_antisymmetric_and_satisfies_jacobi(ctx, rng):
    for _ in range(100):
        u, v, w = (random_field(ctx, rng) for _ in range(3))
        assert lie_bracket(u, v) == -lie_bracket(v, u)
        jacobi = (
            lie_bracket(lie_bracket(u, v), w)
            + lie_bracket(lie_bracket(v, w), u)
            + lie_bracket(lie_bracket(w, u), v)
        )
        assert jacobi.is_zero


def test_prolongation_is_linear(ctx, rng):
    for _ in range(100):
        v, w = random_field(ctx, rng), random_field(ctx, rng)
        a = Fraction(rng.choice([-3, -1, 1, 2, 5]), rng.randint(1, 4))
        combined = prolong(v * a + w, 2)
        pv, pw = prolong(v, 2), prolong(w, 2)
        for atom, coeff in combined.jet_coeffs.items():
            assert coeff == pv.coefficient(atom) * a + pw.coefficient(atom)


def small_context() -> Context:
    ctx = Context()
    ctx.declare("x", SymbolKind.INDEPENDENT)
    ctx.declare("y", SymbolKind.INDEPENDENT)
    ctx.declare("U", SymbolKind.DEPENDENT)
    return ctx


def test_prolongation_respects_brackets(rng):
    ctx = small_context()
    for _ in range(100):
        v = random_field(ctx, rng, names=("x", "y", "U"), terms=2, degree=2)
        w = random_field(ctx, rng, names=("x", "y", "U"), terms=2, degree=2)
        pv, pw = prolong(v, 2), prolong(w, 2)
        bracket = prolong(lie_bracket(v, w), 2)
        for atom, coeff in bracket.jet_coeffs.items():
            commutator = apply(pv, pw.coefficient(atom)) - apply(pw, pv.coefficient(atom))
            assert coeff == commutator, atom
