import pytest

from lsa.core.expr import Expr
from lsa.core.jet import (
    JetCoordinate,
    MultiIndex,
    jet,
    jet_coordinates,
    jet_order,
    multi_indices,
    total_derivative,
    total_derivative_multi,
)
from lsa.errors import ValidationError

from .conftest import random_expr


def test_multi_index_is_unordered(ctx):
    x, y = ctx.symbol("x"), ctx.symbol("y")
    assert MultiIndex.of([x, y]) == MultiIndex.of([y, x])
    assert MultiIndex.of([x, y, x]).order == 3
    assert MultiIndex.of([x, y, x]).count(x) == 2


def test_jet_rendering(ctx):
    U, x, y = ctx.symbol("U"), ctx.symbol("x"), ctx.symbol("y")
    assert str(jet(U, y, x)) == "D(U,x,y)"
    assert jet(U) is U


def test_jet_rejects_wrong_kinds(ctx):
    U, V, x = ctx.symbol("U"), ctx.symbol("V"), ctx.symbol("x")
    with pytest.raises(ValidationError):
        jet(U, V)
    with pytest.raises(ValidationError):
        JetCoordinate(x, MultiIndex.of([x]))


def test_total_derivative_chain_rule(ctx):
    U, x = ctx.symbol("U"), ctx.symbol("x")
    e = Expr.atom(U) * Expr.atom(x)
    assert total_derivative(e, x) == Expr.atom(jet(U, x)) * Expr.atom(x) + Expr.atom(U)


def test_total_derivative_skips_parameters(ctx):
    nu, x = ctx.symbol("nu"), ctx.symbol("x")
    assert total_derivative(Expr.atom(nu), x).is_zero


def test_total_derivative_needs_independent(ctx):
    with pytest.raises(ValidationError):
        total_derivative(Expr.atom(ctx.symbol("U")), ctx.symbol("U"))


def test_total_derivatives_commute(ctx, rng):
    x, y = ctx.symbol("x"), ctx.symbol("y")
    U, V = ctx.symbol("U"), ctx.symbol("V")
    atoms = [x, y, U, V, jet(U, x), jet(V, y), jet(U, x, y), ctx.symbol("nu")]
    for _ in range(100):
        e = random_expr(rng, atoms)
        assert total_derivative(total_derivative(e, x), y) == total_derivative(
            total_derivative(e, y), x
        )


def test_total_derivative_multi(ctx):
    U, x, y = ctx.symbol("U"), ctx.symbol("x"), ctx.symbol("y")
    e = Expr.atom(U)
    assert total_derivative_multi(e, MultiIndex.of([x, y, y])) == Expr.atom(jet(U, x, y, y))


def test_jet_coordinates_enumeration(ctx):
    coords = jet_coordinates(ctx.independents, ctx.dependents, 2)
    assert len(coords) == 4 * (2 + 3)
    assert len(set(coords)) == len(coords)
    assert len(multi_indices(ctx.independents, 3)) == 4


def test_jet_order(ctx):
    U, x, y = ctx.symbol("U"), ctx.symbol("x"), ctx.symbol("y")
    e = Expr.atom(jet(U, x)) + Expr.atom(jet(U, y, y)) * Expr.atom(U)
    assert jet_order(e) == 2
    assert jet_order(Expr.atom(U)) == 0


def test_total_derivative_obeys_leibniz(ctx, rng):
    x, y = ctx.symbol("x"), ctx.symbol("y")
    U, V = ctx.symbol("U"), ctx.symbol("V")
    atoms = [x, y, U, V, jet(U, x), jet(V, x, y), ctx.symbol("k")]
    for _ in range(100):
        e, f = random_expr(rng, atoms), random_expr(rng, atoms)
        for var in (x, y):
            assert total_derivative(e * f, var) == (
                total_derivative(e, var) * f + e * total_derivative(f, var)
            )
