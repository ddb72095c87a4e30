from fractions import Fraction

import pytest
import sympy

from lsa.config import config
from lsa.core.expr import (
    Add,
    Context,
    ExpAtom,
    Expr,
    Leaf,
    Mul,
    Num,
    Pow,
    Symbol,
    SymbolKind,
    normalize,
)
from lsa.errors import CapacityError, ValidationError

from .conftest import random_expr


def to_sympy(e: Expr):
    total = sympy.Integer(0)
    for monomial, coeff in e.terms.items():
        term = sympy.Rational(coeff.numerator, coeff.denominator)
        for atom, exponent in monomial:
            term *= sympy.Symbol(str(atom)) ** exponent
        total += term
    return sympy.expand(total)


def test_canonical_form_is_order_independent(ctx):
    x, U = ctx.symbol("x"), ctx.symbol("U")
    a = Expr.atom(x) * Expr.atom(U) + Expr.constant(2)
    b = Expr.constant(2) + Expr.atom(U) * Expr.atom(x)
    assert a == b
    assert hash(a) == hash(b)
    assert str(a) == "x*U + 2"


def test_normalize_expands_and_cancels(ctx):
    x, y = Leaf(ctx.symbol("x")), Leaf(ctx.symbol("y"))
    tree = Add((Pow(Add((x, y)), 2), Mul((Num(Fraction(-2)), x, y))))
    e = normalize(tree)
    xe, ye = Expr.atom(ctx.symbol("x")), Expr.atom(ctx.symbol("y"))
    assert e == xe**2 + ye**2


def test_arithmetic_matches_sympy(ctx, rng):
    atoms = [ctx.symbol(n) for n in ("x", "y", "U", "nu")]
    for _ in range(100):
        a = random_expr(rng, atoms)
        b = random_expr(rng, atoms)
        assert to_sympy(a * b) == sympy.expand(to_sympy(a) * to_sympy(b))
        assert to_sympy(a + b) == sympy.expand(to_sympy(a) + to_sympy(b))
        assert to_sympy(a - a).is_zero


def test_partial_matches_sympy(ctx, rng):
    atoms = [ctx.symbol(n) for n in ("x", "y", "U")]
    for _ in range(100):
        e = random_expr(rng, atoms)
        for atom in atoms:
            assert to_sympy(e.partial(atom)) == sympy.expand(
                sympy.diff(to_sympy(e), sympy.Symbol(atom.name))
            )


def test_substitute_is_simultaneous(ctx):
    x, y = ctx.symbol("x"), ctx.symbol("y")
    e = Expr.atom(x) - Expr.atom(y)
    swapped = e.substitute({x: Expr.atom(y), y: Expr.atom(x)})
    assert swapped == -e


def test_substitute_rejects_cycles(ctx):
    x, y = ctx.symbol("x"), ctx.symbol("y")
    with pytest.raises(ValidationError):
        Expr.atom(x).substitute({x: Expr.atom(y) + 1, y: Expr.atom(x) * 2})


def test_exp_atoms_multiply_and_differentiate(ctx):
    eps = ctx.group_parameter()
    e = Expr.exp(1, eps) * Expr.exp(-1, eps)
    assert e == Expr.constant(1)
    grow = Expr.exp(2, eps)
    assert grow.partial(eps) == grow * 2
    assert grow.substitute({eps: Expr()}) == Expr.constant(1)


def test_exp_atom_needs_group_parameter(ctx):
    with pytest.raises(ValidationError):
        ExpAtom(Fraction(1), ctx.symbol("x"))


def test_unit_inverse(ctx):
    eps = ctx.group_parameter()
    unit = Expr.exp(3, eps) * Fraction(2, 5)
    assert unit.is_unit_monomial()
    assert unit * unit.unit_inverse() == Expr.constant(1)
    with pytest.raises(ValidationError):
        (Expr.atom(ctx.symbol("x")) + 1).unit_inverse()


def test_exponent_bound(ctx, monkeypatch):
    monkeypatch.setattr(config, "max_exponent", 4)
    x = Expr.atom(ctx.symbol("x"))
    assert x**4 == x * x * x * x
    with pytest.raises(CapacityError):
        (x + 1) ** 5


def test_evaluate_exact(ctx):
    x, nu = ctx.symbol("x"), ctx.symbol("nu")
    e = Expr.atom(x) ** 2 * Fraction(1, 3) + Expr.atom(nu)
    assert e.evaluate({x: Fraction(3, 2), nu: 1}) == Fraction(7, 4)
    with pytest.raises(ValidationError):
        e.evaluate({x: 1})


def test_collect_splits_focus(ctx):
    U, nu, x = ctx.symbol("U"), ctx.symbol("nu"), ctx.symbol("x")
    e = Expr.atom(U) * Expr.atom(nu) + Expr.atom(U) * Expr.atom(x) + Expr.atom(nu)
    groups = e.collect({U})
    assert groups[((U, 1),)] == Expr.atom(nu) + Expr.atom(x)
    assert groups[()] == Expr.atom(nu)


def test_context_rejects_redeclaration():
    ctx = Context()
    ctx.declare("x", SymbolKind.INDEPENDENT)
    with pytest.raises(ValidationError):
        ctx.declare("x", SymbolKind.DEPENDENT)
    with pytest.raises(ValidationError):
        ctx.symbol("y")


def test_group_parameter_is_declared_once(ctx):
    assert ctx.group_parameter() is ctx.group_parameter()
    assert ctx.group_parameter().kind == SymbolKind.GROUP_PARAMETER
    with pytest.raises(ValidationError):
        ctx.group_parameter("x")


def test_to_json_lists_terms(ctx):
    x = Expr.atom(ctx.symbol("x"))
    payload = (x**2 * Fraction(1, 2) - 3).to_json()
    assert payload == {
        "terms": [
            {"coeff": "1/2", "atoms": ["x^2"]},
            {"coeff": "-3", "atoms": []},
        ]
    }


def test_symbol_order_follows_kind():
    dep = Symbol("A", SymbolKind.DEPENDENT)
    ind = Symbol("z", SymbolKind.INDEPENDENT)
    e = Expr.atom(dep) * Expr.atom(ind)
    assert str(e) == "z*A"


def test_partial_obeys_leibniz(ctx, rng):
    atoms = [ctx.symbol(n) for n in ("x", "y", "U", "V", "nu")]
    for _ in range(100):
        e, f = random_expr(rng, atoms), random_expr(rng, atoms)
        for atom in atoms:
            assert (e * f).partial(atom) == e.partial(atom) * f + e * f.partial(atom)
