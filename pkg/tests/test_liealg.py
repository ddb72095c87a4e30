from fractions import Fraction
from itertools import product

import pytest

from lsa.core.expr import ONE, Expr
from lsa.core.liealg import (
    LieAlgebra,
    Move,
    adjoint_matrix,
    apply_move,
    center,
    decompose,
    default_parameter,
    derived_series,
    format_subspace,
    format_vector,
    from_fields,
    is_nilpotent,
    is_solvable,
    killing_form,
    killing_value,
    lower_central_series,
    normalize_1d,
    radical,
    rational_roots,
    replay,
)
from lsa.core.vfield import VectorField
from lsa.data import reference
from lsa.errors import ClosureError, NotSupportedError, ValidationError

F = Fraction


def stagnation_like() -> LieAlgebra:
    return LieAlgebra.from_brackets(("v1", "v2", "v3", "v4"), {(2, 3): {2: 1}})


def test_commutator_table_matches_published(stagnation_algebra):
    g = stagnation_algebra
    for i, j in product(range(4), repeat=2):
        expected = reference.COMMUTATORS.get((i + 1, j + 1), {})
        computed = {k + 1: c for k, c in enumerate(g.constants[i][j]) if c}
        assert computed == expected


def test_from_fields_needs_closure(ctx):
    x = ctx.symbol("x")
    dx = VectorField.partial(ctx, x)
    x_dy = VectorField.from_context(ctx, {ctx.symbol("y"): Expr.atom(x)})
    with pytest.raises(ClosureError):
        from_fields([dx, x_dy])
    with pytest.raises(ValidationError):
        from_fields([dx, dx * 2])


def test_antisymmetry_and_jacobi_are_validated():
    with pytest.raises(ValidationError):
        LieAlgebra(("a", "b"), [[[0, 0], [1, 0]], [[1, 0], [0, 0]]])
    with pytest.raises(ValidationError):
        LieAlgebra.from_brackets(
            ("a", "b", "c"), {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {0: 1}}
        )


def test_table_round_trip():
    g = stagnation_like()
    again = LieAlgebra.from_table(g.to_table())
    assert again.constants == g.constants
    assert g.to_table() == {
        "labels": ["v1", "v2", "v3", "v4"],
        "brackets": [{"left": "v3", "right": "v4", "value": {"v3": "1"}}],
    }


def test_table_errors():
    with pytest.raises(ValidationError):
        LieAlgebra.from_table({"brackets": []})
    with pytest.raises(ValidationError):
        LieAlgebra.from_table(
            {"labels": ["a", "b"], "brackets": [{"left": "a", "right": "z", "value": {"a": "1"}}]}
        )
    with pytest.raises(ValidationError):
        LieAlgebra.from_table(
            {"labels": ["a", "b"], "brackets": [{"left": "a", "right": "b", "value": {"a": "x/y"}}]}
        )


def test_bracket_is_bilinear(rng):
    g = stagnation_like()
    for _ in range(100):
        x = [F(rng.randint(-3, 3)) for _ in range(4)]
        y = [F(rng.randint(-3, 3)) for _ in range(4)]
        b = g.bracket(x, y)
        assert b == (0, 0, x[2] * y[3] - x[3] * y[2], 0)
        assert g.bracket(y, x) == tuple(-c for c in b)


def test_adjoint_matrices_match_published(stagnation_algebra):
    eps = default_parameter()
    expected = reference.adjoint_entries(eps)
    for i in range(4):
        m = adjoint_matrix(stagnation_algebra, i)
        for r, c in product(range(4), repeat=2):
            want = expected[i + 1].get((r + 1, c + 1), ONE if r == c else Expr())
            assert m.entries[r][c] == want


def test_adjoint_series_sign_convention():
    g = stagnation_like()
    m3 = adjoint_matrix(g, 2)
    image = m3.apply([0, 0, 0, 1])
    eps = Expr.atom(default_parameter())
    assert image == (Expr(), Expr(), -eps, ONE)
    d = adjoint_matrix(g, 3).derivative_at_zero()
    assert d == [[-v for v in row] for row in g.ad(3)]


def test_adjoint_of_nilpotent_element_is_polynomial():
    heisenberg = LieAlgebra.from_brackets(("x", "y", "z"), {(0, 1): {2: 1}})
    m = adjoint_matrix(heisenberg, 0)
    assert m.is_polynomial()
    assert m.entries[1][2] == -Expr.atom(m.parameter)
    assert m.evaluate(F(2)) == [[1, 0, 0], [0, 1, -2], [0, 0, 1]]


def test_adjoint_of_jordan_block():
    g = LieAlgebra.from_brackets(("a", "b", "c"), {(2, 0): {0: 1}, (2, 1): {0: 1, 1: 1}})
    m = adjoint_matrix(g, 2)
    eps = m.parameter
    decay = Expr.exp(-1, eps)
    assert m.entries[0][0] == decay
    assert m.entries[1][1] == decay
    assert m.entries[1][0] == -(Expr.atom(eps) * decay)
    assert m.entries[2][2] == ONE
    assert not m.is_polynomial()
    with pytest.raises(NotSupportedError):
        m.evaluate(F(1))


def test_adjoint_with_irrational_eigenvalues_is_unsupported():
    g = LieAlgebra.from_brackets(("a", "b", "c"), {(2, 0): {1: 1}, (2, 1): {0: 2}})
    with pytest.raises(NotSupportedError):
        adjoint_matrix(g, 2)


def test_adjoint_composition_is_a_group_law():
    g = stagnation_like()
    m = adjoint_matrix(g, 2)
    eps = m.parameter
    combined = m.at(F(1, 2)) @ m.at(F(3, 2))
    assert combined.entries == m.at(F(2)).entries
    assert (m.at(F(1)) @ m.at(F(-1))).is_identity()
    assert m.at(Expr.atom(eps)).entries == m.entries


def test_rational_roots():
    eps = default_parameter()
    e = Expr.atom(eps)
    assert rational_roots(e * e * 2 - e * 3 + 1, eps) == [F(1, 2), F(1)]
    assert rational_roots(e * e - 2, eps) == []
    assert rational_roots(Expr.constant(3), eps) == []


def test_normalize_kills_v3_when_v4_present():
    g = stagnation_like()
    form = normalize_1d(g, [F(1), F(2), F(3), F(4)])
    assert form.vector == (F(1, 4), F(1, 2), F(0), F(1))
    assert form.moves == (Move(2, F(3, 4)),)
    assert form.transcript(g.labels) == ["Ad(exp(3/4*v3))", "scale by 1/4"]


def test_normalize_grid_is_canonical():
    g = stagnation_like()
    seen = set()
    for coords in product(range(-2, 3), repeat=4):
        if not any(coords):
            continue
        x = [F(c) for c in coords]
        form = normalize_1d(g, x)
        assert replay(g, x, form) == form.vector
        last = max(k for k, v in enumerate(form.vector) if v)
        assert form.vector[last] == 1
        if coords[3]:
            assert form.vector[2] == 0
        assert normalize_1d(g, form.vector).vector == form.vector
        seen.add(form.vector)
    assert len(seen) < 5**4 - 1


def test_normalize_rejects_zero():
    with pytest.raises(ValidationError):
        normalize_1d(stagnation_like(), [0, 0, 0, 0])


def test_apply_move_matches_series():
    g = stagnation_like()
    assert apply_move(g, [F(0), F(0), F(1), F(1)], Move(2, F(1))) == (0, 0, 0, 1)


def test_structure_of_stagnation_algebra(stagnation_algebra):
    g = stagnation_algebra
    series = derived_series(g)
    assert [format_subspace(g, s) for s in series] == ["⟨v1, v2, v3, v4⟩", "⟨v3⟩", "0"]
    assert [format_subspace(g, s) for s in lower_central_series(g)] == ["⟨v1, v2, v3, v4⟩", "⟨v3⟩"]
    assert is_solvable(g)
    assert not is_nilpotent(g)
    k = killing_form(g)
    assert [(i, j) for i in range(4) for j in range(4) if k[i][j]] == [(3, 3)]
    assert k[3][3] == 1
    assert len(radical(g)) == 4
    assert format_subspace(g, center(g)) == "⟨v1, v2⟩"
    assert decompose(g).name == reference.DECOMPOSITION


def test_structure_of_abelian_and_nilpotent_algebras():
    abelian = LieAlgebra.from_brackets(("a", "b"), {})
    assert decompose(abelian).name == "ℝ²"
    assert is_nilpotent(abelian)
    heisenberg = LieAlgebra.from_brackets(("x", "y", "z"), {(0, 1): {2: 1}})
    assert is_nilpotent(heisenberg)
    assert format_subspace(heisenberg, center(heisenberg)) == "⟨z⟩"


def test_format_vector():
    labels = ("v1", "v2", "v3")
    assert format_vector(labels, [F(1), F(0), F(-1)]) == "v1 - v3"
    assert format_vector(labels, [F(1, 2), F(0), F(0)]) == "1/2*v1"
    assert format_vector(labels, [0, 0, 0]) == "0"


def test_ideals_and_killing_values():
    g = stagnation_like()
    assert g.is_ideal([[F(0), F(0), F(1), F(0)]])
    assert g.is_ideal(center(g))
    assert not g.is_ideal([[F(0), F(0), F(0), F(1)]])
    assert killing_value(g, [0, 0, 0, 2], [0, 0, 1, 3]) == 6
    assert g.ad_vector([F(0), F(0), F(1), F(1)]) == [
        [0, 0, 0, 0],
        [0, 0, 0, 0],
        [0, 0, -1, 0],
        [0, 0, 1, 0],
    ]
