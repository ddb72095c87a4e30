from itertools import combinations

import pytest

from lsa.core.expr import Expr
from lsa.core.liealg import LieAlgebra
from lsa.core.subalgebras import (
    CaseStatus,
    Closure,
    coefficient_symbols,
    combination,
    extends,
    is_subalgebra,
    match_published,
    one_dimensional_classes,
    render_span,
    signature,
    solve_pair_condition,
    solve_triple_condition,
    two_dimensional_classes,
)
from lsa.data import reference
from lsa.errors import ValidationError


@pytest.fixture(scope="module")
def g():
    return LieAlgebra.from_brackets(("v1", "v2", "v3", "v4"), {(2, 3): {2: 1}})


def basis(g, *indices):
    return [combination(g.dim, {i: 1}) for i in indices]


def test_published_pairs_are_subalgebras(g):
    for entry in reference.pair_classes():
        check = is_subalgebra(g, entry.vectors)
        assert check.status is Closure.CLOSED, entry.name
        assert check.independent


def test_published_triples_are_subalgebras(g):
    for triple in reference.TRIPLES:
        assert is_subalgebra(g, basis(g, *(i - 1 for i in triple))).holds


def test_bracket_outside_span_is_not_closed(g):
    check = is_subalgebra(g, [combination(4, {0: 1, 2: 1}), combination(4, {3: 1})])
    assert check.status is Closure.NOT_CLOSED
    assert check.failures == ((0, 1),)


def test_symbolic_closure_conditions(g):
    (a1,) = coefficient_symbols("α", 1)
    vectors = [combination(4, {0: a1, 2: 1}), combination(4, {3: 1})]
    check = is_subalgebra(g, vectors)
    assert check.status is Closure.CONDITIONAL
    assert check.conditions == (Expr.atom(a1),)
    assert is_subalgebra(g, vectors, nonzero=[a1]).status is Closure.NOT_CLOSED


def test_dependent_vectors_are_flagged(g):
    check = is_subalgebra(g, [combination(4, {0: 1}), combination(4, {0: 2})])
    assert check.holds
    assert not check.independent


def test_wrong_length_is_rejected(g):
    with pytest.raises(ValidationError):
        is_subalgebra(g, [combination(3, {0: 1})])


def test_pair_condition_for_v3(g):
    condition = solve_pair_condition(g, combination(4, {2: 1}))
    assert condition.case([2]).status is CaseStatus.DEPENDENT
    for support in ([3], [0, 1, 2, 3], [0, 3], [1]):
        assert condition.case(support).status is CaseStatus.ALWAYS


def test_pair_condition_for_v4(g):
    condition = solve_pair_condition(g, combination(4, {3: 1}))
    assert condition.case([3]).status is CaseStatus.DEPENDENT
    assert condition.case([2]).status is CaseStatus.ALWAYS
    assert condition.case([0]).status is CaseStatus.ALWAYS
    assert condition.case([0, 3]).status is CaseStatus.ALWAYS
    never = condition.case([0, 2])
    assert never.status is CaseStatus.NEVER
    assert never.constraints
    assert never.label(g) == "{v1, v3}"
    assert all(c.status is CaseStatus.ALWAYS for c in condition.solutions())


def test_pair_condition_needs_nonzero_generator(g):
    with pytest.raises(ValidationError):
        solve_pair_condition(g, combination(4, {}))


def test_pair_condition_rejects_unknown_support(g):
    condition = solve_pair_condition(g, combination(4, {0: 1}))
    with pytest.raises(ValidationError):
        condition.case([])


def test_triple_condition_over_abelian_pair(g):
    condition = solve_triple_condition(g, *basis(g, 0, 1))
    assert condition.case([0]).status is CaseStatus.DEPENDENT
    assert condition.case([0, 1]).status is CaseStatus.DEPENDENT
    assert condition.case([2]).status is CaseStatus.ALWAYS
    assert condition.case([3]).status is CaseStatus.ALWAYS
    assert condition.case([2, 3]).status is CaseStatus.ALWAYS


def test_triple_condition_over_non_abelian_pair(g):
    condition = solve_triple_condition(g, *basis(g, 2, 3))
    assert condition.case([0]).status is CaseStatus.ALWAYS
    assert condition.case([1]).status is CaseStatus.ALWAYS
    assert condition.case([2, 3]).status is CaseStatus.DEPENDENT


def test_triple_condition_needs_a_subalgebra(g):
    with pytest.raises(ValidationError):
        solve_triple_condition(g, combination(4, {0: 1, 2: 1}), combination(4, {3: 1}))
    with pytest.raises(ValidationError):
        solve_triple_condition(g, combination(4, {0: 1}), combination(4, {0: 2}))


def test_extends(g):
    v1, v2, v3, v4 = basis(g, 0, 1, 2, 3)
    assert extends(g, [v1, v2], v3)
    assert not extends(g, [v1], combination(4, {0: 2}))
    assert not extends(g, [v4], combination(4, {0: 1, 2: 1}))


def test_one_dimensional_classes(g):
    classes = one_dimensional_classes(g)
    assert [c.render(g) for c in classes] == [
        "α1*v1 + α2*v2",
        "α1*v1 + α2*v2 + v3",
        "α1*v1 + α2*v2 + v4",
    ]
    assert [c.members for c in classes] == [24, 100, 500]
    assert sum(c.members for c in classes) == 5**4 - 1
    published = {tuple(k - 1 for k in v) for v in reference.ONE_DIMENSIONAL.values()}
    assert {c.coordinates for c in classes[:2]} == published
    assert classes[2].coordinates == (0, 1, 3)


def test_two_dimensional_candidates_are_subalgebras(g):
    candidates = two_dimensional_classes(g, one_dimensional_classes(g), seed=7)
    assert candidates
    for candidate in candidates:
        check = is_subalgebra(g, candidate.vectors)
        assert check.holds, candidate.source
    signatures = [c.signature for c in candidates]
    assert len(set(signatures)) == len(signatures)


def test_candidates_match_published_pairs(g):
    candidates = two_dimensional_classes(g, one_dimensional_classes(g), seed=7)
    matched = match_published(g, candidates, reference.pair_classes(), seed=7)
    names = {name for c in matched for name in c.matches}
    assert names == {"class 1", "class 2", "class 3"}
    unlisted = [c for c in matched if not c.listed]
    assert ((0, 1), ((0,), (1,))) in [c.signature for c in unlisted]


def test_signature_normalizes_v3_against_v4(g):
    v1 = combination(4, {0: 1})
    mixed = combination(4, {2: 3, 3: 5})
    assert signature(g, [v1, mixed]) == signature(g, [v1, combination(4, {3: 1})])


def test_render_span(g):
    (b1, b2) = coefficient_symbols("β", 2)
    assert render_span(g, [combination(4, {0: b1, 1: b2}), combination(4, {3: 1})]) == (
        "⟨β1*v1 + β2*v2, v4⟩"
    )


def test_every_basis_pair_is_closed(g):
    for i, j in combinations(range(4), 2):
        assert is_subalgebra(g, basis(g, i, j)).holds
