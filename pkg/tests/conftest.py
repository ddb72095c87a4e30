import random
from fractions import Fraction

import pytest

from lsa.core.expr import Context, Expr, SymbolKind
from lsa.data import fixture_path
from lsa.dsl import load


def make_context() -> Context:
    ctx = Context()
    for name in ("x", "y"):
        ctx.declare(name, SymbolKind.INDEPENDENT)
    for name in ("U", "V", "P", "T"):
        ctx.declare(name, SymbolKind.DEPENDENT)
    for name in ("nu", "k", "alpha"):
        ctx.declare(name, SymbolKind.PARAMETER, nonzero=True)
    return ctx


def random_expr(rng: random.Random, atoms, terms: int = 4, degree: int = 3) -> Expr:
    """Sum of random monomials with small rational coefficients."""
    result = Expr()
    for _ in range(terms):
        coeff = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        powers = {}
        for _ in range(rng.randint(0, degree)):
            atom = rng.choice(atoms)
            powers[atom] = powers.get(atom, 0) + 1
        result = result + Expr.from_terms([(powers, coeff)])
    return result


@pytest.fixture
def ctx() -> Context:
    return make_context()


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture(scope="session")
def stagnation_source() -> str:
    return fixture_path().read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def stagnation(stagnation_source):
    return load(stagnation_source)


@pytest.fixture(scope="session")
def stagnation_basis(stagnation):
    from lsa.core.detsys import solve_determining

    return solve_determining(stagnation.system, 2)


@pytest.fixture(scope="session")
def stagnation_algebra(stagnation):
    from lsa.core.liealg import from_fields

    return from_fields(list(stagnation.fields.values()), list(stagnation.fields))
