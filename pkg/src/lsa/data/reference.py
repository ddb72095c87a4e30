"""Published results for the stagnation-point flow system.

Reports compare computed values against these and flag every difference.
Indices are 1-based basis positions (v1..v4).
"""
from fractions import Fraction
from typing import Dict, List, Tuple

from ..core.detsys import SampleEquation, SampleTerm
from ..core.expr import ONE, Context, Expr, Symbol
from ..core.subalgebras import PublishedClass, coefficient_symbols, combination
from ..core.vfield import SolutionComponent, SolutionForm

INDEPENDENTS = ("x", "y")
DEPENDENTS = ("U", "V", "P", "T")
LABELS = ("v1", "v2", "v3", "v4")

EQUATION_COUNT = 112

BASIS = {"v1": "d/dx", "v2": "d/dy", "v3": "d/dT", "v4": "T * d/dT"}

# printed general solution; "C1", "C2" are arbitrary constants
INFINITESIMALS = {"x": "C1", "y": "C2", "U": "0", "V": "0", "P": "T", "T": "0"}

COMMUTATORS: Dict[Tuple[int, int], Dict[int, Fraction]] = {
    (3, 4): {3: Fraction(1)},
    (4, 3): {3: Fraction(-1)},
}

DERIVED_SERIES = ((1, 2, 3, 4), (3,))

DECOMPOSITION = "ℝ² ⊕ a(1)"

INVARIANTS = {
    "v1": ("y", "U", "V", "P", "T"),
    "v2": ("x", "U", "V", "P", "T"),
    "v3": ("x", "y", "U", "V", "P"),
    "v4": ("x", "y", "U", "V", "P"),
}

ONE_DIMENSIONAL = {"X1": (1, 2), "X2": (1, 2, 3)}

TRIPLES = ((1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4))
TRIPLE_NOTE = "third triple is printed once as 'v1, v3, v3' and read as v1, v3, v4"

PAIR_CONDITIONS = {
    "class 1": "β1*β3 ≠ β2*β4",
    "class 2": "β1^2 + β2^2 ≠ 0",
    "class 3": "",
}
CLASS_1_INDEPENDENCE = "β1*β4 ≠ β2*β3"


def applies_to(ctx: Context) -> bool:
    return (
        tuple(s.name for s in ctx.independents) == INDEPENDENTS
        and tuple(s.name for s in ctx.dependents) == DEPENDENTS
    )


def adjoint_entries(eps: Symbol) -> Dict[int, Dict[Tuple[int, int], Expr]]:
    """Non-identity entries of the printed adjoint matrices."""
    return {
        1: {},
        2: {},
        3: {(4, 3): -Expr.atom(eps)},
        4: {(3, 3): Expr.exp(1, eps)},
    }


def flows(ctx: Context, eps: Symbol) -> Dict[str, Dict[Symbol, Expr]]:
    """Printed one-parameter groups; unlisted coordinates are fixed."""
    x, y, T = (ctx.symbol(n) for n in ("x", "y", "T"))
    e = Expr.atom(eps)
    return {
        "v1": {x: Expr.atom(x) + e},
        "v2": {y: Expr.atom(y) + e},
        "v3": {T: Expr.atom(T) + e},
        "v4": {T: Expr.atom(T) * Expr.exp(1, eps)},
    }


def transformed_solutions(ctx: Context, eps: Symbol) -> Dict[str, SolutionForm]:
    """Printed U1, V1, P1, T1 columns, with f, g, h, r the known solution."""
    x, y = (Expr.atom(ctx.symbol(n)) for n in INDEPENDENTS)
    e = Expr.atom(eps)
    deps = ctx.dependents
    names = ("f", "g", "h", "r")

    def form(args, t_scale=ONE, t_shift=Expr()) -> SolutionForm:
        comps = [SolutionComponent(n, args) for n in names[:3]]
        comps.append(SolutionComponent("r", args, t_scale, t_shift))
        return SolutionForm(deps, tuple(comps))

    return {
        "v1": form((x + e, y)),
        "v2": form((x, y + e)),
        "v3": form((x, y), t_shift=e),
        "v4": form((x, y), t_scale=Expr.exp(-1, eps)),
    }


def pair_classes(dim: int = 4) -> List[PublishedClass]:
    b1, b2, b3, b4 = coefficient_symbols("β", 4)
    first = combination(dim, {0: b1, 1: b2})
    return [
        PublishedClass(
            "class 1",
            (first, combination(dim, {0: b3, 1: b4, 2: 1})),
            PAIR_CONDITIONS["class 1"],
        ),
        PublishedClass(
            "class 2", (first, combination(dim, {3: 1})), PAIR_CONDITIONS["class 2"]
        ),
        PublishedClass("class 3", (combination(dim, {2: 1}), combination(dim, {3: 1}))),
    ]


def one_dimensional_classes(dim: int = 4) -> Dict[str, tuple]:
    alpha = coefficient_symbols("α", 3)
    return {
        "X1": combination(dim, {0: alpha[0], 1: alpha[1]}),
        "X2": combination(dim, {0: alpha[0], 1: alpha[1], 2: alpha[2]}),
    }


def _t(coefficient, factors, target, derivatives=()) -> SampleTerm:
    return SampleTerm(Fraction(coefficient), tuple(factors), target, tuple(derivatives))


SAMPLE_EQUATIONS = (
    SampleEquation(
        "2α ∂²ξ2/∂T∂y + 2V ∂ξ2/∂T − α ∂²η4/∂T² = 0",
        (
            _t(2, ["alpha"], "xi2", ["T", "y"]),
            _t(2, ["V"], "xi2", ["T"]),
            _t(-1, ["alpha"], "eta4", ["T", "T"]),
        ),
    ),
    SampleEquation(
        "αV ∂ξ1/∂U + αν ∂²ξ1/∂V∂y − νV ∂ξ1/∂V + 2νU ∂ξ2/∂V − αU ∂ξ1/∂U + νU ∂ξ1/∂U = 0",
        (
            _t(1, ["alpha", "V"], "xi1", ["U"]),
            _t(1, ["alpha", "nu"], "xi1", ["V", "y"]),
            _t(-1, ["nu", "V"], "xi1", ["V"]),
            _t(2, ["nu", "U"], "xi2", ["V"]),
            _t(-1, ["alpha", "U"], "xi1", ["U"]),
            _t(1, ["nu", "U"], "xi1", ["U"]),
        ),
    ),
    SampleEquation(
        "V ∂ξ1/∂U + U ∂ξ2/∂V = 0",
        (_t(1, ["V"], "xi1", ["U"]), _t(1, ["U"], "xi2", ["V"])),
    ),
    SampleEquation(
        "U ∂ξ1/∂V + V ∂ξ1/∂V = 0",
        (_t(1, ["U"], "xi1", ["V"]), _t(1, ["V"], "xi1", ["V"])),
    ),
    SampleEquation(
        "2 ∂²ξ2/∂U∂y − ∂²η1/∂U² = 0",
        (_t(2, [], "xi2", ["U", "y"]), _t(-1, [], "eta1", ["U", "U"])),
    ),
    SampleEquation(
        "∂²ξ1/∂U² − 2 ∂²ξ2/∂V∂U = 0",
        (_t(1, [], "xi1", ["U", "U"]), _t(-2, [], "xi2", ["V", "U"])),
        note="printed with a malformed second derivative, read as ∂²ξ2/∂V∂U",
    ),
)
