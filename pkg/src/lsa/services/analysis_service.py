import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..core import liealg, subalgebras
from ..core.detsys import (
    SymmetryBasis,
    evaluate_sample,
    numeric_point_oracle,
    same_span,
    solve_determining,
    verify_symmetry,
)
from ..core.expr import ONE, Expr, Symbol, SymbolKind
from ..core.liealg import LieAlgebra, format_subspace, format_vector
from ..core.vfield import (
    SolutionForm,
    VectorField,
    flow,
    invariants,
    transform_solution,
)
from ..config import config
from ..data import reference
from ..dsl import Model, load, parse_field
from ..errors import NotSupportedError, ValidationError
from .file_service import FileService
from .report_service import Section, table

logger = logging.getLogger(__name__)


def _fraction_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _labels(indices: Sequence[int]) -> str:
    return ", ".join(f"v{i}" for i in indices)


def load_model(name: str, **overrides) -> Tuple[Model, str]:
    """Read, parse and lower an input file; returns the model and the file's sha256."""
    text, digest = FileService().read_source(name)
    return load(text, **overrides), digest


class AnalysisService:
    """Runs the pipeline on a lowered model and turns results into report sections."""

    def __init__(self, model: Model):
        self.model = model
        self.ctx = model.ctx
        self.system = model.system
        self.published = reference.applies_to(model.ctx)
        self._basis: Optional[SymmetryBasis] = None

    # symmetries

    def basis(self, degree: Optional[int] = None) -> SymmetryBasis:
        degree = self.model.ansatz_degree if degree is None else degree
        if self._basis is None or self._basis.ansatz_degree != degree:
            self._basis = solve_determining(self.system, degree)
        return self._basis

    def solved_forms_section(self) -> Section:
        section = Section("solved forms")
        rows = [
            (f"equation {r.equation + 1}", str(r.leading), r.render())
            for r in self.system.primary_rules()
        ]
        section.add(table(["source", "leading", "solved form"], rows))
        derived = [r for r in self.system.rules if r.derived]
        section.add(f"{len(derived)} derived rules up to order {self.system.prolong_order}")
        section.data = {
            "rules": [
                {"equation": r.equation + 1, "leading": str(r.leading), "derived": r.derived, "form": r.render()}
                for r in self.system.rules
            ]
        }
        return section

    def symmetries(self, degree: Optional[int] = None, stability: bool = True) -> List[Section]:
        basis = self.basis(degree)
        sections = [self.solved_forms_section()]

        stats = Section("determining equations")
        stats.add(
            f"{basis.equation_count} determining equations in {basis.unknown_count} unknowns "
            f"({basis.row_count} linear rows) at ansatz degree {basis.ansatz_degree}"
        )
        stats.data = {
            "ansatz_degree": basis.ansatz_degree,
            "equations": basis.equation_count,
            "unknowns": basis.unknown_count,
            "rows": basis.row_count,
        }
        if self.published:
            stats.data["published_equations"] = reference.EQUATION_COUNT
            if basis.equation_count != reference.EQUATION_COUNT:
                stats.flag(
                    f"published count is {reference.EQUATION_COUNT} determining equations; "
                    f"{basis.equation_count} are generated here (informational)"
                )
        sections.append(stats)

        result = Section("symmetries")
        result.add(f"null space dimension {basis.dimension}")
        rows = [(f"v{i + 1}", v.render()) for i, v in enumerate(basis.fields)]
        result.add(table(["field", "generator"], rows))
        result.data = {
            "dimension": basis.dimension,
            "fields": [v.render() for v in basis.fields],
            "dsl": [v.to_dsl() for v in basis.fields],
        }
        if stability:
            rerun = solve_determining(self.system, basis.ansatz_degree + 1)
            stable = same_span(basis.fields, rerun.fields) if rerun.fields or basis.fields else True
            result.add(
                f"degree {rerun.ansatz_degree} rerun: dimension {rerun.dimension}, "
                f"{'same span' if stable else 'different span'}"
            )
            result.data["stability"] = {
                "degree": rerun.ansatz_degree,
                "dimension": rerun.dimension,
                "same_span": stable,
            }
            if not stable:
                result.flag(f"basis changes between degree {basis.ansatz_degree} and {rerun.ansatz_degree}")
        if self.published:
            self._compare_basis(result, basis)
        sections.append(result)

        if self.published:
            sections.append(self.sample_equations_section(basis.fields))
        return sections

    def published_fields(self) -> List[VectorField]:
        return [parse_field(self.model, text) for text in reference.BASIS.values()]

    def _compare_basis(self, section: Section, basis: SymmetryBasis) -> None:
        published = self.published_fields()
        match = same_span(published, basis.fields) if basis.fields else False
        section.data["matches_published_basis"] = match
        if not match:
            section.flag("span differs from the published basis ∂x, ∂y, ∂T, T∂T")
        constants = [Symbol(f"c{i + 1}", SymbolKind.PARAMETER) for i in range(len(basis.fields))]
        general = None
        for c, v in zip(constants, basis.fields):
            term = v * Expr.atom(c)
            general = term if general is None else general + term
        computed = {}
        for coord in self.ctx.coordinates:
            coeff = general.coefficient(coord) if general is not None else Expr()
            computed[coord.name] = str(coeff)
            printed = reference.INFINITESIMALS[coord.name]
            if (printed == "0") != coeff.is_zero:
                section.flag(
                    f"printed coefficient of ∂{coord.name} is {printed}; computed {coeff}"
                )
        section.data["general_coefficients"] = computed

    def sample_equations_section(self, fields: Sequence[VectorField]) -> Section:
        section = Section("sample determining equations")
        rows = []
        data = []
        for sample in reference.SAMPLE_EQUATIONS:
            values = [evaluate_sample(self.ctx, sample, v) for v in fields]
            ok = all(value.is_zero for value in values)
            rows.append((sample.text, "0 on every generator" if ok else "nonzero"))
            data.append({"equation": sample.text, "vanishes": ok, "note": sample.note})
            if not ok:
                section.flag(f"'{sample.text}' does not vanish on the computed basis")
            if sample.note:
                section.add(f"note: {sample.note}")
        section.blocks.insert(0, table(["printed equation", "value"], rows))
        section.data = {"equations": data}
        return section

    # verification

    def verify(self, fields: Dict[str, VectorField], oracle: int = 0) -> Section:
        section = Section("verification")
        rows = []
        data = []
        for name, v in fields.items():
            check = verify_symmetry(self.system, v)
            residuals = [str(r) for r in check.residuals if not r.is_zero]
            entry = {"field": name, "generator": v.render(), "holds": check.holds, "residuals": residuals}
            oracle_text = "-"
            if oracle:
                agrees = numeric_point_oracle(self.system, v, oracle)
                entry["oracle"] = agrees
                oracle_text = "pass" if agrees else "fail"
                if agrees != check.holds:
                    section.flag(f"numeric oracle disagrees with the symbolic verdict for {name}")
            rows.append((name, v.render(), "pass" if check.holds else "fail", oracle_text))
            for index, residual in enumerate(check.residuals):
                if not residual.is_zero:
                    section.add(f"{name}: residual of equation {index + 1}: {residual}")
            data.append(entry)
        section.blocks.insert(0, table(["name", "field", "symbolic", "oracle"], rows))
        section.data = {"fields": data}
        return section

    def named_fields(self, names: Sequence[str] = ()) -> Dict[str, VectorField]:
        if not names:
            return dict(self.model.fields)
        out = {}
        for name in names:
            if name not in self.model.fields:
                raise ValidationError(
                    f"unknown vector field '{name}'; declared: {', '.join(self.model.fields) or 'none'}"
                )
            out[name] = self.model.fields[name]
        return out

    # algebra

    def algebra_basis(self) -> Dict[str, VectorField]:
        if self.model.fields:
            return dict(self.model.fields)
        return {f"v{i + 1}": v for i, v in enumerate(self.basis().fields)}

    def algebra(self) -> LieAlgebra:
        fields = self.algebra_basis()
        return liealg.from_fields(list(fields.values()), list(fields))


def algebra_sections(g: LieAlgebra, published: bool = False) -> List[Section]:
    published = published and g.labels == reference.LABELS
    return [commutator_section(g, published), adjoint_section(g, published), structure_section(g, published)]


def commutator_section(g: LieAlgebra, published: bool = False) -> Section:
    section = Section("commutator table")
    n = g.dim
    rows = []
    for i in range(n):
        row = [g.labels[i]]
        for j in range(n):
            row.append(format_vector(g.labels, g.constants[i][j]))
        rows.append(row)
    section.add(table(["[ , ]"] + list(g.labels), rows))
    section.data = g.to_table()
    if published:
        for i in range(n):
            for j in range(n):
                expected = reference.COMMUTATORS.get((i + 1, j + 1), {})
                computed = {k + 1: c for k, c in enumerate(g.constants[i][j]) if c}
                if computed != expected:
                    section.flag(
                        f"[{g.labels[i]}, {g.labels[j]}] is {format_vector(g.labels, g.constants[i][j])}; "
                        "the published table differs"
                    )
    return section


def adjoint_section(g: LieAlgebra, published: bool = False) -> Section:
    section = Section("adjoint action")
    matrices = []
    expected = reference.adjoint_entries(liealg.default_parameter()) if published else {}
    for i in range(g.dim):
        try:
            m = liealg.adjoint_matrix(g, i)
        except NotSupportedError as exc:
            section.add(f"Ad(exp(eps {g.labels[i]})): {exc}")
            matrices.append({"generator": g.labels[i], "error": str(exc)})
            continue
        rows = m.rows_text()
        section.add(
            table([""] + list(g.labels), [[g.labels[r]] + row for r, row in enumerate(rows)],
                  title=f"M{i + 1} = Ad(exp({m.parameter.name} {g.labels[i]}))")
        )
        matrices.append({"generator": g.labels[i], "rows": rows})
        if published:
            entries = expected[i + 1]
            for r in range(g.dim):
                for c in range(g.dim):
                    want = entries.get((r + 1, c + 1), ONE if r == c else Expr())
                    if m.entries[r][c] != want:
                        section.flag(
                            f"M{i + 1}[{r + 1}][{c + 1}] is {m.entries[r][c]}; published {want}"
                        )
    section.data = {"matrices": matrices}
    return section


def structure_section(g: LieAlgebra, published: bool = False) -> Section:
    section = Section("structure")
    derived = liealg.derived_series(g)
    lower = liealg.lower_central_series(g)
    solvable = liealg.is_solvable(g)
    nilpotent = liealg.is_nilpotent(g)
    killing = liealg.killing_form(g)
    radical = liealg.radical(g)
    center = liealg.center(g)
    decomposition = liealg.decompose(g)
    section.add("derived series: " + " ⊃ ".join(format_subspace(g, s) for s in derived))
    section.add("lower central series: " + " ⊃ ".join(format_subspace(g, s) for s in lower))
    section.add(f"solvable: {'yes' if solvable else 'no'}; nilpotent: {'yes' if nilpotent else 'no'}")
    section.add(
        table(
            [""] + list(g.labels),
            [[g.labels[i]] + [_fraction_text(v) for v in row] for i, row in enumerate(killing)],
            title="Killing form",
        )
    )
    section.add(f"radical: {format_subspace(g, radical)}")
    section.add(f"center: {format_subspace(g, center)}")
    section.add(f"decomposition: {decomposition.name}")

    def subspace_data(s):
        return [[_fraction_text(v) for v in row] for row in s]

    section.data = {
        "derived_series": [subspace_data(s) for s in derived],
        "lower_central_series": [subspace_data(s) for s in lower],
        "solvable": solvable,
        "nilpotent": nilpotent,
        "killing_form": subspace_data(killing),
        "radical": subspace_data(radical),
        "center": subspace_data(center),
        "decomposition": decomposition.name,
    }
    if published:
        printed = ", ".join(
            f"g({n}) = ⟨{_labels(s)}⟩" for n, s in enumerate(reference.DERIVED_SERIES, start=1)
        )
        computed = [tuple(i + 1 for i in range(g.dim) if any(row[i] for row in s)) for s in derived[1:] if s]
        if tuple(computed) != reference.DERIVED_SERIES:
            section.flag(
                f"printed derived series {printed} disagrees with the commutator table; "
                "computed from the structure constants instead"
            )
        if decomposition.name != reference.DECOMPOSITION:
            section.flag(f"published decomposition is {reference.DECOMPOSITION}")
    return section


# optimal systems


def _vector_text(g: LieAlgebra, vectors) -> str:
    return subalgebras.render_span(g, vectors)


def _case_rows(g: LieAlgebra, condition: subalgebras.ExtensionCondition) -> List[List[str]]:
    rows = []
    for case in condition.cases:
        constraints = "; ".join(f"{c} = 0" for c in case.constraints) or "-"
        rows.append([case.label(g), case.status.value, constraints])
    return rows


def optimal_one(g: LieAlgebra, published: bool = False) -> Section:
    published = published and g.labels == reference.LABELS
    section = Section("one-dimensional optimal system")
    classes = subalgebras.one_dimensional_classes(g)
    rows = []
    data = []
    for orbit in classes:
        coords = tuple(k + 1 for k in orbit.coordinates)
        match = "-"
        if published:
            names = [n for n, c in reference.ONE_DIMENSIONAL.items() if c == coords]
            match = ", ".join(names) or "not listed"
            if not names:
                section.flag(f"class ⟨{orbit.render(g)}⟩ is missing from the published list")
        transcript = orbit.example_form.transcript(g.labels) or ["none"]
        rows.append([
            f"⟨{orbit.render(g)}⟩",
            str(orbit.members),
            f"{format_vector(g.labels, orbit.example)} -> {format_vector(g.labels, orbit.example_form.vector)}",
            "; ".join(transcript),
            match,
        ])
        data.append({
            "representative": orbit.render(g),
            "coordinates": list(coords),
            "grid_members": orbit.members,
            "example": [_fraction_text(v) for v in orbit.example],
            "normal_form": [_fraction_text(v) for v in orbit.example_form.vector],
            "moves": [
                {"generator": g.labels[m.generator], "epsilon": _fraction_text(m.epsilon)}
                for m in orbit.example_form.moves
            ],
            "published": match,
        })
    section.add(table(["class", "grid vectors", "example", "moves", "published"], rows))
    section.data = {"classes": data}
    return section


def optimal_two(g: LieAlgebra, published: bool = False) -> List[Section]:
    published = published and g.labels == reference.LABELS
    classes = subalgebras.one_dimensional_classes(g)
    sections = []

    pairs = Section("pair conditions")
    pair_data = []
    for orbit in classes:
        x1 = orbit.representative
        condition = subalgebras.solve_pair_condition(g, x1, nonzero=_symbols(x1))
        pairs.add(f"X = {orbit.render(g)}: [X, Y] = λ X + μ Y with Y = a1 v1 + ... + a{g.dim} v{g.dim}")
        pairs.add("system: " + "; ".join(f"{e} = 0" for e in condition.system))
        pairs.add(table(["support of Y", "status", "constraints"], _case_rows(g, condition)))
        pair_data.append({
            "x1": orbit.render(g),
            "system": [str(e) for e in condition.system],
            "constraints": [str(c) for c in condition.constraints],
            "cases": [
                {"support": [g.labels[k] for k in c.support], "status": c.status.value,
                 "constraints": [str(e) for e in c.constraints]}
                for c in condition.cases
            ],
        })
    pairs.data = {"conditions": pair_data}
    sections.append(pairs)

    found = Section("two-dimensional optimal system")
    candidates = subalgebras.two_dimensional_classes(g, classes, config.oracle_seed)
    published_classes = reference.pair_classes(g.dim) if published else []
    if published:
        subalgebras.match_published(g, candidates, published_classes, config.oracle_seed)
        rows = []
        verdicts = []
        for entry in published_classes:
            check = subalgebras.is_subalgebra(g, entry.vectors)
            rows.append([entry.name, _vector_text(g, entry.vectors), check.status.value, entry.condition or "-"])
            verdicts.append({
                "name": entry.name,
                "span": _vector_text(g, entry.vectors),
                "closure": check.status.value,
                "printed_condition": entry.condition,
            })
            if not check.holds:
                found.flag(f"published {entry.name} {_vector_text(g, entry.vectors)} is not closed")
        found.add(table(["published", "span", "closure", "printed condition"], rows))
        found.flag(
            f"class 1 is printed with {reference.PAIR_CONDITIONS['class 1']}; "
            f"its generators are independent iff {reference.CLASS_1_INDEPENDENCE}; closure needs neither"
        )
        found.data["published"] = verdicts
    rows = []
    cand_data = []
    for c in candidates:
        match = ", ".join(c.matches) if c.matches else ("not listed" if published else "-")
        rows.append([_vector_text(g, c.vectors), c.source, match])
        cand_data.append({"span": _vector_text(g, c.vectors), "source": c.source, "published": c.matches})
        if published and not c.matches:
            found.flag(f"subalgebra family {_vector_text(g, c.vectors)} is not in the published list")
    found.add(table(["found", "from", "published"], rows))
    found.data["found"] = cand_data
    sections.append(found)
    return sections


def _symbols(vector) -> List[Symbol]:
    out = []
    for c in vector:
        for atom in c.atoms():
            if isinstance(atom, Symbol) and atom not in out:
                out.append(atom)
    return out


def optimal_three(g: LieAlgebra, published: bool = False) -> List[Section]:
    published = published and g.labels == reference.LABELS
    sections = []
    triples = Section("three-dimensional optimal system")
    if published:
        rows = []
        data = []
        for triple in reference.TRIPLES:
            vectors = [subalgebras.combination(g.dim, {i - 1: 1}) for i in triple]
            check = subalgebras.is_subalgebra(g, vectors)
            rows.append([f"⟨{_labels(triple)}⟩", check.status.value])
            data.append({"span": _labels(triple), "closure": check.status.value})
            if not check.holds:
                triples.flag(f"published triple ⟨{_labels(triple)}⟩ is not closed")
        triples.add(table(["published", "closure"], rows))
        triples.flag(reference.TRIPLE_NOTE)
        triples.data["published"] = data
        bases = [(e.name, e.vectors) for e in reference.pair_classes(g.dim)]
    else:
        bases = [
            (f"⟨{g.labels[i]}, {g.labels[j]}⟩",
             (subalgebras.combination(g.dim, {i: 1}), subalgebras.combination(g.dim, {j: 1})))
            for i in range(g.dim) for j in range(i + 1, g.dim)
            if subalgebras.is_subalgebra(
                g, [subalgebras.combination(g.dim, {i: 1}), subalgebras.combination(g.dim, {j: 1})]
            ).holds
        ]
    extension = Section("triple conditions")
    ext_data = []
    for name, (y1, y2) in bases:
        try:
            condition = subalgebras.solve_triple_condition(g, y1, y2)
        except ValidationError as exc:
            extension.add(f"{name}: {exc}")
            continue
        extension.add(f"{name} = {_vector_text(g, (y1, y2))}: [Y_r, Y] = λ_r Y + μ_r Y1 + ν_r Y2")
        extension.add(table(["support of Y", "status", "constraints"], _case_rows(g, condition)))
        ext_data.append({
            "base": name,
            "span": _vector_text(g, (y1, y2)),
            "always": [[g.labels[k] for k in c.support] for c in condition.solutions()],
        })
    extension.data = {"extensions": ext_data}
    sections.extend([triples, extension])
    if published:
        sections.append(optimal_table(g))
    return sections


def optimal_table(g: LieAlgebra) -> Section:
    """The optimal-system table, one row per dimension, each entry checked for closure."""
    section = Section("optimal-system table")
    one = reference.one_dimensional_classes(g.dim)
    rows = [["1", "; ".join(f"⟨{format_vector(g.labels, v)}⟩" for v in one.values())]]
    pairs = reference.pair_classes(g.dim)
    rows.append(["2", "; ".join(_vector_text(g, p.vectors) for p in pairs)])
    rows.append(["3", "; ".join(f"⟨{_labels(t)}⟩" for t in reference.TRIPLES)])
    rows.append(["4", f"⟨{_labels(range(1, g.dim + 1))}⟩"])
    checks = [subalgebras.is_subalgebra(g, p.vectors).holds for p in pairs]
    checks += [
        subalgebras.is_subalgebra(g, [subalgebras.combination(g.dim, {i - 1: 1}) for i in t]).holds
        for t in reference.TRIPLES
    ]
    section.add(table(["dimension", "subalgebras"], rows))
    section.add(f"every listed entry closes: {'yes' if all(checks) else 'no'}")
    section.data = {"rows": [{"dimension": int(r[0]), "entries": r[1]} for r in rows], "all_closed": all(checks)}
    return section


# reduction


def reduction_sections(service: AnalysisService, name: str, v: VectorField) -> List[Section]:
    ctx = service.ctx
    eps = ctx.group_parameter()
    section = Section(f"reduction by {name} = {v.render()}")
    published = service.published and name in reference.INVARIANTS and _is_published_field(service, name, v)

    g = flow(v, eps)
    section.add(f"flow: {g.render()}")
    data = {"field": v.render(), "flow": g.render()}
    if published:
        expected = reference.flows(ctx, eps)[name]
        images = [expected.get(c, Expr.atom(c)) for c in g.coordinates]
        if tuple(images) != g.images:
            section.flag(f"published group is ({', '.join(map(str, images))})")

    found = invariants(v)
    checks = [inv.annihilated_by(v) for inv in found]
    section.add("invariants: " + ", ".join(str(inv) for inv in found))
    data["invariants"] = [str(inv) for inv in found]
    data["annihilated"] = all(checks)
    if not all(checks):
        section.flag("an invariant is not annihilated by its field")
    if published:
        expected_names = set(reference.INVARIANTS[name])
        names = {str(inv) for inv in found}
        if names != expected_names:
            section.flag(f"published invariants are {', '.join(reference.INVARIANTS[name])}")

    try:
        solution = transform_solution(g, SolutionForm.generic(ctx.independents, ctx.dependents))
    except NotSupportedError as exc:
        section.add(f"transformed solution: {exc}")
        data["transformed"] = None
    else:
        lines = solution.render("1")
        section.add("transformed solution: " + "; ".join(lines))
        data["transformed"] = lines
        if published:
            expected_form = reference.transformed_solutions(ctx, eps)[name]
            for dep, mine, theirs in zip(ctx.dependents, solution.components, expected_form.components):
                if mine != theirs:
                    section.flag(
                        f"published {dep.name}1 = {theirs.render()}; the group action gives {mine.render()}"
                    )
    section.data = data
    return [section]


def _is_published_field(service: AnalysisService, name: str, v: VectorField) -> bool:
    expected = parse_field(service.model, reference.BASIS[name])
    return expected == v
