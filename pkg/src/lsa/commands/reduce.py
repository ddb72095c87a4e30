import typer

from ..dsl import parse_field
from ..services.analysis_service import AnalysisService, load_model, reduction_sections
from ..services.report_service import ReportService
from ..utils.formatting import emit, exit_on_error


def reduce_command(
    file: str = typer.Argument(..., help="Input .pde file or a packaged fixture name"),
    vfield: str = typer.Option(
        ..., "--vfield", "-f", help="Declared field name or an inline field such as 'd/dx + d/dy'"
    ),
    as_json: bool = typer.Option(False, "--json", help="Machine-readable output"),
) -> None:
    """
    One-parameter group, invariants and transformed solutions of a generator.
    """
    with exit_on_error():
        model, digest = load_model(file)
        service = AnalysisService(model)
        if vfield in model.fields:
            v = model.fields[vfield]
        else:
            v = parse_field(model, vfield)
        sections = reduction_sections(service, vfield, v)
        reports = ReportService()
        report = reports.new_report(digest, {"command": "reduce", "vfield": vfield}).extend(sections)
        emit(reports.render_json(report) if as_json else reports.render_text(report))
