import typer

from ..services.analysis_service import (
    AnalysisService,
    load_model,
    optimal_one,
    optimal_three,
    optimal_two,
)
from ..services.report_service import ReportService
from ..utils.formatting import emit, exit_on_error, status


def optimal_command(
    file: str = typer.Argument(..., help="Input .pde file or a packaged fixture name"),
    dim: int = typer.Option(1, "--dim", "-n", min=1, max=3, help="Subalgebra dimension"),
    as_json: bool = typer.Option(False, "--json", help="Machine-readable output"),
) -> None:
    """
    Optimal systems of one-, two- or three-dimensional subalgebras.
    """
    with exit_on_error():
        model, digest = load_model(file)
        service = AnalysisService(model)
        g = service.algebra()
        with status(f"classifying {dim}-dimensional subalgebras"):
            if dim == 1:
                sections = [optimal_one(g, service.published)]
            elif dim == 2:
                sections = optimal_two(g, service.published)
            else:
                sections = optimal_three(g, service.published)
        reports = ReportService()
        report = reports.new_report(digest, {"command": "optimal", "dim": dim}).extend(sections)
        emit(reports.render_json(report) if as_json else reports.render_text(report))
