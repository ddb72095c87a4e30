from typing import Optional

import typer

from ..services.analysis_service import AnalysisService, load_model
from ..services.report_service import ReportService
from ..utils.formatting import emit, exit_on_error, status


def symmetries_command(
    file: str = typer.Argument(..., help="Input .pde file or a packaged fixture name"),
    degree: Optional[int] = typer.Option(
        None, "--degree", "-d", min=0, help="Polynomial degree of the infinitesimal ansatz"
    ),
    stability: bool = typer.Option(
        True, "--stability/--no-stability", help="Rerun one degree higher and compare spans"
    ),
    as_json: bool = typer.Option(False, "--json", help="Machine-readable output"),
) -> None:
    """
    Solve the determining system and print the point-symmetry basis.
    """
    with exit_on_error():
        model, digest = load_model(file, ansatz_degree=degree)
        service = AnalysisService(model)
        with status("solving determining equations"):
            sections = service.symmetries(model.ansatz_degree, stability=stability)
        reports = ReportService()
        report = reports.new_report(
            digest,
            {"command": "symmetries", "degree": model.ansatz_degree, "stability": stability},
        ).extend(sections)
        emit(reports.render_json(report) if as_json else reports.render_text(report))
