import json
from typing import Optional

import typer

from ..core.liealg import LieAlgebra
from ..errors import InputError
from ..services.analysis_service import AnalysisService, algebra_sections, load_model
from ..services.file_service import FileService
from ..services.report_service import ReportService
from ..utils.formatting import emit, exit_on_error, status


def read_table(name: str):
    text, digest = FileService().read_source(name)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"'{name}' is not valid JSON: {exc.msg} at line {exc.lineno}") from None
    return LieAlgebra.from_table(data), digest


def algebra_command(
    file: Optional[str] = typer.Argument(None, help="Input .pde file or a packaged fixture name"),
    from_table: Optional[str] = typer.Option(
        None, "--from-table", "-t", help="Structure constants as JSON instead of a .pde file"
    ),
    as_json: bool = typer.Option(False, "--json", help="Machine-readable output"),
) -> None:
    """
    Commutator table, adjoint matrices and structure of the symmetry algebra.
    """
    with exit_on_error():
        if (file is None) == (from_table is None):
            raise InputError("give either an input file or --from-table")
        if from_table:
            g, digest = read_table(from_table)
            published = False
        else:
            model, digest = load_model(file)
            service = AnalysisService(model)
            with status("building the symmetry algebra"):
                g = service.algebra()
            published = service.published
        with status("computing adjoint action"):
            sections = algebra_sections(g, published)
        reports = ReportService()
        report = reports.new_report(
            digest, {"command": "algebra", "source": "table" if from_table else "pde"}
        ).extend(sections)
        emit(reports.render_json(report) if as_json else reports.render_text(report))
