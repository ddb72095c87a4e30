from typing import List, Optional

import typer

from ..dsl import parse_field
from ..services.analysis_service import AnalysisService, load_model
from ..services.report_service import ReportService
from ..utils.formatting import emit, exit_on_error


def verify_command(
    file: str = typer.Argument(..., help="Input .pde file or a packaged fixture name"),
    vfield: Optional[List[str]] = typer.Option(
        None, "--vfield", "-f", help="Declared field to check (repeatable; default: all)"
    ),
    field_expr: Optional[List[str]] = typer.Option(
        None, "--field-expr", "-e", help="Inline field such as 'd/dU' (repeatable)"
    ),
    oracle: int = typer.Option(
        0, "--oracle", min=0, help="Also test N random jet points numerically"
    ),
    as_json: bool = typer.Option(False, "--json", help="Machine-readable output"),
) -> None:
    """
    Check the symmetry condition for declared or inline vector fields.
    """
    with exit_on_error():
        model, digest = load_model(file)
        service = AnalysisService(model)
        fields = service.named_fields(vfield or ()) if vfield or not field_expr else {}
        for text in field_expr or ():
            fields[text] = parse_field(model, text)
        section = service.verify(fields, oracle)
        reports = ReportService()
        report = reports.new_report(
            digest,
            {"command": "verify", "fields": list(fields), "oracle": oracle},
        ).extend([section])
        emit(reports.render_json(report) if as_json else reports.render_text(report))
