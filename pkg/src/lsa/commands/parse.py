import typer

from ..dsl import parse, render
from ..services.file_service import FileService
from ..utils.formatting import emit, exit_on_error


def parse_command(
    file: str = typer.Argument(..., help="Input .pde file or a packaged fixture name"),
) -> None:
    """
    Parse a file and print it back in normalized form.
    """
    with exit_on_error():
        text, _ = FileService().read_source(file)
        emit(render(parse(text)))
