from contextlib import contextmanager
from typing import Iterator

import typer
from rich.console import Console
from rich.markup import escape

from ..errors import LsaError

console = Console()
err_console = Console(stderr=True)


def print_error(message: str) -> None:
    err_console.print(f"[red]✗[/red] {escape(message)}")


def emit(text: str) -> None:
    """Report output goes to stdout untouched."""
    typer.echo(text, nl=False)


@contextmanager
def status(message: str) -> Iterator[None]:
    if not err_console.is_terminal:
        yield
        return
    with err_console.status(escape(message)):
        yield


@contextmanager
def exit_on_error() -> Iterator[None]:
    """Turn library errors into a diagnostic and the matching exit code."""
    try:
        yield
    except typer.Exit:
        raise
    except LsaError as exc:
        print_error(str(exc))
        raise typer.Exit(exc.exit_code)
    except Exception as exc:
        print_error(f"internal error: {exc}")
        raise typer.Exit(4)
