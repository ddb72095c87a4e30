import typer

from . import __version__
from .commands.algebra import algebra_command
from .commands.optimal import optimal_command
from .commands.parse import parse_command
from .commands.reduce import reduce_command
from .commands.symmetries import symmetries_command
from .commands.verify import verify_command
from .utils.formatting import console
from .utils.log import setup_logging

app = typer.Typer(
    help="Lie Symmetry Assistant (LSA) - point symmetries of polynomial PDE systems",
    no_args_is_help=True,
)


@app.callback(invoke_without_command=True)
def main(
    version: bool = typer.Option(
        False, "--version", "-V", help="Print version information"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr"),
) -> None:
    """
    Lie Symmetry Assistant (LSA) - point symmetries of polynomial PDE systems
    """
    if version:
        console.print(f"LSA version: {__version__}")
        raise typer.Exit()
    setup_logging(verbose)


app.command(name="symmetries")(symmetries_command)
app.command(name="verify")(verify_command)
app.command(name="algebra")(algebra_command)
app.command(name="optimal")(optimal_command)
app.command(name="reduce")(reduce_command)
app.command(name="parse")(parse_command)

if __name__ == "__main__":
    app()
