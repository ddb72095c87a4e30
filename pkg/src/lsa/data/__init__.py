from pathlib import Path

DATA_DIR = Path(__file__).parent


def fixture_path(name: str = "stagnation.pde") -> Path:
    return DATA_DIR / name
