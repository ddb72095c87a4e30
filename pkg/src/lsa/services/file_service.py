import hashlib
from pathlib import Path
from typing import Tuple

from ..data import fixture_path
from ..errors import InputError


class FileService:
    def __init__(self, base_path: str = "."):
        self.base_path = Path(base_path)

    def resolve(self, name: str) -> Path:
        """A path relative to the base, falling back to a packaged fixture of that name."""
        path = Path(name)
        if not path.is_absolute():
            path = self.base_path / path
        if path.is_file():
            return path
        packaged = fixture_path(Path(name).name)
        if Path(name).parent == Path(".") and packaged.is_file():
            return packaged
        raise InputError(f"input file '{name}' not found")

    def read_source(self, name: str) -> Tuple[str, str]:
        """Text and sha256 of an input file."""
        path = self.resolve(name)
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read '{name}': {exc.strerror}") from None
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError:
            raise InputError(f"'{name}' is not UTF-8 text") from None
        return text, hashlib.sha256(raw).hexdigest()
