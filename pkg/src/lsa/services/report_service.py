import json
from dataclasses import dataclass, field
from io import StringIO
from typing import Any, Dict, List, Optional, Sequence, Union

from rich.console import Console
from rich.table import Table
from rich.text import Text

from .. import __version__
from ..config import config

Block = Union[str, Table]


@dataclass
class Section:
    """One analysis: text blocks for people, data for machines, flags for discrepancies."""

    title: str
    blocks: List[Block] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    flags: List[str] = field(default_factory=list)

    def add(self, block: Block) -> "Section":
        self.blocks.append(block)
        return self

    def flag(self, message: str) -> "Section":
        self.flags.append(message)
        return self


@dataclass
class Report:
    provenance: Dict[str, Any]
    sections: List[Section] = field(default_factory=list)

    def extend(self, sections: Sequence[Section]) -> "Report":
        self.sections.extend(sections)
        return self

    @property
    def flags(self) -> List[str]:
        return [f for s in self.sections for f in s.flags]


class ReportService:
    def __init__(self, width: Optional[int] = None):
        self.width = width or config.report_width

    @staticmethod
    def provenance(source_hash: Optional[str], options: Dict[str, Any]) -> Dict[str, Any]:
        return {
            "input_sha256": source_hash,
            "version": __version__,
            "options": {k: options[k] for k in sorted(options)},
        }

    def new_report(self, source_hash: Optional[str], options: Dict[str, Any]) -> Report:
        return Report(self.provenance(source_hash, options))

    def render_text(self, report: Report) -> str:
        buffer = StringIO()
        console = Console(
            file=buffer,
            width=self.width,
            color_system=None,
            force_terminal=False,
            highlight=False,
            emoji=False,
        )
        prov = report.provenance
        console.print(Text(f"lsa {prov['version']}  input sha256: {prov['input_sha256'] or '-'}"))
        options = ", ".join(f"{k}={v}" for k, v in prov["options"].items())
        if options:
            console.print(Text(f"options: {options}"))
        for section in report.sections:
            console.print()
            console.print(Text(f"== {section.title} =="))
            for block in section.blocks:
                if isinstance(block, Table):
                    console.print(block)
                else:
                    console.print(Text(block))
            for message in section.flags:
                console.print(Text(f"! {message}"))
        return buffer.getvalue()

    def render_json(self, report: Report) -> str:
        payload = {
            "provenance": report.provenance,
            "sections": [
                {"title": s.title, "data": s.data, "flags": s.flags} for s in report.sections
            ],
        }
        return json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n"


def table(headers: Sequence[str], rows: Sequence[Sequence[str]], title: Optional[str] = None) -> Table:
    """Plain table whose cells are never interpreted as markup."""
    t = Table(title=Text(title) if title else None, show_lines=False, expand=False)
    for header in headers:
        t.add_column(Text(header))
    for row in rows:
        t.add_row(*(Text(str(cell)) for cell in row))
    return t
