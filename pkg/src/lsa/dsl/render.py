"""Canonical text for parsed ``.pde`` files; parse(render(spec)) == spec."""
from typing import List

from .parser import BinOp, DiffOp, Jet, Name, Neg, Node, Number, Power, SourceSpec

PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}
NEG_PRECEDENCE = 3
POWER_PRECEDENCE = 4
ATOM_PRECEDENCE = 5


def _precedence(node: Node) -> int:
    if isinstance(node, BinOp):
        return PRECEDENCE[node.op]
    if isinstance(node, Neg):
        return NEG_PRECEDENCE
    if isinstance(node, Power):
        return POWER_PRECEDENCE
    return ATOM_PRECEDENCE


def _wrap(node: Node, parenthesize: bool) -> str:
    text = render_expr(node)
    return f"({text})" if parenthesize else text


def render_expr(node: Node) -> str:
    if isinstance(node, Number):
        return str(node.value)
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Jet):
        return f"D({node.dependent},{','.join(node.variables)})"
    if isinstance(node, DiffOp):
        return f"d/d{node.variable}"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _precedence(node.operand) < NEG_PRECEDENCE)
    if isinstance(node, Power):
        return _wrap(node.base, _precedence(node.base) < ATOM_PRECEDENCE) + f"^{node.exponent}"
    mine = PRECEDENCE[node.op]
    left = _wrap(node.left, _precedence(node.left) < mine)
    right = _wrap(node.right, _precedence(node.right) <= mine)
    return f"{left} {node.op} {right}"


def render(spec: SourceSpec) -> str:
    lines: List[str] = []
    if spec.independents:
        lines.append(f"independent {' '.join(spec.independents)};")
    if spec.dependents:
        lines.append(f"dependent {' '.join(spec.dependents)};")
    run: List[str] = []
    flag = None
    for param in spec.params:
        if run and param.nonzero != flag:
            lines.append(_param_line(run, flag))
            run = []
        run.append(param.name)
        flag = param.nonzero
    if run:
        lines.append(_param_line(run, flag))
    for option in spec.options:
        lines.append(f"option {option.name} {option.value};")
    for eq in spec.equations:
        text = f"eq {render_expr(eq.lhs)} = {render_expr(eq.rhs)}"
        if eq.leading is not None:
            text += f" leading {render_expr(eq.leading)}"
        lines.append(text + ";")
    for decl in spec.vfields:
        lines.append(f"vfield {decl.name} = {render_expr(decl.expr)};")
    return "\n".join(lines) + "\n"


def _param_line(names: List[str], nonzero: bool) -> str:
    suffix = " nonzero" if nonzero else ""
    return f"param {' '.join(names)}{suffix};"
