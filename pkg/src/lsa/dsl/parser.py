"""Tokenizer, recursive descent parser and lowering for ``.pde`` files.

    independent x y;
    dependent U V P T;
    param nu k alpha nonzero;
    eq D(U,x) + D(V,y) = 0;
    eq U*D(T,x) + V*D(T,y) = alpha*D(T,y,y) leading D(T,y,y);
    vfield v4 = T * d/dT;
    option ansatz_degree 2;
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from ..config import config
from ..core.detsys import PDESystem, solved_forms
from ..core.expr import ONE, Context, Expr, Symbol, SymbolKind
from ..core.jet import JetCoordinate, MultiIndex
from ..core.vfield import VectorField
from ..errors import ParseError

logger = logging.getLogger(__name__)

KEYWORDS = {"independent", "dependent", "param", "nonzero", "eq", "leading", "vfield", "option"}
OPTIONS = ("ansatz_degree", "prolong_order")
PUNCTUATION = "+-*/^()=,;"
DIGITS = frozenset("0123456789")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, NUMBER, DIFFOP, KEYWORD, punctuation, EOF
    text: str
    line: int
    column: int


def tokenize(source: str) -> List[Token]:
    tokens: List[Token] = []
    line, column, idx = 1, 1, 0

    def advance(count: int = 1) -> None:
        nonlocal idx, line, column
        for _ in range(count):
            if source[idx] == "\n":
                line += 1
                column = 1
            else:
                column += 1
            idx += 1

    while idx < len(source):
        c = source[idx]
        if c.isspace():
            advance()
            continue
        if c == "#":
            while idx < len(source) and source[idx] != "\n":
                advance()
            continue
        start_line, start_column = line, column
        if c in DIGITS:
            end = idx
            while end < len(source) and source[end] in DIGITS:
                end += 1
            text = source[idx:end]
            advance(end - idx)
            tokens.append(Token("NUMBER", text, start_line, start_column))
            continue
        if c.isalpha() or c == "_":
            end = idx
            while end < len(source) and (source[end].isalnum() or source[end] == "_"):
                end += 1
            text = source[idx:end]
            if text == "d" and source[end:end + 2] == "/d":
                name_end = end + 2
                while name_end < len(source) and (source[name_end].isalnum() or source[name_end] == "_"):
                    name_end += 1
                name = source[end + 2:name_end]
                if not name or not (name[0].isalpha() or name[0] == "_"):
                    raise ParseError(
                        "malformed derivative operator", start_line, start_column, "write d/dX"
                    )
                advance(name_end - idx)
                tokens.append(Token("DIFFOP", name, start_line, start_column))
                continue
            advance(end - idx)
            kind = "KEYWORD" if text in KEYWORDS else "IDENT"
            tokens.append(Token(kind, text, start_line, start_column))
            continue
        if c in PUNCTUATION:
            advance()
            tokens.append(Token(c, c, start_line, start_column))
            continue
        raise ParseError(f"unexpected character {c!r}", line, column, "remove it")
    tokens.append(Token("EOF", "", line, column))
    return tokens


# syntax tree


@dataclass(frozen=True)
class Number:
    value: int
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Name:
    name: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Jet:
    dependent: str
    variables: Tuple[str, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DiffOp:
    variable: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


Node = Union[Number, Name, Jet, DiffOp, BinOp, Neg, Power]


@dataclass(frozen=True)
class ParamDecl:
    name: str
    nonzero: bool = False


@dataclass(frozen=True)
class Equation:
    lhs: Node
    rhs: Node
    leading: Optional[Jet] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class VFieldDecl:
    name: str
    expr: Node
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Option:
    name: str
    value: int


@dataclass(frozen=True)
class SourceSpec:
    independents: Tuple[str, ...] = ()
    dependents: Tuple[str, ...] = ()
    params: Tuple[ParamDecl, ...] = ()
    equations: Tuple[Equation, ...] = ()
    vfields: Tuple[VFieldDecl, ...] = ()
    options: Tuple[Option, ...] = ()

    def option(self, name: str) -> Optional[int]:
        for opt in self.options:
            if opt.name == name:
                return opt.value
        return None


# parser


class Parser:
    def __init__(self, source: str, declared: Optional[Dict[str, str]] = None):
        self.tokens = tokenize(source)
        self.pos = 0
        self.kinds: Dict[str, str] = dict(declared or {})
        self.in_vfield = False

    @property
    def token(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, kind: str, text: Optional[str] = None) -> bool:
        tok = self.token
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: Optional[str] = None) -> Optional[Token]:
        if self.peek(kind, text):
            tok = self.token
            self.pos += 1
            return tok
        return None

    def expect(self, kind: str, text: Optional[str] = None, hint: Optional[str] = None) -> Token:
        tok = self.accept(kind, text)
        if tok is None:
            wanted = text or kind.lower()
            found = self.token.text or "end of input"
            raise self.error(f"expected {wanted}, found {found!r}", hint)
        return tok

    def error(self, message: str, hint: Optional[str] = None, token: Optional[Token] = None) -> ParseError:
        tok = token or self.token
        return ParseError(message, tok.line, tok.column, hint)

    # statements

    def parse(self) -> SourceSpec:
        independents: List[str] = []
        dependents: List[str] = []
        params: List[ParamDecl] = []
        equations: List[Equation] = []
        vfields: List[VFieldDecl] = []
        options: List[Option] = []
        while not self.peek("EOF"):
            tok = self.expect("KEYWORD", hint="statements start with a keyword such as 'eq'")
            if tok.text == "independent":
                independents.extend(self._declare("independent"))
            elif tok.text == "dependent":
                dependents.extend(self._declare("dependent"))
            elif tok.text == "param":
                names = self._declare("param")
                nonzero = bool(self.accept("KEYWORD", "nonzero"))
                params.extend(ParamDecl(n, nonzero) for n in names)
            elif tok.text == "eq":
                equations.append(self._equation(tok))
            elif tok.text == "vfield":
                vfields.append(self._vfield(tok))
            elif tok.text == "option":
                options.append(self._option(options))
            else:
                raise self.error(f"'{tok.text}' cannot start a statement", token=tok)
            self.expect(";", hint="terminate statements with ';'")
        return SourceSpec(
            tuple(independents),
            tuple(dependents),
            tuple(params),
            tuple(equations),
            tuple(vfields),
            tuple(options),
        )

    def _declare(self, kind: str) -> List[str]:
        names = []
        while self.peek("IDENT"):
            tok = self.accept("IDENT")
            self._bind(tok, kind)
            names.append(tok.text)
        if not names:
            raise self.error(f"'{kind}' needs at least one name")
        return names

    def _bind(self, tok: Token, kind: str) -> None:
        if tok.text == "D":
            raise self.error("'D' is reserved for derivatives", token=tok)
        if tok.text in self.kinds:
            raise self.error(
                f"'{tok.text}' is already declared as {self.kinds[tok.text]}",
                "pick another name",
                tok,
            )
        self.kinds[tok.text] = kind

    def _equation(self, start: Token) -> Equation:
        lhs = self.expression()
        self.expect("=", hint="equations read 'eq <expr> = <expr>;'")
        rhs = self.expression()
        leading = None
        if self.accept("KEYWORD", "leading"):
            if not self.peek("IDENT", "D"):
                raise self.error("'leading' must name a derivative", "write leading D(U,y,y)")
            leading = self._jet()
        return Equation(lhs, rhs, leading, start.line)

    def _vfield(self, start: Token) -> VFieldDecl:
        tok = self.expect("IDENT", hint="vfield <name> = <expr>;")
        self._bind(tok, "vfield")
        self.expect("=")
        self.in_vfield = True
        try:
            expr = self.expression()
        finally:
            self.in_vfield = False
        return VFieldDecl(tok.text, expr, start.line)

    def _option(self, seen: List[Option]) -> Option:
        tok = self.expect("IDENT", hint=f"options: {', '.join(OPTIONS)}")
        if tok.text not in OPTIONS:
            raise self.error(f"unknown option '{tok.text}'", f"options: {', '.join(OPTIONS)}", tok)
        if any(o.name == tok.text for o in seen):
            raise self.error(f"option '{tok.text}' is set twice", token=tok)
        value = self.expect("NUMBER", hint="option values are integers")
        return Option(tok.text, int(value.text))

    # expressions

    def expression(self) -> Node:
        node = self._term()
        while self.peek("+") or self.peek("-"):
            tok = self.accept(self.token.kind)
            node = BinOp(tok.text, node, self._term(), tok.line, tok.column)
        return node

    def _term(self) -> Node:
        node = self._unary()
        while self.peek("*") or self.peek("/"):
            tok = self.accept(self.token.kind)
            node = BinOp(tok.text, node, self._unary(), tok.line, tok.column)
        return node

    def _unary(self) -> Node:
        tok = self.accept("-")
        if tok:
            return Neg(self._unary(), tok.line, tok.column)
        return self._power()

    def _power(self) -> Node:
        base = self._primary()
        tok = self.accept("^")
        if tok:
            exponent = self.expect("NUMBER", hint="exponents are non-negative integers")
            return Power(base, int(exponent.text), tok.line, tok.column)
        return base

    def _primary(self) -> Node:
        tok = self.token
        if self.accept("NUMBER"):
            return Number(int(tok.text), tok.line, tok.column)
        if self.peek("IDENT", "D"):
            return self._jet()
        if self.accept("IDENT"):
            kind = self.kinds.get(tok.text)
            if kind is None:
                raise self.error(f"'{tok.text}' is not declared", "declare it before use", tok)
            if kind == "vfield":
                raise self.error(f"vector field '{tok.text}' cannot appear in an expression", token=tok)
            return Name(tok.text, tok.line, tok.column)
        if self.accept("DIFFOP"):
            if not self.in_vfield:
                raise self.error("d/dX is only allowed in vfield definitions", token=tok)
            if self.kinds.get(tok.text) not in ("independent", "dependent"):
                raise self.error(
                    f"'{tok.text}' is not an independent or dependent variable", token=tok
                )
            return DiffOp(tok.text, tok.line, tok.column)
        if self.accept("("):
            node = self.expression()
            self.expect(")", hint="unbalanced parenthesis")
            return node
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}", "expected a number, name or D(...)")

    def _jet(self) -> Jet:
        start = self.expect("IDENT", "D")
        self.expect("(", hint="derivatives read D(U,x,y)")
        dep = self.expect("IDENT", hint="first argument is a dependent variable")
        if self.kinds.get(dep.text) != "dependent":
            if dep.text not in self.kinds:
                raise self.error(f"'{dep.text}' is not declared", "declare it before use", dep)
            raise self.error(f"'{dep.text}' is not a dependent variable", token=dep)
        variables = []
        while self.accept(","):
            var = self.expect("IDENT", hint="differentiate by independent variables")
            if self.kinds.get(var.text) != "independent":
                raise self.error(f"'{var.text}' is not an independent variable", token=var)
            variables.append(var.text)
        if not variables:
            raise self.error("derivative needs at least one variable", "write D(U,x)")
        self.expect(")", hint="unbalanced parenthesis")
        return Jet(dep.text, tuple(variables), start.line, start.column)


def parse(source: str) -> SourceSpec:
    return Parser(source).parse()


# lowering


@dataclass
class Model:
    """A parsed file lowered onto the symbolic kernel."""

    spec: SourceSpec
    ctx: Context
    system: PDESystem
    fields: Dict[str, VectorField]
    ansatz_degree: int
    prolong_order: int

    @property
    def field_names(self) -> List[str]:
        return list(self.fields)

    def declared(self) -> Dict[str, str]:
        kinds = {name: "independent" for name in self.spec.independents}
        kinds.update({name: "dependent" for name in self.spec.dependents})
        kinds.update({p.name: "param" for p in self.spec.params})
        return kinds


Fractional = Tuple[Expr, Expr]


def _fail(node, message: str, hint: Optional[str] = None) -> ParseError:
    return ParseError(message, getattr(node, "line", 0), getattr(node, "column", 0), hint)


def _monomial_lcm(a: Expr, b: Expr) -> Expr:
    ((ma, _),) = a.terms.items()
    ((mb, _),) = b.terms.items()
    powers = dict(ma)
    for atom, e in mb:
        powers[atom] = max(powers.get(atom, 0), e)
    return Expr.from_terms([(powers, 1)])


class Lowering:
    def __init__(self, ctx: Context):
        self.ctx = ctx

    def atom(self, node: Union[Name, Jet]):
        if isinstance(node, Jet):
            dep = self.ctx.symbol(node.dependent)
            index = MultiIndex.of([self.ctx.symbol(v) for v in node.variables])
            return JetCoordinate(dep, index)
        return self.ctx.symbol(node.name)

    def fraction(self, node: Node) -> Fractional:
        """numerator / denominator with a monic nonzero parameter monomial as denominator."""
        if isinstance(node, Number):
            return Expr.constant(node.value), ONE
        if isinstance(node, (Name, Jet)):
            return Expr.atom(self.atom(node)), ONE
        if isinstance(node, Neg):
            n, d = self.fraction(node.operand)
            return -n, d
        if isinstance(node, Power):
            n, d = self.fraction(node.base)
            return n**node.exponent, d**node.exponent
        if isinstance(node, DiffOp):
            raise _fail(node, "d/dX is only allowed in vfield definitions")
        if node.op in "+-":
            ln, ld = self.fraction(node.left)
            rn, rd = self.fraction(node.right)
            common = _monomial_lcm(ld, rd)
            lscale = _quotient(common, ld)
            rscale = _quotient(common, rd)
            if node.op == "+":
                return ln * lscale + rn * rscale, common
            return ln * lscale - rn * rscale, common
        if node.op == "*":
            ln, ld = self.fraction(node.left)
            rn, rd = self.fraction(node.right)
            return ln * rn, ld * rd
        ln, ld = self.fraction(node.left)
        coeff, monomial = self.divisor(node.right)
        return ln * (1 / coeff), ld * monomial

    def divisor(self, node: Node) -> Tuple[Fraction, Expr]:
        n, d = self.fraction(node)
        if d != ONE or len(n.terms) != 1:
            raise _fail(node, "division is only by numbers and nonzero parameters", "multiply through instead")
        ((monomial, coeff),) = n.terms.items()
        for atom, _ in monomial:
            if not (isinstance(atom, Symbol) and atom.kind == SymbolKind.PARAMETER and self.ctx.is_nonzero(atom)):
                raise _fail(
                    node,
                    f"cannot divide by '{atom}'",
                    "declare the parameter with 'nonzero'",
                )
        return coeff, Expr({monomial: 1})

    def equation(self, eq: Equation) -> Expr:
        n, _ = self.fraction(BinOp("-", eq.lhs, eq.rhs, eq.line, 0))
        if n.is_zero:
            raise ParseError("equation is trivially satisfied", eq.line, 1, "remove it")
        return n

    def field(self, node: Node) -> Dict[Symbol, Expr]:
        """A linear combination of d/dX with polynomial coefficients."""
        if isinstance(node, DiffOp):
            return {self.ctx.symbol(node.variable): ONE}
        if isinstance(node, Neg):
            return {k: -v for k, v in self.field(node.operand).items()}
        if isinstance(node, BinOp) and node.op in "+-":
            left = self.field(node.left)
            right = self.field(node.right)
            sign = 1 if node.op == "+" else -1
            for k, v in right.items():
                left[k] = left.get(k, Expr()) + v * sign
            return left
        if isinstance(node, BinOp) and node.op == "*":
            left_field = _has_diffop(node.left)
            right_field = _has_diffop(node.right)
            if left_field and right_field:
                raise _fail(node, "product of two derivative operators")
            if left_field or right_field:
                vec, scalar = (node.left, node.right) if left_field else (node.right, node.left)
                factor = self.scalar(scalar)
                return {k: v * factor for k, v in self.field(vec).items()}
        if isinstance(node, BinOp) and node.op == "/" and _has_diffop(node.left):
            coeff, monomial = self.divisor(node.right)
            if monomial != ONE:
                raise _fail(node.right, "vector field coefficients must be polynomial")
            return {k: v * (1 / coeff) for k, v in self.field(node.left).items()}
        raise _fail(node, "expected a combination of d/dX terms", "write e.g. T * d/dT")

    def scalar(self, node: Node) -> Expr:
        n, d = self.fraction(node)
        if d != ONE:
            raise _fail(node, "vector field coefficients must be polynomial")
        return n


def _quotient(common: Expr, part: Expr) -> Expr:
    ((mc, _),) = common.terms.items()
    ((mp, _),) = part.terms.items()
    powers = dict(mc)
    for atom, e in mp:
        powers[atom] -= e
    return Expr.from_terms([(powers, 1)])


def _has_diffop(node: Node) -> bool:
    if isinstance(node, DiffOp):
        return True
    if isinstance(node, BinOp):
        return _has_diffop(node.left) or _has_diffop(node.right)
    if isinstance(node, (Neg, Power)):
        return _has_diffop(node.operand if isinstance(node, Neg) else node.base)
    return False


def build_context(spec: SourceSpec) -> Context:
    ctx = Context()
    for name in spec.independents:
        ctx.declare(name, SymbolKind.INDEPENDENT)
    for name in spec.dependents:
        ctx.declare(name, SymbolKind.DEPENDENT)
    for param in spec.params:
        ctx.declare(param.name, SymbolKind.PARAMETER, param.nonzero)
    return ctx


def first_set(*values: Optional[int]) -> int:
    """First value that is not None; 0 counts as set."""
    return next(v for v in values if v is not None)


def lower(
    spec: SourceSpec,
    ansatz_degree: Optional[int] = None,
    prolong_order: Optional[int] = None,
) -> Model:
    """Lower a parsed file; explicit arguments override file options, which override config."""
    if not spec.independents or not spec.dependents:
        raise ParseError("at least one independent and one dependent variable are required", 1, 1)
    if not spec.equations:
        raise ParseError("no equations given", 1, 1, "add 'eq <expr> = <expr>;'")
    degree = first_set(ansatz_degree, spec.option("ansatz_degree"), config.ansatz_degree)
    order = first_set(prolong_order, spec.option("prolong_order"), config.prolong_order)
    ctx = build_context(spec)
    lowering = Lowering(ctx)
    equations = [lowering.equation(eq) for eq in spec.equations]
    leading = [lowering.atom(eq.leading) if eq.leading else None for eq in spec.equations]
    system = solved_forms(ctx, equations, leading, order)
    fields = {
        decl.name: VectorField.from_context(ctx, lowering.field(decl.expr))
        for decl in spec.vfields
    }
    for v in fields.values():
        v.validate_point()
    logger.debug("lowered %d equations and %d fields", len(equations), len(fields))
    return Model(spec, ctx, system, fields, degree, order)


def load(source: str, **overrides) -> Model:
    return lower(parse(source), **overrides)


def parse_field(model: Model, text: str) -> VectorField:
    """An inline vector field such as ``T * d/dT`` over a model's variables."""
    parser = Parser(text, model.declared())
    parser.in_vfield = True
    node = parser.expression()
    parser.expect("EOF", hint="a single vector field expression is expected")
    v = VectorField.from_context(model.ctx, Lowering(model.ctx).field(node))
    v.validate_point()
    return v
