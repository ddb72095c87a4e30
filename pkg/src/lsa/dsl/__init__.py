from .parser import Model, SourceSpec, load, lower, parse, parse_field
from .render import render, render_expr

__all__ = ["Model", "SourceSpec", "load", "lower", "parse", "parse_field", "render", "render_expr"]
