"""Alphabet structures and their decision oracles."""
from .base import Theory, decide, evaluate, mintermize, project, witness
from .finite import FiniteStructure, binary_structure
from .nat import NatOrderStructure
from .thyfile import builtin_theory, format_thy, parse_thy, read_thy

__all__ = [
    "Theory", "FiniteStructure", "NatOrderStructure", "binary_structure",
    "decide", "evaluate", "project", "mintermize", "witness",
    "parse_thy", "read_thy", "format_thy", "builtin_theory",
]
