"""Symbolic automata over structures and a chain-logic decision procedure."""
__version__ = "0.1.0"
