"""Explicit-state model checker for hierarchical component-interaction automata."""

__version__ = "0.1.0"
