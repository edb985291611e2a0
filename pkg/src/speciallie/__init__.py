"""Exact computations with free Lie algebras and their special derivations."""

__version__ = "0.1.0"
