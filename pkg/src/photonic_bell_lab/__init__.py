"""Weak-field homodyne Bell tests: Fock-space oracle, closed forms, local
hidden-variable models and Bell-inequality analysis."""

__version__ = "0.1.0"
