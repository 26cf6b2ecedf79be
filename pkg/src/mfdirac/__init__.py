"""Exact verification of Weitzenböck-type identities, eigenvalue bounds and
form hierarchies for multi-form modified Dirac operators."""

__version__ = "0.1.0"
