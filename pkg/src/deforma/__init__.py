"""Deformation complexes of pasting diagrams of finite linear categories."""

__version__ = "0.1.0"
