"""Folding calculus on marked graphs of finite groups."""

__version__ = "0.1.0"
