"""Exact verification engine for 2-crossed modules, their Gray 3-groupoids,
quotient cat²-group algebras and right regular representations."""

__version__ = "0.1.0"
