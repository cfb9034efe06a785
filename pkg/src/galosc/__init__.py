"""Nonrelativistic Dirac oscillator at spin S: exact spinor algebra, multispinor
reduction and closed-form spectrum with independent numerical checks."""

__version__ = "0.1.0"
