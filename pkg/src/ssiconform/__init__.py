"""Conformance evaluation for decentralized and self-sovereign identity systems."""

__version__ = "0.1.0"
