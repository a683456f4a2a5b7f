"""Individually-private information retrieval with side information (Group-and-Code)."""

__version__ = "0.1.0"
