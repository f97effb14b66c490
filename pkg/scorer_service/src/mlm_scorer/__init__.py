"""Masked-language-model scoring service for caption templates."""

__version__ = "0.1.0"
