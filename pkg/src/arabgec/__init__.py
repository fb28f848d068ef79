"""Alignment, error annotation, MLE correction and scoring for Arabic GEC."""

__version__ = "0.1.0"
