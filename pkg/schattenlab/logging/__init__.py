"""Logging utilities for schattenlab."""

from .modern import ModernLogger

__all__ = ["ModernLogger"]
