"""HTTP service wrapping the exponent toolkit."""

from .app import app

__all__ = ["app"]
