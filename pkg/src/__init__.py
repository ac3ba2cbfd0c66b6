"""copyheavy-extract - format-aware identity extraction pipeline."""

__version__ = "0.1.0"
