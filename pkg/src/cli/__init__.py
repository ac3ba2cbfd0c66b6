"""Command-line entry point for copyheavy-extract."""
