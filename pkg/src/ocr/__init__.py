"""Simulated and remote OCR lanes."""
