"""Seeded synthetic corpus generation."""
