"""Tests for the copyheavy command-line entry point."""
