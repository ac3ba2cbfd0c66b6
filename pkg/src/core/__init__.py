"""Shared plumbing: configuration, logging, errors and identity types."""
