"""The direct, replace and table extraction paradigms."""
