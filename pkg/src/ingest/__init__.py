"""Native parsers turning payloads into structured text."""
