"""Method x format evaluation matrix and reports."""
