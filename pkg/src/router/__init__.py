"""Format-aware routing of documents to extraction methods."""
