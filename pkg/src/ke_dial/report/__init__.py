"""Report emission."""
