"""Channel package."""
