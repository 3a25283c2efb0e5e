"""CLI utils package."""
