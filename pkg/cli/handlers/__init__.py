"""CLI handlers package."""
