"""Command-line experiment runner package."""
