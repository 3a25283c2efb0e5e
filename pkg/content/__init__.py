"""Content package."""
