"""Database package."""

