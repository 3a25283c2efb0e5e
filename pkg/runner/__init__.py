"""Runner package."""
