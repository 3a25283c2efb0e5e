"""Interference package."""
