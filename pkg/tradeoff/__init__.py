"""Tradeoff package."""
