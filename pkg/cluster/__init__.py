"""Cluster package."""
