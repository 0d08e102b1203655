"""Exact exponential sums attached to cominuscule parabolics."""
