"""Weighted graphs, standing assumptions, generators and the JSON store."""
