"""Polygonal paper Moebius bands."""
