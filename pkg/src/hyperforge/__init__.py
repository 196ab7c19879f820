"""Finite hyperrings, hyperfields and their geometries."""
