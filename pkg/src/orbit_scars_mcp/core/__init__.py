"""Numerics: MPS, lattice models, embedding conditions, dynamics and Floquet analysis."""
