"""Exact engine for the correlators and genus-one free energy of a quartic
matrix model with external field, built on blobbed topological recursion,
with independent combinatorial cross-checks (map counts, ribbon-graph
enumeration).  All arithmetic is exact rational (optionally Gaussian)."""

__version__ = "0.1.0"
