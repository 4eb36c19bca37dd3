"""Exact workbench for Toeplitz noncommutative tori and their equilibrium states."""
