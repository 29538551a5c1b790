"""Discontinuous hybrid neural networks for 1D boundary-value problems."""
