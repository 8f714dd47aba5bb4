"""Fermionic linear optics toolkit: compilation, exact amplitudes and sampling,
anticoncentration combinatorics, Cayley-path interpolation, and tomography."""

__version__ = "0.1.0"
