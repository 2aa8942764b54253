"""Place-space heights, Mahler p-norms and Galois/degree decompositions."""

__version__ = "0.1.0"
