"""gradedmf: an exact engine for graded matrix factorizations over
polynomial rings, with the companion combinatorics (Hecke algebra,
Robinson-Schensted shapes, MOY graph compilation and braid closure).
"""

__version__ = "0.1.0"
