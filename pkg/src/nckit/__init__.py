"""Linear network coding over acyclic multicast networks, exactly.

The package decides whether a network admits a linear coding scheme over
a given finite field, finds the smallest usable field of a given
characteristic, and computes exact values and lower bounds for the
success probability of random linear coding.  Everything is exact:
field elements are table-backed residue polynomials, probabilities are
rationals, and every expensive quantity is recomputed along an
independent route before it is reported.
"""

__version__ = "0.1.0"
