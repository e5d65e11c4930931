"""Exact arithmetic for logarithmic Picard groups of number rings with
marked primes, mu_n-torsor classification in the Kummer log flat topology,
and class-group-valued pairings on elliptic curve points.
"""

__version__ = "0.1.0"
