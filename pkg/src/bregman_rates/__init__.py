"""
bregman-rates - convex Tikhonov regularisation with Bregman-distance rate checks.

Synthesizes solutions satisfying fractional source conditions, solves the
regularised problems with dual certificates, and fits error-decay slopes
against the predicted convergence rates.
"""

__version__ = "0.1.0"
__author__ = "bregman-rates contributors"
__license__ = "MIT"
