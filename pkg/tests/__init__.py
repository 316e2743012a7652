"""Test package for bregman_rates."""
