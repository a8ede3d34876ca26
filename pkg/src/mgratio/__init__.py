"""Mixture-Gamma statistics for products and ratios of products of fading SNRs."""

__version__ = "0.1.0"
