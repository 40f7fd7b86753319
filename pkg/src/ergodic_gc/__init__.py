"""Uniform ergodic theorems for almost additive functions of random fields on Z^d."""

__version__ = "0.1.0"
