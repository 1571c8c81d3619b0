"""Simulator and verifier for N-path wave-particle duality games."""

__version__ = "0.1.0"
