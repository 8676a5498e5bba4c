"""Adaptive 3D triangle-mesh steganography with feature-preserving distortion."""

__version__ = "0.1.0"
