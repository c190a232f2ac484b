"""
Transmission Eigenvalue Toolkit
Forward evaluation, transmission eigenvalues and potential reconstruction for
the half-line Schrödinger equation with a compactly supported potential.
"""

__version__ = "0.1.0"
