"""Scattering residues and resonances for warped asymptotically hyperbolic metrics."""

__version__ = "0.1.0"
