"""Numerical core: worldlines, field correlators, dynamics and detectors."""
