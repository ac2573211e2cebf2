"""Resonance expansions of cosine/sine operator families for 1-D wave
equations with compactly supported (possibly complex or matrix-valued)
potentials and delta interactions."""

__version__ = "0.1.0"
