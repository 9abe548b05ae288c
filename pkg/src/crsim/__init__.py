"""Cross-resonance gate simulation and off-resonant error analysis."""
