"""Coupled quantum-dot qubit: Hamiltonians, gate sequences, decoherence and
coherence-budget estimates."""

__version__ = "0.1.0"
