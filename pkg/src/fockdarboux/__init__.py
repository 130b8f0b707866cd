"""Fock-Darboux oscillators: a charged oscillator in a magnetic field on flat and curved planes."""

__version__ = "0.1.0"
