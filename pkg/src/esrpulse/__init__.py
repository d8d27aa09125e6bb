"""Pulse-sequence compiler and spin-1/2 ensemble simulator for ESR control."""

__version__ = "0.1.0"
