"""Artificial-noise secrecy for frequency-domain time-reversal SISO OFDM."""

__version__ = "0.1.0"
