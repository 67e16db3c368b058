"""Desk-scale conformer-enhanced audio-visual HuBERT stack."""

__version__ = "0.1.0"
