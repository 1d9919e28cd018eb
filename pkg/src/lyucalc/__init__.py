"""Exact computation of Lyubeznik numbers via Frobenius actions on double Ext modules."""

__version__ = "0.1.0"
