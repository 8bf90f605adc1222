"""Distributed-MIMO uplink link-level simulator with an EVD-accelerated MMSE-ISDIC receiver."""

__version__ = "0.1.0"
