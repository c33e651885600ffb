"""Exact verification of display map categories on finite categories."""
__version__ = "0.1.0"
