"""Strict lcc categories as a model of extensional dependent type theory."""
__version__ = "0.1.0"
