"""Executable kernel for the relativized Howard-Bachmann notation system theta(X),
Q-deduction-chain search trees, and the bound calculus of the infinitary system."""

__version__ = "0.1.0"
