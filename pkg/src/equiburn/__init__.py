"""Exact calculator for equivariant Burnside groups of finite group actions.

The package presents the symbol groups attached to finite group actions as
finitely presented abelian groups, computes classes of toric and linear
models, and decides equality and vanishing of those classes with exact
integer certificates.
"""

__version__ = "0.1.0"
