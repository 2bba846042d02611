"""
weakvalue: exact Stern-Gerlach weak and semiweak measurements

Closed-form Gaussian evolution of spin-1/2 particles through sequences of
Stern-Gerlach stages, compared against the first-order AAV weak-value
prediction, plus a sequential test telling two mixed-state preparations apart.
"""

__version__ = "0.1.0"
__description__ = "Exact Stern-Gerlach weak-measurement toolkit"
