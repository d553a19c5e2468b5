"""Geometric, dynamical and total phases of nonstatic coherent and Fock light waves
"""

__version__ = "0.1"
