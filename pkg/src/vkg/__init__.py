"""Vlasov-Klein-Gordon toolkit.

Numerical and symbolic machinery for the relativistic Vlasov equation
coupled to a massive scalar field: hyperboloidal slice geometry, the
Poincare vector-field algebra and its complete lifts, commuted-equation
derivation, slice energies, and inequality monitors driven by a
phase-space solver in one and two spatial dimensions.
"""

__version__ = "0.1.0"
