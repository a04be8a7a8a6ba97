"""jetaero: flight dynamics, aerodynamic surrogates and momentum control for a jet-powered humanoid."""

__version__ = "1.0.0"
