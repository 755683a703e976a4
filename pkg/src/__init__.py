"""boselab: computational checks for the Bose representation of PG(2,q^3)."""

__version__ = "0.1.0"
