"""Perverse sheaves on ribbon graphs: exact linear algebra, double representations and a fan-sheaf engine."""

__version__ = "0.1.0"
