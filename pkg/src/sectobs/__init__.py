"""Certificates for genus-2 curves that have points everywhere locally but
no rational divisor class of degree 1."""

__version__ = "0.1.0"
SCHEMA_VERSION = 1
