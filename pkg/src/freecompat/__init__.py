"""Combinatorial free probability over noncrossing partitions, scalar and
amalgamated, with checks of compatibility between a scalar functional and a
conditional expectation."""

__version__ = "0.1.0"
