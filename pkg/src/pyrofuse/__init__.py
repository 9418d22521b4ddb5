"""Percolated pyrochlore cluster states from 3-qubit resources and probabilistic Bell fusion."""

__version__ = "0.1.0"
