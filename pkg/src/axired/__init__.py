"""Axisymmetric Kaluza-Klein reduction of 3+1 metrics to a 2+1 Einstein-wave-map
system, with symbolic tensor calculus and numerical verification tools."""

__version__ = "0.1.0"
