"""Worldline backreaction simulator."""
