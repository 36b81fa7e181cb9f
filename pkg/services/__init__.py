"""Services package for the worldline backreaction simulator."""
