"""minksym: Minkowski symmetrization of star-shaped and convex bodies."""

__version__ = "0.1.0"
