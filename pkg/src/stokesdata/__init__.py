"""Standard linear Stokes data of local Laplace transforms of elementary connections."""

__version__ = "0.1.0"
