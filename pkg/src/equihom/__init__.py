"""Equivariant ordinary homology of finite G-CW complexes, exactly over Z."""

__version__ = "0.1.0"
