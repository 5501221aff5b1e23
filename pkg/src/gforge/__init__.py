"""Twisted tensor products of Koszul AS-regular algebras: resolutions, Ext and Nakayama automorphisms."""

from .kernel import COMPILED

__version__ = "0.1.0"
__all__ = ["COMPILED", "__version__"]
