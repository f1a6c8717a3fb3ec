"""Executable layerwise-computable operators on Cantor space.

Exact dyadic interval arithmetic, Martin-Löf tests with measure audits,
a certified Brownian path construction, limit-law verifiers, hitting
times, and the prefix-extension gadgets behind their Weihrauch
classifications, all as stream transducers over :class:`BitStream`.
"""

__version__ = "0.1.0"

from .cantor import BitStream, CylinderUnion, EnumeratedUnion, member, measure, shift
from .dyadic import Dyadic
from .rigor import Interval, Precision, normal_cdf, normal_quantile
from .transducer import OpenNatSet, PrefixExtender

__all__ = [
    "BitStream", "CylinderUnion", "Dyadic", "EnumeratedUnion", "Interval", "OpenNatSet", "Precision",
    "PrefixExtender", "__version__", "measure", "member", "normal_cdf", "normal_quantile", "shift",
]
