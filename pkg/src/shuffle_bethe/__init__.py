"""Exact computations in gl(m|n) shuffle algebras and their Bethe subalgebras."""

__version__ = "0.1.0"

from .bethe import EpsN, G, Gstar, dim_R, dims_table, eval_G, eval_G_series
from .shuffle import Generator, ShuffleElement, Unit, evaluate, explicit
from .signature import AlgebraSignature, ParamPoint, sample_generic_point

__all__ = [
    "AlgebraSignature",
    "EpsN",
    "G",
    "Generator",
    "Gstar",
    "ParamPoint",
    "ShuffleElement",
    "Unit",
    "dim_R",
    "dims_table",
    "eval_G",
    "eval_G_series",
    "evaluate",
    "explicit",
    "sample_generic_point",
]
