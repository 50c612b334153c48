"""Finite models of measurable categories and 2-group representation theory."""

from .surd import InexactSum, Surd
from .measure_core import FiniteMeasure, FiniteSpace, MeasureFamily
from .two_group import CrossedModule, FiniteAbelian, FiniteGroup, SkeletalTwoGroup
from .meas2cat import MatrixFunctor, MatrixNatTrans
from .rep_theory import Intertwiner, Representation, TwoIntertwiner

__version__ = "0.1.0"

__all__ = [
    "InexactSum", "Surd", "FiniteMeasure", "FiniteSpace", "MeasureFamily", "CrossedModule", "FiniteAbelian",
    "FiniteGroup", "SkeletalTwoGroup", "MatrixFunctor", "MatrixNatTrans", "Intertwiner", "Representation",
    "TwoIntertwiner",
]
