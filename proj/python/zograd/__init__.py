"""Minimax bounds and estimators for zeroth-order gradient estimation."""

from ._zograd import *  # noqa: F401,F403
from ._zograd import BudgetError, DistributionError, LinearDesign, ExtremalFunction

__version__ = "0.1.0"
