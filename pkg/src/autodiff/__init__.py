"""
Reverse-mode automatic differentiation on numpy arrays.
"""
from src.autodiff.adam import AdamState, adam_step
from src.autodiff.gradcheck import analytic_gradients, finite_diff_check
from src.autodiff.node import Node

__all__ = ["AdamState", "Node", "adam_step", "analytic_gradients", "finite_diff_check"]
