"""
opencarnot - Numerical sub-Riemannian geometry on step-two Carnot groups
and the Engel and Martinet models
"""

__version__ = "0.1.0"
