"""
hankel-gm - numerical Hankel transforms, general monotone functions and
weighted/Lorentz norm equivalences.

This package provides Bessel and kernel evaluation, sampled function
representations, weighted Lebesgue and Lorentz norms, general-monotonicity
diagnostics, cutoff maximal operators, a convergence-controlled Hankel
transform and an experiment harness with a command-line front end.
"""

__version__ = "1.0.0"
__author__ = "hankel-gm developers"
