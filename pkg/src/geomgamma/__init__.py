"""Geometric multiple elliptic Gamma functions, geometric Bernoulli functions and Shintani zeta values."""

from .bernoulli import (
    ValueAssignment,
    cocycle_sum,
    enum_parallelepiped,
    geometric_bernoulli,
    h0,
    h0_series_oracle,
)
from .exactcore import complement_form, positive_dual_family, standard_relation
from .gammaeval import G_r, G_r_expsum, check_modular, elliptic_gamma, geometric_G, theta
from .numfield import NumberField
from .shintani import RayClassInput, signed_domain, zeta_at_zero

__all__ = [
    "G_r",
    "G_r_expsum",
    "NumberField",
    "RayClassInput",
    "ValueAssignment",
    "check_modular",
    "cocycle_sum",
    "complement_form",
    "elliptic_gamma",
    "enum_parallelepiped",
    "geometric_G",
    "geometric_bernoulli",
    "h0",
    "h0_series_oracle",
    "positive_dual_family",
    "signed_domain",
    "standard_relation",
    "theta",
    "zeta_at_zero",
]

__version__ = "0.1.0"
