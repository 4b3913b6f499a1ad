import logging
import math
from typing import Optional, Tuple

import numpy as np

from ..geometry.domains import ConvexDomain
from ..kernels.lower import LowerBoundSymbol
from ..kernels.pair import KernelPair
from .upper import BoundsError, upper_bound_homogeneous

logger = logging.getLogger("RieszBounds.Bounds")


def second_term_coefficient(d: int, alpha: float, domain_measure: float, gamma: float) -> float:
    """(|Ω|/(2π)^d)·γ/(d-α-1)"""
    if not (0.0 < alpha < d - 1):
        raise BoundsError(f"下界需要 0 < α < d-1: α={alpha}, d={d}")
    return domain_measure / (2.0 * math.pi) ** d * gamma / (d - alpha - 1.0)


def lower_bound_two_term(kernel: KernelPair, domain: ConvexDomain, ls: LowerBoundSymbol, lam,
                         sphere_order: Optional[int] = None) -> Tuple[object, object]:
    """两项下界 (leading, second)；leading 与 upper_bound_homogeneous 相同"""
    if not domain.strictly_convex_smooth:
        raise BoundsError(f"下界要求严格凸光滑区域，{domain.kind} 不满足")
    d, alpha = kernel.dimension, kernel.alpha
    if domain.dimension != d:
        raise BoundsError(f"区域维数 {domain.dimension} 与核维数 {d} 不一致")
    coef = second_term_coefficient(d, alpha, domain.measure, ls.gamma)
    leading = upper_bound_homogeneous(kernel, domain.measure, lam, sphere_order)
    second = coef * np.asarray(lam, dtype=float) ** (1.0 - (d - 1.0) / alpha)
    return leading, (float(second) if np.ndim(second) == 0 else second)


def second_term_ratio(empirical, leading, lam, d: int, alpha: float):
    """(empirical - leading)/λ^{1-(d-1)/α}，与 second_term_coefficient 比较"""
    lam = np.asarray(lam, dtype=float)
    ratio = (np.asarray(empirical, dtype=float) - np.asarray(leading, dtype=float)) \
        / lam ** (1.0 - (d - 1.0) / alpha)
    return float(ratio) if ratio.ndim == 0 else ratio
