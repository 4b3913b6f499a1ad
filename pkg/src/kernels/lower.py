import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from ..geometry.overlap import OverlapExpansion
from ..geometry.sphere import sphere_nodes
from .pair import KernelError, KernelPair, Profile, as_profile

logger = logging.getLogger("RieszBounds.Kernels")


@dataclass(frozen=True, eq=False)
class LowerBoundSymbol:
    """F̂(ξ) = g(ξ̂)/|ξ|^{α+1} 与常数 γ = ∫ sgn(f)|f|^{(d-α-1)/α} g dσ"""
    gamma: float
    source: str
    g: Optional[Profile] = None


def gamma_ratio(d: int, alpha: float) -> float:
    """Γ((α+1)/2)Γ((d-α)/2) / (Γ(α/2)Γ((d-α-1)/2))"""
    return math.exp(gammaln((alpha + 1) / 2.0) + gammaln((d - alpha) / 2.0)
                    - gammaln(alpha / 2.0) - gammaln((d - alpha - 1) / 2.0))


def radial_gamma(d: int, alpha: float, domain_measure: float, a_integral: float) -> float:
    """球对称核的 γ = (2/|Ω|) · gamma_ratio · ∫_{S^{d-1}} A_Ω dσ"""
    if not (0.0 < alpha < d - 1):
        raise KernelError(f"γ 需要 0 < α < d-1: α={alpha}, d={d}")
    return 2.0 / domain_measure * gamma_ratio(d, alpha) * a_integral


def lower_symbol(k: KernelPair, exp: Optional[OverlapExpansion], g=None,
                 sphere_order: Optional[int] = None) -> LowerBoundSymbol:
    """计算下界第二项所需的 γ

    球对称核：由 A_Ω 的球面积分得到（Parseval 推导的闭式）；
    其他核：必须提供 g，按 sgn(f)|f|^{(d-α-1)/α} g 做球面求积。sgn(0) 取 0。
    """
    d, alpha = k.dimension, k.alpha
    if not (alpha < d - 1):
        raise KernelError(f"下界需要 α < d-1: α={alpha}, d={d}")

    g_profile = as_profile(g, d) if g is not None else k.g
    if g_profile is None:
        if not k.is_radial:
            raise KernelError("非球对称核需要外部给出 g")
        if exp is None:
            raise KernelError("缺少 A_Ω 展开")
        value = radial_gamma(d, alpha, exp.measure, exp.integral())
        logger.info(f"γ (球对称, d={d}, α={alpha}) = {value:.12g}")
        return LowerBoundSymbol(gamma=value, source="radial")

    if exp is not None:
        nodes, weights = exp.directions, exp.weights
    else:
        nodes, weights = sphere_nodes(d, sphere_order)
    f = k.symbol_f(nodes)
    integrand = np.sign(f) * np.abs(f) ** ((d - alpha - 1) / alpha) * g_profile(nodes)
    value = float(weights @ integrand)
    if np.any(f == 0):
        logger.warning("符号 f 在部分求积节点为 0，按 sgn(0)=0 处理")
    logger.info(f"γ (给定 g, d={d}, α={alpha}) = {value:.12g}")
    return LowerBoundSymbol(gamma=value, source="custom", g=g_profile)
