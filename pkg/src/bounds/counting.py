import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from ..geometry.sphere import sphere_area
from ..kernels.pair import KernelPair
from .upper import BoundsError, RadialSymbol, upper_bound_general, upper_bound_homogeneous

logger = logging.getLogger("RieszBounds.Bounds")


def _check_lambda(lam):
    if np.any(np.asarray(lam, dtype=float) <= 0):
        raise BoundsError(f"λ 必须为正: {lam}")


def optimal_tau(kernel: KernelPair, lam):
    """使 riesz_bound(τ)/(λ-τ) 最小的 τ = λ(1-α/d)"""
    return lam * (1.0 - kernel.alpha / kernel.dimension)


def riesz_counting_bound(kernel: KernelPair, domain_measure: float, lam, tau,
                         sphere_order: Optional[int] = None):
    """n(λ) ≤ Σ(λ_k - τ)₊/(λ - τ) ≤ riesz_bound(τ)/(λ - τ)，0 < τ < λ"""
    _check_lambda(lam)
    lam, tau = np.asarray(lam, dtype=float), np.asarray(tau, dtype=float)
    if np.any(tau <= 0) or np.any(tau >= lam):
        raise BoundsError(f"需要 0 < τ < λ: τ={tau}, λ={lam}")
    value = upper_bound_homogeneous(kernel, domain_measure, tau, sphere_order) / (lam - tau)
    return float(value) if np.ndim(value) == 0 else value


def counting_bound(kernel: KernelPair, domain_measure: float, lam,
                   sphere_order: Optional[int] = None):
    """n(λ) 的上界

    球对称核用闭式 (2π)^{-d}λ^{-d/α}|Ω||S^{d-1}|d^{d/α}/(d(d-α)^{d/α})；
    其他核的最优 τ 相同，按 riesz_counting_bound(τ*) 计算。
    """
    d, alpha = kernel.dimension, kernel.alpha
    if not (0.0 < alpha < d):
        raise BoundsError(f"α 必须在 (0, d) 内: α={alpha}, d={d}")
    _check_lambda(lam)
    if not kernel.is_radial:
        return riesz_counting_bound(kernel, domain_measure, lam, optimal_tau(kernel, lam), sphere_order)
    lam = np.asarray(lam, dtype=float)
    value = (2.0 * math.pi) ** (-d) * lam ** (-d / alpha) * domain_measure * sphere_area(d) \
        * d ** (d / alpha) / (d * (d - alpha) ** (d / alpha))
    return float(value) if value.ndim == 0 else value


def tau_scan(kernel: KernelPair, domain_measure: float, lam: float,
             points: int = 400) -> Tuple[np.ndarray, np.ndarray]:
    """τ ∈ (0, λ) 等距网格上的 riesz_bound(τ)/(λ-τ)"""
    taus = np.linspace(0.0, lam, points + 2)[1:-1]
    return taus, riesz_counting_bound(kernel, domain_measure, lam, taus)


def counting_bound_general(symbol: RadialSymbol, domain_measure: float, lam: float) -> Tuple[float, float]:
    """一般径向符号：min_τ upper_bound_general(τ)/(λ-τ)，返回 (bound, τ)"""
    _check_lambda(lam)

    def objective(tau):
        return upper_bound_general(symbol, domain_measure, tau) / (lam - tau)

    result = optimize.minimize_scalar(objective, bounds=(lam * 1e-6, lam * (1.0 - 1e-6)),
                                      method="bounded", options={"xatol": lam * 1e-10})
    if not result.success:
        raise BoundsError(f"τ 优化失败: {result.message}")
    logger.debug(f"counting_bound_general λ={lam:.6g}: τ*={result.x:.6g}, bound={result.fun:.6g}")
    return float(result.fun), float(result.x)
