import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Union

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from ..errors import NumericalError
from ..geometry.sphere import sphere_area, sphere_nodes
from ..kernels.helmholtz import HelmholtzSymbol
from ..kernels.pair import KernelPair

logger = logging.getLogger("RieszBounds.Bounds")

DEFAULT_EPSREL = 1e-10


class BoundsError(NumericalError):
    """界的参数不满足前提，或数值积分不收敛"""
    pass


def integrate_checked(func, a: float, b: float, epsrel: float = DEFAULT_EPSREL,
                      epsabs: float = 0.0, **kwargs) -> float:
    """scipy.integrate.quad 的包装：QUADPACK 报告异常时抛 BoundsError"""
    result = integrate.quad(func, a, b, epsabs=epsabs, epsrel=epsrel, limit=200,
                            full_output=1, **kwargs)
    if len(result) == 4:
        raise BoundsError(f"数值积分不收敛 [{a:.6g}, {b:.6g}]: {result[3]}")
    return float(result[0])


@dataclass(frozen=True, eq=False)
class TabulatedSymbol:
    """以表值给出的径向递减符号 Q̂(r)，表外（r > radii[-1]）取 0"""
    dimension: int
    radii: np.ndarray
    values: np.ndarray

    kind = "tabulated"

    def __post_init__(self):
        r, v = np.asarray(self.radii, dtype=float), np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.size < 2 or r.shape != v.shape:
            raise BoundsError("表值符号需要等长的一维 radii/values，且至少 2 个节点")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise BoundsError("radii 必须从 0 开始严格递增")
        if np.any(np.diff(v) > 0) or np.any(v < 0):
            raise BoundsError("表值符号必须非负且径向不增")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_interp", PchipInterpolator(r, v, extrapolate=False))

    @property
    def supremum(self) -> float:
        return float(self.values[0])

    def radial(self, r):
        values = self._interp(np.asarray(r, dtype=float))
        return np.nan_to_num(values, nan=0.0)

    def level_crossing(self, lam: float) -> float:
        if lam >= self.supremum:
            return 0.0
        if lam <= self.values[-1]:
            raise BoundsError(f"表值范围不足以覆盖 λ={lam}（表尾值 {self.values[-1]:.6g}）")
        k = int(np.searchsorted(-self.values, -lam, side="left"))
        lo, hi = self.radii[k - 1], self.radii[k]
        return float(optimize.brentq(lambda r: float(self.radial(r)) - lam, lo, hi, xtol=1e-14))

    def descriptor(self) -> Dict[str, object]:
        return {"type": self.kind, "dimension": self.dimension, "nodes": int(self.radii.size)}


RadialSymbol = Union[HelmholtzSymbol, TabulatedSymbol]


def upper_bound_general(symbol: RadialSymbol, domain_measure: float, lam: float,
                        epsrel: float = DEFAULT_EPSREL) -> float:
    """(2π)^{-d}|Ω|·|S^{d-1}|∫_0^{r*}(Q̂(r) - λ) r^{d-1} dr；支集为空时为 0"""
    if lam <= 0:
        raise BoundsError(f"λ 必须为正: {lam}")
    d = symbol.dimension
    if math.isinf(symbol.supremum) and d <= 2:
        raise BoundsError(f"Q̂ 在原点不可积 (κ=0, d={d})，上界发散")
    r_star = symbol.level_crossing(lam)
    if r_star == 0.0:
        return 0.0

    if math.isinf(symbol.supremum):
        # κ=0：(r^{-2} - λ) r^{d-1} = r^{d-3}(1 - λ r²)
        value = integrate_checked(lambda r: r ** (d - 3) * (1.0 - lam * r * r), 0.0, r_star, epsrel)
    else:
        value = integrate_checked(lambda r: (float(symbol.radial(r)) - lam) * r ** (d - 1),
                                  0.0, r_star, epsrel)
    return (2.0 * math.pi) ** (-d) * domain_measure * sphere_area(d) * value


def radial_excess_constant(d: int, alpha: float) -> float:
    """∫(|ξ|^{-α} - 1)₊ dξ = (α/(d(d-α)))|S^{d-1}|"""
    return alpha / (d * (d - alpha)) * sphere_area(d)


def excess_constant(kernel: KernelPair, sphere_order: Optional[int] = None) -> float:
    """∫(|K̂(ξ)| - 1)₊ dξ = (α/(d(d-α)))∫_{S^{d-1}}|f|^{d/α} dσ"""
    d, alpha = kernel.dimension, kernel.alpha
    if kernel.is_radial:
        return radial_excess_constant(d, alpha)
    nodes, weights = sphere_nodes(d, sphere_order)
    f = np.abs(kernel.symbol_f(nodes))
    return alpha / (d * (d - alpha)) * float(weights @ f ** (d / alpha))


def upper_bound_homogeneous(kernel: KernelPair, domain_measure: float, lam,
                            sphere_order: Optional[int] = None):
    """(2π)^{-d}|Ω| λ^{1-d/α} ∫(|K̂| - 1)₊ dξ；lam 可为数组"""
    d, alpha = kernel.dimension, kernel.alpha
    if not (0.0 < alpha < d):
        raise BoundsError(f"α 必须在 (0, d) 内: α={alpha}, d={d}")
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr <= 0):
        raise BoundsError(f"λ 必须为正: {lam}")
    value = (2.0 * math.pi) ** (-d) * domain_measure * excess_constant(kernel, sphere_order) \
        * lam_arr ** (1.0 - d / alpha)
    return float(value) if value.ndim == 0 else value


def symbol_excess_integral(kernel: KernelPair, lam: float = 1.0,
                           sphere_order: Optional[int] = None,
                           epsrel: float = DEFAULT_EPSREL) -> float:
    """直接极坐标求积 ∫(|K̂(ξ)| - λ)₊ dξ，径向用代数权重处理原点奇性"""
    if lam <= 0:
        raise BoundsError(f"λ 必须为正: {lam}")
    d, alpha = kernel.dimension, kernel.alpha
    nodes, weights = sphere_nodes(d, sphere_order)
    f = np.abs(kernel.symbol_f(nodes))
    radial = np.zeros(len(nodes))
    for i, fi in enumerate(f):
        if fi == 0:
            continue
        r_star = (fi / lam) ** (1.0 / alpha)
        # (f r^{-α} - λ) r^{d-1} = r^{d-1-α}(f - λ r^α)
        radial[i] = integrate_checked(lambda r, fi=fi: fi - lam * r ** alpha, 0.0, r_star, epsrel,
                                      weight="alg", wvar=(d - 1.0 - alpha, 0.0))
    return float(weights @ radial)
