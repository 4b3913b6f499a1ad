import math
from dataclasses import dataclass
from typing import Dict

import numpy as np
from scipy.special import kv

from .pair import KernelError, riesz_constant


@dataclass(frozen=True)
class HelmholtzSymbol:
    """Q̂(ξ) = 1/(|ξ|² + κ²)：正、径向不增、|ξ|→∞ 时趋于 0"""
    dimension: int
    kappa: float

    def __post_init__(self):
        if self.dimension < 1:
            raise KernelError(f"维数必须 >= 1: {self.dimension}")
        if self.kappa < 0:
            raise KernelError(f"κ 必须非负: {self.kappa}")

    kind = "helmholtz"

    @property
    def supremum(self) -> float:
        return math.inf if self.kappa == 0 else 1.0 / self.kappa ** 2

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return 1.0 / (r * r + self.kappa ** 2)

    def __call__(self, xi):
        arr = np.asarray(xi, dtype=float)
        r = np.linalg.norm(np.atleast_2d(arr), axis=1)
        if self.kappa == 0 and np.any(r == 0):
            raise KernelError("κ=0 时符号在 ξ=0 处奇异")
        values = self.radial(r)
        return float(values[0]) if arr.ndim == 1 else values

    def level_crossing(self, lam: float) -> float:
        """Q̂(r*) = λ 的半径；λ >= sup Q̂ 时正部为空，返回 0"""
        if lam >= self.supremum:
            return 0.0
        return math.sqrt(1.0 / lam - self.kappa ** 2)

    def radial_kernel(self, r):
        """实空间核 Q(r) = (2π)^{-d/2}(κ/r)^{d/2-1}K_{d/2-1}(κr)；κ=0 时退化为 α=2 的 Riesz 核"""
        d = self.dimension
        r = np.asarray(r, dtype=float)
        if self.kappa == 0:
            if d <= 2:
                raise KernelError(f"κ=0 时实空间核需要 d >= 3，当前 d={d}")
            return riesz_constant(d, 2.0) * r ** (2.0 - d)
        nu = d / 2.0 - 1.0
        return (2.0 * np.pi) ** (-d / 2.0) * (self.kappa / r) ** nu * kv(nu, self.kappa * r)

    def kernel(self, x):
        arr = np.asarray(x, dtype=float)
        pts = np.atleast_2d(arr)
        if pts.shape[1] != self.dimension:
            raise KernelError(f"向量维数 {pts.shape[1]} 与核维数 {self.dimension} 不一致")
        r = np.linalg.norm(pts, axis=1)
        if np.any(r == 0):
            raise KernelError("核在原点奇异")
        values = self.radial_kernel(r)
        return float(values[0]) if arr.ndim == 1 else values

    def descriptor(self) -> Dict[str, object]:
        return {"type": self.kind, "dimension": self.dimension, "kappa": self.kappa}


def helmholtz_symbol(d: int, kappa: float) -> HelmholtzSymbol:
    return HelmholtzSymbol(dimension=int(d), kappa=float(kappa))
