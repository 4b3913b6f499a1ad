import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..errors import NumericalError

logger = logging.getLogger("RieszBounds.Dirichlet")

MAX_MODES = 1_000_000
# 枚举上限的相对容差，保证恰好落在 ν_max 上的特征值被包含
CAP_SLACK = 1e-12


class DirichletError(NumericalError):
    """Dirichlet 谱枚举或计数参数异常"""
    pass


@dataclass(frozen=True, eq=False)
class DirichletSpectrum:
    """长方体 Dirichlet Laplace 特征值 ν = π²Σ(m_i/L_i)²（升序，计重数）"""
    sides: Tuple[float, ...]
    nu_max: float
    eigenvalues: np.ndarray
    # 每个坐标方向上下一个模式都已超过 ν_max，即 ν ≤ ν_max 的特征值全部在列
    complete: bool = True

    @property
    def dimension(self) -> int:
        return len(self.sides)

    @property
    def measure(self) -> float:
        return float(np.prod(self.sides))


def box_spectrum(sides: Sequence[float], nu_max: float, max_modes: int = MAX_MODES) -> DirichletSpectrum:
    sides = tuple(float(s) for s in sides)
    if not sides or any(s <= 0 for s in sides):
        raise DirichletError(f"边长必须为正: {sides}")
    first = math.pi ** 2 * sum(1.0 / (s * s) for s in sides)
    if nu_max <= first:
        raise DirichletError(f"ν_max={nu_max} 不大于第一特征值 {first:.6g}")

    # 第 k 维的最大模式数：其他方向取 m=1 时仍不超过上限
    cap = nu_max / math.pi ** 2 * (1.0 + CAP_SLACK)
    inverse = [1.0 / (s * s) for s in sides]
    rest = [sum(inverse) - v for v in inverse]
    bounds = [int(math.floor(s * math.sqrt(max(cap - r, 0.0)))) for s, r in zip(sides, rest)]
    complete = all(((m + 1) / s) ** 2 + r > cap for s, m, r in zip(sides, bounds, rest))
    if not complete:
        logger.warning(f"Dirichlet 枚举边界不足，计数可能偏小: {bounds}")
    total = math.prod(bounds)
    if total > max_modes:
        raise DirichletError(f"枚举规模 {total} 超过上限 {max_modes}")

    # 逐维累加 Σ(m_i/L_i)²，只保留不超过上限的部分和
    partial = np.zeros(1)
    for s, m_max in zip(sides, bounds):
        terms = (np.arange(1, m_max + 1) / s) ** 2
        partial = (partial[:, None] + terms[None, :]).ravel()
        partial = partial[partial <= cap]
    values = np.sort(np.pi ** 2 * partial)
    logger.info(f"Dirichlet 谱: 边长 {sides}, ν_max={nu_max:.6g}, 共 {values.size} 个特征值")
    return DirichletSpectrum(sides=sides, nu_max=float(nu_max), eigenvalues=values, complete=complete)


def _check_complete(spec: DirichletSpectrum):
    if not spec.complete:
        raise DirichletError(f"Dirichlet 谱在 ν_max={spec.nu_max} 以下不完整")


def counting_function(spec: DirichletSpectrum, nu):
    """N(ν) = #{k: ν_k < ν}（严格不等号）"""
    _check_complete(spec)
    nu_arr = np.atleast_1d(np.asarray(nu, dtype=float))
    if np.any(nu_arr > spec.nu_max * (1.0 + CAP_SLACK)):
        raise DirichletError(f"ν 超出枚举上限 {spec.nu_max}")
    counts = np.searchsorted(spec.eigenvalues, nu_arr, side="left")
    return int(counts[0]) if np.ndim(nu) == 0 else counts


def riesz_mean(spec: DirichletSpectrum, nu):
    """Σ(ν - ν_k)₊"""
    _check_complete(spec)
    nu_arr = np.atleast_1d(np.asarray(nu, dtype=float))
    if np.any(nu_arr > spec.nu_max * (1.0 + CAP_SLACK)):
        raise DirichletError(f"ν 超出枚举上限 {spec.nu_max}")
    sums = np.maximum(nu_arr[:, None] - spec.eigenvalues[None, :], 0.0).sum(axis=1)
    return float(sums[0]) if np.ndim(nu) == 0 else sums

