import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
import scipy.linalg

from .mesh import SpectralError

logger = logging.getLogger("RieszBounds.Spectral")

DEFAULT_NULL_RATIO = 1e-10
FAMILIES = ("both", "positive", "negative")


@dataclass(frozen=True, eq=False)
class DiscreteSpectrum:
    """带符号的 Ritz 值，按 |λ| 降序；null_mask 标记数值零特征值"""
    eigenvalues: np.ndarray
    null_mask: np.ndarray
    null_threshold: float
    mesh_info: Dict[str, object] = field(default_factory=dict)
    kernel_info: Dict[str, object] = field(default_factory=dict)

    @property
    def retained(self) -> np.ndarray:
        return self.eigenvalues[~self.null_mask]

    @property
    def positive_count(self) -> int:
        return int(np.count_nonzero(self.retained > 0))

    @property
    def negative_count(self) -> int:
        return int(np.count_nonzero(self.retained < 0))

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.eigenvalues))) if self.eigenvalues.size else 0.0

    @property
    def trace(self) -> float:
        return float(np.sum(self.eigenvalues))

    def metadata(self) -> Dict[str, object]:
        return {
            "size": int(self.eigenvalues.size),
            "positive_count": self.positive_count,
            "negative_count": self.negative_count,
            "null_count": int(np.count_nonzero(self.null_mask)),
            "null_threshold": self.null_threshold,
            "max_abs": self.max_abs,
            "mesh": self.mesh_info,
            "kernel": self.kernel_info,
        }


def eigenvalues(matrix: np.ndarray, mesh_info: Optional[Dict[str, object]] = None,
                kernel_info: Optional[Dict[str, object]] = None,
                null_ratio: float = DEFAULT_NULL_RATIO, symmetry_tol: float = 1e-12) -> DiscreteSpectrum:
    """对称矩阵的全谱分解"""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SpectralError(f"需要方阵，得到形状 {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if a.size and float(np.max(np.abs(a - a.T))) > symmetry_tol * max(scale, 1.0):
        raise SpectralError("矩阵不对称")

    try:
        w = scipy.linalg.eigh(a, eigvals_only=True)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise SpectralError(f"特征值求解失败: {e}") from e

    w = w[np.argsort(-np.abs(w), kind="stable")]
    threshold = null_ratio * (float(np.max(np.abs(w))) if w.size else 0.0)
    null_mask = np.abs(w) < threshold
    spec = DiscreteSpectrum(eigenvalues=w, null_mask=null_mask, null_threshold=threshold,
                            mesh_info=dict(mesh_info or {}), kernel_info=dict(kernel_info or {}))
    logger.info(f"特征值: {w.size} 个, 正 {spec.positive_count}, 负 {spec.negative_count}, "
                f"数值零 {int(np.count_nonzero(null_mask))}, |λ|_max={spec.max_abs:.6g}")
    return spec


def _family(spec: DiscreteSpectrum, family: str) -> np.ndarray:
    values = spec.retained
    if family == "both":
        return np.abs(values)
    if family == "positive":
        return values[values > 0]
    if family == "negative":
        return -values[values < 0]
    raise SpectralError(f"未知的特征值族: {family}，可选 {FAMILIES}")


def riesz_mean(spec: DiscreteSpectrum, lam, family: str = "both"):
    """Σ(|λ_k| - λ)₊；lam 可以是数组"""
    values = _family(spec, family)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    sums = np.maximum(values[None, :] - lam_arr[:, None], 0.0).sum(axis=1)
    return float(sums[0]) if np.ndim(lam) == 0 else sums


def counting(spec: DiscreteSpectrum, lam):
    """n(λ) = #{k: λ_k > λ}（仅正特征值）"""
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam_arr <= 0):
        raise SpectralError(f"计数函数需要 λ > 0: {lam}")
    positive = np.sort(spec.retained[spec.retained > 0])
    counts = positive.size - np.searchsorted(positive, lam_arr, side="right")
    return int(counts[0]) if np.ndim(lam) == 0 else counts


def convergence_order(coarse: float, medium: float, fine: float, ratio: float = 2.0) -> float:
    """三层网格（步长比 ratio）上的经验收敛阶 log(|v1-v2|/|v2-v3|)/log(ratio)"""
    d1, d2 = abs(coarse - medium), abs(medium - fine)
    if d1 == 0 or d2 == 0:
        raise SpectralError("相邻层差为零，无法估计收敛阶")
    return math.log(d1 / d2) / math.log(ratio)


def richardson(medium: float, fine: float, order: float, ratio: float = 2.0) -> float:
    """由两层结果外推 h→0 的极限"""
    factor = ratio ** order
    return (factor * fine - medium) / (factor - 1.0)
