"""单位球面测度与球面求积节点"""
import math
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma

# 默认阶数：S¹ 上 32 点梯形，S² 上 10(极角 Gauss) × 11(方位梯形) = 110 点
DEFAULT_S1_POINTS = 32
DEFAULT_S2_ORDER = 10


def sphere_area(d: int) -> float:
    """|S^{d-1}| = 2π^{d/2}/Γ(d/2)"""
    if d < 1:
        raise ValueError(f"维数必须 >= 1: {d}")
    return 2.0 * math.pi ** (d / 2.0) / float(gamma(d / 2.0))


def ball_volume(d: int, radius: float = 1.0) -> float:
    """d 维球体积 |S^{d-1}| R^d / d"""
    return sphere_area(d) * radius ** d / d


def sphere_nodes(d: int, order: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """返回 S^{d-1} 上的求积节点 (m, d) 与权重 (m,)，权重之和为 |S^{d-1}|

    d=1: S⁰ = {-1, +1}，计数测度
    d=2: 等距梯形，对三角多项式精确
    d=3: cosθ 方向 Gauss-Legendre × 方位角梯形（order+1 个点）
    """
    if d == 1:
        return np.array([[-1.0], [1.0]]), np.ones(2)

    if d == 2:
        n = order or DEFAULT_S1_POINTS
        theta = 2.0 * np.pi * np.arange(n) / n
        points = np.column_stack([np.cos(theta), np.sin(theta)])
        return points, np.full(n, 2.0 * np.pi / n)

    if d == 3:
        n = order or DEFAULT_S2_ORDER
        x, w = leggauss(n)
        m = n + 1
        phi = 2.0 * np.pi * np.arange(m) / m
        cos_t = np.repeat(x, m)
        sin_t = np.sqrt(np.clip(1.0 - cos_t ** 2, 0.0, None))
        phis = np.tile(phi, n)
        points = np.column_stack([sin_t * np.cos(phis), sin_t * np.sin(phis), cos_t])
        weights = np.repeat(w, m) * (2.0 * np.pi / m)
        return points, weights

    raise ValueError(f"球面求积只支持 d <= 3，当前 d={d}")


def normalize(vectors: np.ndarray) -> np.ndarray:
    """按行归一化"""
    v = np.atleast_2d(np.asarray(vectors, dtype=float))
    norms = np.linalg.norm(v, axis=1)
    if np.any(norms == 0):
        raise ValueError("零向量无法归一化")
    return v / norms[:, None]
