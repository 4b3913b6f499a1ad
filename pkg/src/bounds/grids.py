import logging

import numpy as np

from .upper import BoundsError

logger = logging.getLogger("RieszBounds.Bounds")

LOW_RATIO = 1.0 / 200.0
HIGH_RATIO = 0.5
# 只有最大的这一部分 Ritz 值被视为已收敛
TRUSTED_FRACTION = 0.01


def trusted_floor(magnitudes, fraction: float = TRUSTED_FRACTION) -> float:
    """
    可信 λ 下界：第 ⌊fraction·N⌋+1 大的 |λ_k|

    λ 不低于该值时 n(λ) ≤ fraction·N，计数只涉及离散谱顶端的特征值。
    """
    if not 0.0 <= fraction < 1.0:
        raise BoundsError(f"fraction 必须位于 [0, 1): {fraction}")
    values = np.sort(np.abs(np.asarray(magnitudes, dtype=float)))[::-1]
    m = int(fraction * values.size)
    if fraction == 0.0 or m >= values.size:
        return 0.0
    return float(values[m])


def trusted_lambda_grid(max_abs: float, points: int = 30,
                        low_ratio: float = LOW_RATIO, high_ratio: float = HIGH_RATIO,
                        floor: float = 0.0) -> np.ndarray:
    """[max(λ_max·low_ratio, floor), λ_max·high_ratio] 上的几何网格（升序）"""
    if not max_abs > 0:
        raise BoundsError(f"λ_max 必须为正: {max_abs}")
    if points < 2:
        raise BoundsError(f"网格点数至少为 2: {points}")
    if not (0.0 < low_ratio < high_ratio):
        raise BoundsError(f"需要 0 < low_ratio < high_ratio: {low_ratio}, {high_ratio}")
    if floor < 0:
        raise BoundsError(f"floor 不能为负: {floor}")
    high = max_abs * high_ratio
    low = max(max_abs * low_ratio, floor)
    if low >= high:
        # 网格过粗，可信区间为空
        logger.warning(f"可信下界 {low:.6g} 不低于网格上端 {high:.6g}，改用 {high / 2.0:.6g}")
        low = high / 2.0
    return np.geomspace(low, high, points)
