import logging
import math
from dataclasses import dataclass
from typing import Dict

import numpy as np
import pandas as pd
import scipy.linalg

from ..geometry.domains import ConvexDomain
from .assembly import Kernel, assemble
from .mesh import DEFAULT_MAX_CELLS, MIN_TARGET_CELLS, SpectralError, build_mesh
from .spectrum import convergence_order, richardson

logger = logging.getLogger("RieszBounds.Spectral")

# 相邻两层的目标单元数之比（2 维中对应步长减半）
LEVEL_FACTOR = 4


@dataclass(frozen=True, eq=False)
class RefinementStudy:
    """一串加密网格上的最大 |λ| 及由此估计的收敛阶"""
    cells: np.ndarray
    h: np.ndarray
    leading: np.ndarray
    order: float
    three_level_order: float
    extrapolated: float

    def to_frame(self) -> pd.DataFrame:
        differences = np.append(np.abs(np.diff(self.leading)), np.nan)
        return pd.DataFrame({
            "level": np.arange(self.cells.size),
            "cells": self.cells,
            "h": self.h,
            "lambda_max": self.leading,
            "difference_to_next": differences,
        })

    def metadata(self) -> Dict[str, object]:
        return {"order": self.order, "three_level_order": self.three_level_order,
                "extrapolated": self.extrapolated}


def leading_eigenvalue(matrix: np.ndarray) -> float:
    """绝对值最大的特征值（带符号）"""
    n = matrix.shape[0]
    top = scipy.linalg.eigh(matrix, eigvals_only=True, subset_by_index=[n - 1, n - 1])[0]
    bottom = scipy.linalg.eigh(matrix, eigvals_only=True, subset_by_index=[0, 0])[0]
    return float(top if abs(top) >= abs(bottom) else bottom)


def _fit_order(h: np.ndarray, values: np.ndarray) -> float:
    """相邻层差 |λ_i - λ_{i+1}| 对 h_i 的双对数最小二乘斜率"""
    differences = np.abs(np.diff(values))
    if np.any(differences == 0):
        raise SpectralError("相邻层差为零，无法估计收敛阶")
    slope, _ = np.polyfit(np.log(h[:-1]), np.log(differences), 1)
    return float(slope)


def refinement_study(domain: ConvexDomain, kernel: Kernel, target_cells: int, levels: int = 3,
                     self_cell_rule: str = "polar", workers: int = 4,
                     max_cells: int = DEFAULT_MAX_CELLS) -> RefinementStudy:
    """
    目标单元数为 target_cells/4^(levels-1), ..., target_cells/4, target_cells 的各层网格上
    计算最大 |λ|，拟合经验收敛阶并做 Richardson 外推
    """
    if levels < 3:
        raise SpectralError(f"收敛阶估计至少需要 3 层网格: {levels}")
    targets = [int(round(target_cells / LEVEL_FACTOR ** (levels - 1 - i))) for i in range(levels)]
    if targets[0] < MIN_TARGET_CELLS:
        raise SpectralError(f"最粗层目标单元数 {targets[0]} 小于 {MIN_TARGET_CELLS}")

    cells, steps, leading = [], [], []
    for target in targets:
        mesh = build_mesh(domain, target, max_cells)
        value = leading_eigenvalue(assemble(mesh, kernel, self_cell_rule, workers))
        logger.debug(f"加密层: {mesh.size} 个单元, h={mesh.h:.4g}, λ_max={value:.10g}")
        cells.append(mesh.size)
        steps.append(mesh.h)
        leading.append(value)
    h = np.asarray(steps)
    values = np.asarray(leading)

    order = _fit_order(h, values)
    try:
        three_level = convergence_order(values[-3], values[-2], values[-1],
                                        ratio=math.sqrt(h[-3] / h[-1]))
    except SpectralError:
        three_level = math.nan
    extrapolated = richardson(values[-2], values[-1], order, ratio=h[-2] / h[-1]) if order > 0 else math.nan
    logger.info(f"加密研究: {levels} 层, 收敛阶 {order:.3f}, 外推 λ_max={extrapolated:.10g}")
    return RefinementStudy(cells=np.asarray(cells), h=h, leading=values, order=order,
                           three_level_order=float(three_level), extrapolated=float(extrapolated))
