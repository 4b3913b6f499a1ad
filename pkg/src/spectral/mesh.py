import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ..errors import NumericalError
from ..geometry.domains import Box, ConvexDomain

logger = logging.getLogger("RieszBounds.Spectral")

MIN_TARGET_CELLS = 16
DEFAULT_MAX_CELLS = 5000
TARGET_SLACK = 0.2


class SpectralError(NumericalError):
    """网格、组装或特征值计算异常"""
    pass


@dataclass(frozen=True, eq=False)
class Mesh:
    """均匀网格中质心落在 Ω 内的轴对齐单元"""
    centroids: np.ndarray
    index: np.ndarray
    spacing: np.ndarray
    shape: Tuple[int, ...]
    domain_measure: float
    domain_info: Dict[str, object]

    @property
    def dimension(self) -> int:
        return int(self.spacing.size)

    @property
    def size(self) -> int:
        return int(self.centroids.shape[0])

    @property
    def h(self) -> float:
        return float(self.spacing.max())

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def coverage_measure(self) -> float:
        return self.size * self.cell_volume

    @property
    def coverage_deficit(self) -> float:
        """(|Ω| - 覆盖测度)/|Ω|，可以为负（边界单元伸出 Ω）"""
        return (self.domain_measure - self.coverage_measure) / self.domain_measure

    def metadata(self) -> Dict[str, object]:
        return {
            "cells": self.size,
            "h": self.h,
            "spacing": [float(s) for s in self.spacing],
            "grid_shape": list(self.shape),
            "coverage_measure": self.coverage_measure,
            "coverage_deficit": self.coverage_deficit,
            "domain": self.domain_info,
        }


def _grid(domain: ConvexDomain, spacing: np.ndarray, shape: np.ndarray):
    lo, hi = domain.bounding_box()
    center = (lo + hi) / 2.0
    corner = center - shape * spacing / 2.0
    index = np.indices(tuple(int(n) for n in shape)).reshape(len(shape), -1).T
    centroids = corner + (index + 0.5) * spacing
    inside = domain.contains(centroids)
    return index[inside], centroids[inside]


def build_mesh(domain: ConvexDomain, target_cells: int,
               max_cells: int = DEFAULT_MAX_CELLS) -> Mesh:
    """选取步长 h 使落在 Ω 内的单元数接近目标（±20%），结果确定"""
    if target_cells < MIN_TARGET_CELLS:
        raise SpectralError(f"目标单元数必须 >= {MIN_TARGET_CELLS}: {target_cells}")

    d = domain.dimension
    lo, hi = domain.bounding_box()
    extent = hi - lo
    h = (domain.measure / target_cells) ** (1.0 / d)

    def layout(step: float):
        if isinstance(domain, Box):
            # 长方体与网格对齐，单元恰好铺满
            shape = np.maximum(1, np.round(extent / step)).astype(int)
            spacing = extent / shape
        else:
            shape = np.maximum(1, np.ceil(extent / step - 1e-9)).astype(int)
            spacing = np.full(d, step)
        index, centroids = _grid(domain, spacing, shape)
        return spacing, index, centroids

    best = None
    for _ in range(30):
        spacing, index, centroids = layout(h)
        count = len(index)
        if best is None or abs(count - target_cells) < abs(len(best[1]) - target_cells):
            best = (spacing, index, centroids)
        if count == 0:
            h /= 2.0
            continue
        if abs(count - target_cells) <= 0.02 * target_cells:
            break
        h *= (count / target_cells) ** (1.0 / d)
    spacing, index, centroids = best

    count = len(index)
    if count == 0:
        raise SpectralError(f"区域过薄，网格中没有单元 (h={h:.4g})")
    if abs(count - target_cells) > TARGET_SLACK * target_cells:
        raise SpectralError(f"无法使单元数接近目标: 得到 {count}, 目标 {target_cells}")
    if count > max_cells:
        raise SpectralError(f"单元数 {count} 超过上限 {max_cells}")

    # 平移索引使其从 0 开始
    offset = index.min(axis=0)
    index = index - offset
    grid_shape = tuple(int(n) for n in index.max(axis=0) + 1)

    mesh = Mesh(centroids=centroids, index=index, spacing=np.asarray(spacing, dtype=float),
                shape=grid_shape, domain_measure=domain.measure, domain_info=domain.describe())
    logger.info(f"网格: {count} 个单元, h={mesh.h:.5g}, 覆盖亏损 {mesh.coverage_deficit:.3%}")
    return mesh
