import math

import numpy as np

from ..geometry.sphere import sphere_area
from .box import DirichletError


def _weyl(d: int, measure: float, nu, power: float):
    if d < 1:
        raise DirichletError(f"维数必须 >= 1: {d}")
    nu = np.asarray(nu, dtype=float)
    if np.any(nu < 0):
        raise DirichletError(f"ν 必须非负: {nu}")
    return (2.0 * math.pi) ** (-d) * measure * sphere_area(d) * nu ** power


def _scalar(value):
    return float(value) if np.ndim(value) == 0 else value


def polya_bound(d: int, measure: float, nu):
    """Weyl 主项 (2π)^{-d}|Ω||S^{d-1}|ν^{d/2}/d（Pólya 猜想的常数）"""
    return _scalar(_weyl(d, measure, nu, d / 2.0) / d)


def semiclassical_bound(d: int, measure: float, nu):
    """由 Riesz 均值的半经典界推出：Pólya 常数乘 ((d+2)/d)^{d/2}"""
    return _scalar(_weyl(d, measure, nu, d / 2.0) / d * ((d + 2.0) / d) ** (d / 2.0))


def pl_bound(d: int, measure: float, nu):
    """经 n(1/ν) 得到的计数界：Pólya 常数乘 (d/(d-2))^{d/2}，仅 d >= 3"""
    if d < 3:
        raise DirichletError(f"该计数界需要 d >= 3: d={d}")
    return _scalar(_weyl(d, measure, nu, d / 2.0) / d * (d / (d - 2.0)) ** (d / 2.0))


def berezin_bound(d: int, measure: float, nu):
    """Σ(ν - ν_k)₊ ≤ (2π)^{-d}|Ω|ν^{1+d/2}·2|S^{d-1}|/(d(d+2))"""
    return _scalar(_weyl(d, measure, nu, 1.0 + d / 2.0) * 2.0 / (d * (d + 2.0)))
