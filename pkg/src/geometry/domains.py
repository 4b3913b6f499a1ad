import logging
import math
from abc import ABC, abstractmethod
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import betainc

from ..errors import NumericalError
from .sphere import ball_volume, sphere_area

logger = logging.getLogger("RieszBounds.Geometry")


class GeometryError(NumericalError):
    """区域构造或几何计算异常"""
    pass


class ConvexDomain(ABC):
    """有限测度区域 Ω ⊂ ℝ^d（中心在原点）

    子类提供隶属判断、测度、重叠函数的闭式（若有）以及边界函数 P。
    对象构造后不可变，可在线程间共享只读。
    """

    kind: str = "abstract"
    strictly_convex_smooth: bool = False

    def __init__(self, dimension: int):
        if dimension < 1:
            raise GeometryError(f"维数必须 >= 1: {dimension}")
        self._dimension = int(dimension)

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def centroid(self) -> np.ndarray:
        return np.zeros(self._dimension)

    @property
    @abstractmethod
    def measure(self) -> float:
        ...

    @property
    @abstractmethod
    def inner_diameter(self) -> float:
        """R_Ω：最大内切球直径"""
        ...

    @property
    @abstractmethod
    def diameter(self) -> float:
        ...

    @abstractmethod
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        ...

    @abstractmethod
    def contains(self, points: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def parameters(self) -> Dict[str, object]:
        ...

    def indicator(self, x) -> float:
        return float(self.contains(np.atleast_2d(np.asarray(x, dtype=float)))[0])

    def exact_overlap(self, z: np.ndarray) -> Optional[np.ndarray]:
        """η(z) 的闭式；没有闭式的区域返回 None（由 Monte-Carlo 兜底）"""
        return None

    def exact_boundary_coefficient(self, direction: np.ndarray) -> Optional[float]:
        return None

    def boundary_fn(self, x: np.ndarray) -> np.ndarray:
        """P(x)：∂Ω 上 P=0 且 |∇P|=1，Ω 内部 P>0"""
        raise GeometryError(f"区域类型 {self.kind} 不提供光滑边界函数")

    def describe(self) -> Dict[str, object]:
        return {
            "kind": self.kind,
            "dimension": self.dimension,
            "parameters": self.parameters(),
            "measure": self.measure,
            "inner_diameter": self.inner_diameter,
            "strictly_convex_smooth": self.strictly_convex_smooth,
        }

    def _as_points(self, points) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        if p.shape[1] != self.dimension:
            raise GeometryError(f"点的维数 {p.shape[1]} 与区域维数 {self.dimension} 不一致")
        return p


def lens_volume(d: int, radius: float, distance: np.ndarray) -> np.ndarray:
    """半径 R 的两个球心距为 r 的球的交体积 |B| I_{1-(r/2R)²}((d+1)/2, 1/2)"""
    r = np.abs(np.asarray(distance, dtype=float))
    x = np.clip(1.0 - (r / (2.0 * radius)) ** 2, 0.0, 1.0)
    vol = ball_volume(d, radius) * betainc((d + 1) / 2.0, 0.5, x)
    return np.where(r >= 2.0 * radius, 0.0, vol)


class Ball(ConvexDomain):
    kind = "ball"
    strictly_convex_smooth = True

    def __init__(self, dimension: int, radius: float = 1.0):
        super().__init__(dimension)
        if not radius > 0:
            raise GeometryError(f"半径必须为正: {radius}")
        self.radius = float(radius)

    @property
    def measure(self) -> float:
        return ball_volume(self.dimension, self.radius)

    @property
    def inner_diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def bounding_box(self):
        r = np.full(self.dimension, self.radius)
        return -r, r

    def contains(self, points) -> np.ndarray:
        p = self._as_points(points)
        return np.einsum("ij,ij->i", p, p) < self.radius ** 2

    def parameters(self):
        return {"radius": self.radius}

    def exact_overlap(self, z):
        z = self._as_points(z)
        return lens_volume(self.dimension, self.radius, np.linalg.norm(z, axis=1))

    def exact_boundary_coefficient(self, direction) -> float:
        # A_Ω = -|S^{d-2}| R^{d-1}/(d-1)，与方向无关
        d = self.dimension
        if d == 1:
            return -1.0
        return -sphere_area(d - 1) * self.radius ** (d - 1) / (d - 1)

    def boundary_fn(self, x):
        p = self._as_points(x)
        return (self.radius ** 2 - np.einsum("ij,ij->i", p, p)) / (2.0 * self.radius)


class Ellipsoid(ConvexDomain):
    kind = "ellipsoid"
    strictly_convex_smooth = True

    def __init__(self, semi_axes: Sequence[float]):
        axes = np.asarray(semi_axes, dtype=float)
        super().__init__(axes.size)
        if np.any(axes <= 0):
            raise GeometryError(f"半轴必须为正: {list(axes)}")
        self.semi_axes = axes

    @property
    def measure(self) -> float:
        return ball_volume(self.dimension) * float(np.prod(self.semi_axes))

    @property
    def inner_diameter(self) -> float:
        return 2.0 * float(self.semi_axes.min())

    @property
    def diameter(self) -> float:
        return 2.0 * float(self.semi_axes.max())

    def bounding_box(self):
        return -self.semi_axes.copy(), self.semi_axes.copy()

    def contains(self, points) -> np.ndarray:
        p = self._as_points(points) / self.semi_axes
        return np.einsum("ij,ij->i", p, p) < 1.0

    def parameters(self):
        return {"semi_axes": [float(a) for a in self.semi_axes]}

    def exact_overlap(self, z):
        # 线性映射 x = A y 把单位球映到椭球：η_E(z) = det(A) η_B(A⁻¹z)
        z = self._as_points(z) / self.semi_axes
        det = float(np.prod(self.semi_axes))
        return det * lens_volume(self.dimension, 1.0, np.linalg.norm(z, axis=1))

    def exact_boundary_coefficient(self, direction) -> float:
        theta = np.asarray(direction, dtype=float)
        theta = theta / np.linalg.norm(theta)
        d = self.dimension
        unit = -1.0 if d == 1 else -sphere_area(d - 1) / (d - 1)
        return unit * float(np.prod(self.semi_axes)) * float(np.linalg.norm(theta / self.semi_axes))

    def boundary_fn(self, x):
        # P = (1 - q)/|∇q|，q = Σ x²/a²；边界上 ∇P = -∇q/|∇q|
        p = self._as_points(x)
        q = np.einsum("ij,ij->i", p / self.semi_axes, p / self.semi_axes)
        grad = np.linalg.norm(2.0 * p / self.semi_axes ** 2, axis=1)
        if np.any(grad == 0):
            raise GeometryError("边界函数在中心点无定义")
        return (1.0 - q) / grad


class Box(ConvexDomain):
    """轴对齐长方体，只用于上界实验（有棱角，不满足下界假设）"""

    kind = "box"
    strictly_convex_smooth = False

    def __init__(self, sides: Sequence[float]):
        sides = np.asarray(sides, dtype=float)
        super().__init__(sides.size)
        if np.any(sides <= 0):
            raise GeometryError(f"边长必须为正: {list(sides)}")
        self.sides = sides

    @property
    def measure(self) -> float:
        return float(np.prod(self.sides))

    @property
    def inner_diameter(self) -> float:
        return float(self.sides.min())

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.sides))

    def bounding_box(self):
        return -self.sides / 2.0, self.sides / 2.0

    def contains(self, points) -> np.ndarray:
        p = self._as_points(points)
        return np.all(np.abs(p) < self.sides / 2.0, axis=1)

    def parameters(self):
        return {"sides": [float(s) for s in self.sides]}

    def exact_overlap(self, z):
        z = self._as_points(z)
        return np.prod(np.clip(self.sides - np.abs(z), 0.0, None), axis=1)


def make_domain(kind: str, dimension: int, params: Dict[str, object]) -> ConvexDomain:
    """根据配置构造区域 {kind, dimension, parameters}"""
    kind = (kind or "").lower()
    if kind == "ball":
        return Ball(dimension, float(params.get("radius", 1.0)))
    if kind in ("ellipse", "ellipsoid"):
        axes = list(params.get("semi_axes") or [])
        if len(axes) != dimension:
            raise GeometryError(f"椭球半轴个数 {len(axes)} 与维数 {dimension} 不一致")
        return Ellipsoid(axes)
    if kind == "box":
        sides = list(params.get("sides") or [])
        if len(sides) != dimension:
            raise GeometryError(f"长方体边长个数 {len(sides)} 与维数 {dimension} 不一致")
        return Box(sides)
    raise GeometryError(f"不支持的区域类型: {kind}")


def measure(domain: ConvexDomain) -> float:
    """|Ω|"""
    if not isinstance(domain, ConvexDomain):
        raise GeometryError(f"不支持的区域对象: {type(domain).__name__}")
    value = domain.measure
    if not (math.isfinite(value) and value > 0):
        raise GeometryError(f"区域测度无效: {value}")
    return value
