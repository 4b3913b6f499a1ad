import concurrent.futures
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .domains import ConvexDomain, GeometryError
from .sphere import normalize, sphere_nodes

logger = logging.getLogger("RieszBounds.Geometry")

DEFAULT_MC_SAMPLES = 1_000_000
DEFAULT_SEED = 12345
MC_SHARDS = 8
MC_CHUNK = 1 << 16
DEFAULT_FD_TOLERANCE = 1e-3


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    stderr: float
    samples: int
    seed: int


@dataclass(frozen=True)
class BoundaryCoefficient:
    value: float
    error: float
    method: str


@dataclass(frozen=True, eq=False)
class OverlapExpansion:
    """η(rθ) = |Ω| + r A_Ω(θ) + r² B_Ω(r, θ) 的前两项

    a_samples 与 directions 逐行对应，weights 为球面求积权重。
    """
    measure: float
    directions: np.ndarray
    weights: np.ndarray
    a_samples: np.ndarray
    errors: np.ndarray
    r_max: float

    def integral(self) -> float:
        """∫_{S^{d-1}} A_Ω dσ"""
        return float(np.dot(self.weights, self.a_samples))

    def first_order(self, r: float, index: int) -> float:
        return self.measure + r * float(self.a_samples[index])


def _hits(domain: ConvexDomain, z: np.ndarray, lo: np.ndarray, hi: np.ndarray,
          n: int, seed_seq: np.random.SeedSequence) -> int:
    rng = np.random.default_rng(seed_seq)
    hits = 0
    remaining = n
    while remaining > 0:
        m = min(MC_CHUNK, remaining)
        y = lo + (hi - lo) * rng.random((m, domain.dimension))
        inside = domain.contains(y) & domain.contains(y + z)
        hits += int(np.count_nonzero(inside))
        remaining -= m
    return hits


def overlap_monte_carlo(domain: ConvexDomain, z, samples: int = DEFAULT_MC_SAMPLES,
                        seed: int = DEFAULT_SEED) -> MonteCarloEstimate:
    """Monte-Carlo 估计 η(z)，分片各用独立子种子，整数命中数求和与顺序无关"""
    if samples <= 0:
        raise GeometryError(f"Monte-Carlo 采样数必须为正: {samples}")
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.size != domain.dimension:
        raise GeometryError(f"平移向量维数 {z.size} 与区域维数 {domain.dimension} 不一致")

    lo, hi = domain.bounding_box()
    box_volume = float(np.prod(hi - lo))
    shards = min(MC_SHARDS, samples)
    sizes = [samples // shards + (1 if i < samples % shards else 0) for i in range(shards)]
    children = np.random.SeedSequence(seed).spawn(shards)

    with concurrent.futures.ThreadPoolExecutor(max_workers=min(4, shards)) as executor:
        counts = list(executor.map(
            lambda args: _hits(domain, z, lo, hi, args[0], args[1]), zip(sizes, children)))

    p = sum(counts) / samples
    value = box_volume * p
    stderr = box_volume * float(np.sqrt(p * (1.0 - p) / samples))
    logger.debug(f"Monte-Carlo η({z.tolist()}) = {value:.6g} ± {stderr:.2g} ({samples} 样本)")
    return MonteCarloEstimate(value=value, stderr=stderr, samples=samples, seed=seed)


def overlap(domain: ConvexDomain, z, method: str = "auto",
            samples: int = DEFAULT_MC_SAMPLES, seed: int = DEFAULT_SEED):
    """η(z) = |Ω ∩ (Ω+z)|

    z 可以是单个向量 (d,) 或一组向量 (m, d)。有闭式时直接返回数值；
    Monte-Carlo 路径（method="monte_carlo" 或没有闭式）返回带标准误的
    MonteCarloEstimate（一组向量时为列表）。
    """
    if samples <= 0:
        raise GeometryError(f"Monte-Carlo 采样数必须为正: {samples}")
    z_arr = np.asarray(z, dtype=float)
    single = z_arr.ndim == 1
    points = np.atleast_2d(z_arr)

    if method in ("auto", "exact"):
        exact = domain.exact_overlap(points)
        if exact is not None:
            return float(exact[0]) if single else exact
        if method == "exact":
            raise GeometryError(f"区域类型 {domain.kind} 没有重叠函数闭式")

    if method not in ("auto", "monte_carlo"):
        raise GeometryError(f"未知的重叠计算方法: {method}")

    estimates = [overlap_monte_carlo(domain, p, samples, seed) for p in points]
    return estimates[0] if single else estimates


def boundary_coefficient(domain: ConvexDomain, direction, method: str = "numeric",
                         tolerance: float = DEFAULT_FD_TOLERANCE) -> BoundaryCoefficient:
    """A_Ω(θ)：r ↦ η(rθ) 在 r→0⁺ 的导数

    numeric: 单侧差商 + 三层 Richardson 外推，基步长 R_Ω/64；
    closed_form: 球/椭球的投影体积公式。
    """
    if not domain.strictly_convex_smooth:
        raise GeometryError(f"区域类型 {domain.kind} 不是严格凸光滑区域，A_Ω 无定义")
    theta = normalize(np.asarray(direction, dtype=float).reshape(1, -1))[0]
    if theta.size != domain.dimension:
        raise GeometryError(f"方向维数 {theta.size} 与区域维数 {domain.dimension} 不一致")

    if method == "closed_form":
        value = domain.exact_boundary_coefficient(theta)
        if value is None:
            raise GeometryError(f"区域类型 {domain.kind} 没有 A_Ω 闭式")
        return BoundaryCoefficient(value=float(value), error=0.0, method=method)

    if method != "numeric":
        raise GeometryError(f"未知的 A_Ω 计算方法: {method}")

    r0 = domain.inner_diameter / 64.0
    radii = np.array([r0, r0 / 2.0, r0 / 4.0])
    eta = overlap(domain, radii[:, None] * theta[None, :], method="exact")
    quotients = (eta - domain.measure) / radii

    # 差商 D(r) = A + c₁r + c₂r² + ...，逐层消去
    level1 = 2.0 * quotients[1:] - quotients[:-1]
    value = (4.0 * level1[1] - level1[0]) / 3.0
    error = abs(value - level1[1])

    scale = max(abs(value), np.finfo(float).tiny)
    if error > tolerance * scale:
        raise GeometryError(
            f"A_Ω 外推未收敛: 方向 {theta.tolist()} 估计 {value:.6g}, 误差 {error:.2g}")
    return BoundaryCoefficient(value=float(value), error=float(error), method=method)


def expansion(domain: ConvexDomain, directions: Optional[Sequence] = None,
              weights: Optional[Sequence[float]] = None, method: str = "numeric",
              sphere_order: Optional[int] = None,
              tolerance: float = DEFAULT_FD_TOLERANCE) -> OverlapExpansion:
    """在一组方向上制表 A_Ω，r_max = R_Ω/2

    未给方向时使用默认球面求积节点；给了方向但没给权重时按等权分配 |S^{d-1}|。
    """
    if directions is None:
        dirs, w = sphere_nodes(domain.dimension, sphere_order)
    else:
        dirs = normalize(np.asarray(directions, dtype=float))
        if len(dirs) == 0:
            raise GeometryError("方向列表为空")
        if weights is None:
            _, ref = sphere_nodes(domain.dimension, sphere_order)
            w = np.full(len(dirs), ref.sum() / len(dirs))
        else:
            w = np.asarray(weights, dtype=float)
            if w.shape != (len(dirs),):
                raise GeometryError("权重个数与方向个数不一致")

    coefficients = [boundary_coefficient(domain, theta, method, tolerance) for theta in dirs]
    a = np.array([c.value for c in coefficients])
    err = np.array([c.error for c in coefficients])
    logger.info(f"A_Ω 制表完成: {len(dirs)} 个方向, 范围 [{a.min():.6g}, {a.max():.6g}]")
    return OverlapExpansion(
        measure=domain.measure, directions=dirs, weights=w,
        a_samples=a, errors=err, r_max=domain.inner_diameter / 2.0)


def remainder_constant(domain: ConvexDomain, direction, a_value: float,
                       r_max: float, points: int = 32) -> float:
    """拟合 |η(rθ) - |Ω| - rA| <= c r² 中的 c（在 (0, r_max] 上取最大比值）"""
    theta = normalize(np.asarray(direction, dtype=float).reshape(1, -1))[0]
    radii = np.linspace(r_max / points, r_max, points)
    eta = overlap(domain, radii[:, None] * theta[None, :], method="exact")
    return float(np.max(np.abs(eta - domain.measure - radii * a_value) / radii ** 2))
