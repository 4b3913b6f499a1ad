"""分片常数 Galerkin 组装

单元为同一均匀网格上的轴对齐长方体，矩阵元只依赖两单元的整数偏移 Δ：
    entry(i, j) = |c|⁻¹ ∬_{c_i×c_j} K(x-y) dx dy = |c|⁻¹ ∫ K(Δ∘s + w) η_c(w) dw,
其中 η_c(w) = Π(s_k - |w_k|)₊ 是单元与自身平移的重叠函数。每个偏移只积分一次。
"""
import concurrent.futures
import itertools
import logging
from typing import Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate
from scipy.special import beta

from ..geometry.domains import lens_volume
from ..geometry.sphere import ball_volume, sphere_area, sphere_nodes
from ..kernels.helmholtz import HelmholtzSymbol
from ..kernels.pair import KernelPair
from .mesh import Mesh, SpectralError

logger = logging.getLogger("RieszBounds.Spectral")

Kernel = Union[KernelPair, HelmholtzSymbol]

# 按环（|Δ|_∞）选择的 (每半区间子段数, 每段 Gauss 点数)；第 1 环见 adjacent_rule
NEAR_RULES = {2: (2, 4)}
# 相邻单元：每半区间的几何加密层数（按维数）与每段 Gauss 点数
ADJACENT_LEVELS = {1: 24, 2: 16, 3: 10}
ADJACENT_ORDER = 4
FAR_RULE = (1, 3)
DUFFY_ORDER = 16
GRADED_LEVELS = 10
CHUNK_OFFSETS = 2048
SELF_CELL_RULES = ("polar", "ball")


def _unit_gauss(q: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(q)
    return (x + 1.0) / 2.0, w / 2.0


def tent_rule(s: float, panels: int, q: int) -> Tuple[np.ndarray, np.ndarray]:
    """[-s, s] 上带权 (s - |w|) 的求积节点与权重"""
    t, wt = _unit_gauss(q)
    edges = np.linspace(0.0, s, panels + 1)
    nodes = np.concatenate([a + (b - a) * t for a, b in zip(edges[:-1], edges[1:])])
    weights = np.concatenate([(b - a) * wt for a, b in zip(edges[:-1], edges[1:])]) * (s - nodes)
    return np.concatenate([-nodes[::-1], nodes]), np.concatenate([weights[::-1], weights])


def graded_tent_rule(s: float, toward_edge: bool, levels: int, q: int) -> Tuple[np.ndarray, np.ndarray]:
    """带权 (s - |w|) 的对称规则，每半区间向 0（toward_edge=False）或向 ±s 几何加密"""
    t, wt = _unit_gauss(q)
    edges = np.concatenate([[0.0], 2.0 ** -np.arange(levels, -1, -1)]) * s
    if toward_edge:
        edges = s - edges[::-1]
    nodes = np.concatenate([a + (b - a) * t for a, b in zip(edges[:-1], edges[1:])])
    weights = np.concatenate([(b - a) * wt for a, b in zip(edges[:-1], edges[1:])]) * (s - nodes)
    return np.concatenate([-nodes[::-1], nodes]), np.concatenate([weights[::-1], weights])


def adjacent_rule(spacing: np.ndarray, delta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """第 1 环偏移的张量规则

    K(Δ∘s + w) 在 w = -Δ∘s 处奇异：Δ_k ≠ 0 的坐标是区间端点，Δ_k = 0 的坐标是中点，
    各坐标分别向该点加密。
    """
    d = len(spacing)
    levels = ADJACENT_LEVELS.get(d, min(ADJACENT_LEVELS.values()))
    rules = [graded_tent_rule(s, bool(k), levels, ADJACENT_ORDER) for s, k in zip(spacing, delta)]
    points = np.stack([g.ravel() for g in np.meshgrid(*[r[0] for r in rules], indexing="ij")], axis=1)
    weights = np.ones(len(points))
    for g in np.meshgrid(*[r[1] for r in rules], indexing="ij"):
        weights *= g.ravel()
    return points, weights


def _tensor_rule(spacing: np.ndarray, panels: int, q: int) -> Tuple[np.ndarray, np.ndarray]:
    rules = [tent_rule(s, panels, q) for s in spacing]
    points = np.array(list(itertools.product(*[r[0] for r in rules])))
    weights = np.prod(np.array(list(itertools.product(*[r[1] for r in rules]))), axis=1)
    return points, weights


def _graded_rule(q: int = 8, levels: int = GRADED_LEVELS) -> Tuple[np.ndarray, np.ndarray]:
    """[0,1] 上向 0 几何加密的复合 Gauss 规则（处理对数型端点奇性）"""
    t, wt = _unit_gauss(q)
    edges = np.concatenate([[0.0], 2.0 ** -np.arange(levels, -1, -1)])
    nodes = np.concatenate([a + (b - a) * t for a, b in zip(edges[:-1], edges[1:])])
    weights = np.concatenate([(b - a) * wt for a, b in zip(edges[:-1], edges[1:])])
    return nodes, weights


def _integrate_offsets(kernel: Kernel, offsets: np.ndarray,
                       points: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Σ_p ω_p K(Δ + w_p)，offsets 为物理坐标 (m, d)"""
    m, d = offsets.shape
    z = (offsets[:, None, :] + points[None, :, :]).reshape(-1, d)
    values = np.asarray(kernel.kernel(z)).reshape(m, -1)
    return values @ weights


def _tent_polynomial(t: np.ndarray) -> np.ndarray:
    """Π_i (1 - u t_i) 关于 u 的系数（低次在前），t 形状 (V, d)"""
    coef = np.ones((t.shape[0], 1))
    for i in range(t.shape[1]):
        shifted = np.zeros((coef.shape[0], coef.shape[1] + 1))
        shifted[:, :-1] += coef
        shifted[:, 1:] -= coef * t[:, i:i + 1]
        coef = shifted
    return coef


def self_cell_polar(kernel: Kernel, spacing: np.ndarray, order: int = DUFFY_ORDER) -> float:
    """∫ K(w) η_c(w) dw 的极坐标（Duffy）积分

    单元重叠区 [-s, s]^d 按卦限和“哪个归一化坐标最大”分成 2^d·d 个棱锥，
    每个棱锥上 w = u·e(v)。齐次核对 u 的积分为 Σ p_m/(α+m) 的闭式，
    对 v 的被积函数光滑，用张量 Gauss；非齐次核对 u 用几何加密规则。
    """
    s = np.asarray(spacing, dtype=float)
    d = s.size
    if d > 1:
        t, wt = _unit_gauss(order)
        v = np.array(list(itertools.product(t, repeat=d - 1)))
        wv = np.prod(np.array(list(itertools.product(wt, repeat=d - 1))), axis=1)
    else:
        v, wv = np.zeros((1, 0)), np.ones(1)
    scale = float(np.prod(s)) ** 2
    homogeneous = isinstance(kernel, KernelPair)
    if not homogeneous:
        u, wu = _graded_rule()

    total = 0.0
    for signs in itertools.product((-1.0, 1.0), repeat=d):
        signs = np.array(signs)
        for k in range(d):
            others = [j for j in range(d) if j != k]
            tt = np.empty((len(v), d))
            tt[:, k] = 1.0
            tt[:, others] = v
            e = tt * s * signs
            norm = np.linalg.norm(e, axis=1)
            poly = _tent_polynomial(tt)
            if homogeneous:
                a = kernel.alpha
                if kernel.is_radial:
                    amp = np.full(len(e), kernel.constant)
                else:
                    amp = kernel.amplitude(e / norm[:, None])
                moments = poly @ (1.0 / (a + np.arange(poly.shape[1])))
                total += float(wv @ (amp * norm ** (a - d) * moments))
            else:
                r = np.outer(u, norm)
                tent = np.vander(u, d + 1, increasing=True) @ poly.T
                values = kernel.radial_kernel(r) * (u ** (d - 1))[:, None] * tent
                total += float(wu @ values @ wv)
    return total * scale


def self_cell_ball(kernel: Kernel, cell_volume: float, d: int) -> float:
    """等体积球规则：∬_{c×c} K ≈ ∫ K(z) η_B(z) dz，B 与单元等体积"""
    rho = (cell_volume / ball_volume(d)) ** (1.0 / d)
    a_half = (d + 1) / 2.0
    if isinstance(kernel, KernelPair):
        alpha = kernel.alpha
        if kernel.is_radial:
            angular = kernel.constant * sphere_area(d)
        else:
            nodes, w = sphere_nodes(d)
            angular = float(w @ kernel.amplitude(nodes))
        radial = (2.0 * rho) ** alpha * ball_volume(d, rho) * beta(a_half, (alpha + 1) / 2.0) \
            / (alpha * beta(a_half, 0.5))
        return angular * radial

    value, err = integrate.quad(
        lambda r: float(kernel.radial_kernel(r)) * r ** (d - 1) * float(lens_volume(d, rho, r)),
        0.0, 2.0 * rho, limit=200, epsabs=0.0, epsrel=1e-10)
    return sphere_area(d) * value


def offset_entry(kernel: Kernel, spacing, offset) -> float:
    """单个偏移 Δ（整数向量）对应的矩阵元"""
    spacing = np.asarray(spacing, dtype=float)
    delta = np.asarray(offset, dtype=int)
    ring = int(np.max(np.abs(delta))) if delta.size else 0
    cell_volume = float(np.prod(spacing))
    if ring == 0:
        return self_cell_polar(kernel, spacing) / cell_volume
    if ring == 1:
        points, weights = adjacent_rule(spacing, delta)
    else:
        points, weights = _tensor_rule(spacing, *NEAR_RULES.get(ring, FAR_RULE))
    value = _integrate_offsets(kernel, (delta * spacing)[None, :], points, weights)[0]
    return float(value) / cell_volume


def offset_table(kernel: Kernel, mesh: Mesh, self_cell_rule: str = "polar",
                 workers: int = 4) -> np.ndarray:
    """所有偏移 Δ ∈ Π[-(N_k-1), N_k-1] 上的矩阵元表"""
    if self_cell_rule not in SELF_CELL_RULES:
        raise SpectralError(f"未知的自单元规则: {self_cell_rule}")
    d = mesh.dimension
    n = np.array(mesh.shape)
    dims = tuple(int(x) for x in 2 * n - 1)
    deltas = np.indices(dims).reshape(d, -1).T - (n - 1)
    physical = deltas * mesh.spacing
    rings = np.max(np.abs(deltas), axis=1)
    table = np.empty(len(deltas))

    zero = np.flatnonzero(rings == 0)
    if self_cell_rule == "polar":
        table[zero] = self_cell_polar(kernel, mesh.spacing)
    else:
        table[zero] = self_cell_ball(kernel, mesh.cell_volume, d)

    for i in np.flatnonzero(rings == 1):
        points, weights = adjacent_rule(mesh.spacing, deltas[i])
        table[i] = _integrate_offsets(kernel, physical[i:i + 1], points, weights)[0]

    for ring, (panels, q) in NEAR_RULES.items():
        sel = np.flatnonzero(rings == ring)
        if sel.size:
            points, weights = _tensor_rule(mesh.spacing, panels, q)
            table[sel] = _integrate_offsets(kernel, physical[sel], points, weights)

    far = np.flatnonzero(rings > max(NEAR_RULES))
    if far.size:
        points, weights = _tensor_rule(mesh.spacing, *FAR_RULE)
        chunks = [far[i:i + CHUNK_OFFSETS] for i in range(0, far.size, CHUNK_OFFSETS)]

        def work(sel):
            return sel, _integrate_offsets(kernel, physical[sel], points, weights)

        with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
            for sel, values in executor.map(work, chunks):
                table[sel] = values

    table /= mesh.cell_volume
    if not np.all(np.isfinite(table)):
        raise SpectralError("矩阵元求积失败（出现非有限值）")
    return table.reshape(dims)


def assemble(mesh: Mesh, kernel: Kernel, self_cell_rule: str = "polar",
             workers: int = 4, block_rows: int = 512) -> np.ndarray:
    """正交分片常数基下的对称 Galerkin 矩阵"""
    if kernel.dimension != mesh.dimension:
        raise SpectralError(f"核维数 {kernel.dimension} 与网格维数 {mesh.dimension} 不一致")

    table = offset_table(kernel, mesh, self_cell_rule, workers)
    flat = table.ravel()
    n = np.array(mesh.shape)
    # 偏移表按 C 顺序展平后的步长
    strides = np.array([int(np.prod((2 * n - 1)[k + 1:])) for k in range(mesh.dimension)])
    codes = (mesh.index + (n - 1)) @ strides
    base = mesh.index @ strides

    size = mesh.size
    matrix = np.empty((size, size))
    for start in range(0, size, block_rows):
        stop = min(start + block_rows, size)
        matrix[start:stop] = flat[codes[start:stop, None] - base[None, :]]

    matrix = 0.5 * (matrix + matrix.T)
    logger.info(f"组装完成: {size}×{size}, 对角元 {matrix[0, 0]:.6g}, 自单元规则 {self_cell_rule}")
    return matrix
