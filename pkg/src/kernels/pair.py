import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate
from scipy.special import gamma

from ..errors import NumericalError
from ..geometry.sphere import normalize, sphere_area, sphere_nodes

logger = logging.getLogger("RieszBounds.Kernels")

Profile = Callable[[np.ndarray], np.ndarray]


class KernelError(NumericalError):
    """核/符号参数异常"""
    pass


class ConstantProfile:
    """球面上的常值函数"""

    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, directions: np.ndarray) -> np.ndarray:
        return np.full(len(np.atleast_2d(directions)), self.value)

    def __repr__(self):
        return f"ConstantProfile({self.value!r})"


class TrigProfile:
    """S¹ 上等距节点 θ_k = 2πk/n 的表值的三角插值"""

    def __init__(self, values: Sequence[float]):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise KernelError("S¹ 表值至少需要 2 个节点")
        self.values = values
        self._coef = np.fft.rfft(values) / values.size

    def at_angles(self, theta: np.ndarray) -> np.ndarray:
        n = self.values.size
        theta = np.asarray(theta, dtype=float)
        k = np.arange(self._coef.size)
        terms = np.real(self._coef[None, :] * np.exp(1j * np.outer(theta, k)))
        scale = np.full(k.size, 2.0)
        scale[0] = 1.0
        if n % 2 == 0:
            scale[-1] = 1.0
        return terms @ scale

    def __call__(self, directions: np.ndarray) -> np.ndarray:
        u = np.atleast_2d(directions)
        return self.at_angles(np.arctan2(u[:, 1], u[:, 0]))

    def __repr__(self):
        return f"TrigProfile(n={self.values.size})"


def as_profile(spec: Union[Profile, float, Sequence[float], None], dimension: int) -> Optional[Profile]:
    """把常数/表值/可调用对象统一成球面函数"""
    if spec is None or callable(spec):
        return spec
    if np.isscalar(spec):
        return ConstantProfile(float(spec))
    if dimension != 2:
        raise KernelError("表值形式的角向函数只支持 d=2")
    return TrigProfile(spec)


def riesz_constant(d: int, alpha: float) -> float:
    """C = π^{-d/2} 2^{-α} Γ((d-α)/2)/Γ(α/2)，使 K̂(ξ) = |ξ|^{-α}"""
    return math.pi ** (-d / 2.0) * 2.0 ** (-alpha) * float(gamma((d - alpha) / 2.0)) / float(gamma(alpha / 2.0))


@dataclass(frozen=True, eq=False)
class KernelPair:
    """齐次核 K(x) = a(x̂)|x|^{α-d} 与其符号 K̂(ξ) = f(ξ̂)|ξ|^{-α}

    Fourier 约定：K̂(ξ) = ∫ e^{-ixξ} K(x) dx，逆变换带 (2π)^{-d}。
    """
    dimension: int
    alpha: float
    amplitude: Profile
    symbol_f: Profile
    kind: str = "custom"
    constant: Optional[float] = None
    g: Optional[Profile] = None

    def __post_init__(self):
        if self.dimension < 1:
            raise KernelError(f"维数必须 >= 1: {self.dimension}")
        if not (0.0 < self.alpha < self.dimension):
            raise KernelError(f"α 必须在 (0, d) 内: α={self.alpha}, d={self.dimension}")

    @property
    def is_radial(self) -> bool:
        return self.kind == "riesz"

    def _split(self, x) -> Tuple[np.ndarray, np.ndarray, bool]:
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        pts = np.atleast_2d(arr)
        if pts.shape[1] != self.dimension:
            raise KernelError(f"向量维数 {pts.shape[1]} 与核维数 {self.dimension} 不一致")
        r = np.linalg.norm(pts, axis=1)
        return pts, r, single

    def kernel(self, x):
        """K(x)；x=0 处奇异"""
        pts, r, single = self._split(x)
        if np.any(r == 0):
            raise KernelError("核在原点奇异")
        if self.is_radial:
            values = self.constant * r ** (self.alpha - self.dimension)
        else:
            values = self.amplitude(pts / r[:, None]) * r ** (self.alpha - self.dimension)
        return float(values[0]) if single else values

    def symbol(self, xi):
        """K̂(ξ) = f(ξ/|ξ|)|ξ|^{-α}"""
        pts, r, single = self._split(xi)
        if np.any(r == 0):
            raise KernelError("符号在 ξ=0 处奇异")
        values = self.symbol_f(pts / r[:, None]) * r ** (-self.alpha)
        return float(values[0]) if single else values

    def descriptor(self) -> Dict[str, object]:
        info: Dict[str, object] = {"type": self.kind, "dimension": self.dimension, "alpha": self.alpha}
        if self.constant is not None:
            info["constant"] = self.constant
        return info


def riesz_kernel(d: int, alpha: float) -> KernelPair:
    """球对称 Riesz 核：K̂ = |ξ|^{-α}，K = C|x|^{α-d}"""
    if not (0.0 < alpha < d):
        raise KernelError(f"α 必须在 (0, d) 内: α={alpha}, d={d}")
    c = riesz_constant(d, alpha)
    return KernelPair(dimension=d, alpha=float(alpha), amplitude=ConstantProfile(c),
                      symbol_f=ConstantProfile(1.0), kind="riesz", constant=c)


def _check_even(profile: Profile, d: int, name: str, tol: float = 1e-10):
    nodes, _ = sphere_nodes(d)
    a, b = profile(nodes), profile(-nodes)
    if not np.allclose(a, b, rtol=tol, atol=tol * max(1.0, float(np.max(np.abs(a))))):
        raise KernelError(f"{name} 必须是球面上的偶函数 (f(θ) = f(-θ))")


def custom_kernel(d: int, alpha: float, amplitude, symbol_f, g=None) -> KernelPair:
    """用户给定的 (a, f, g) 三元组；本工具不从 K 推导 K̂，两侧一致性由用户负责"""
    amp = as_profile(amplitude, d)
    f = as_profile(symbol_f, d)
    g_profile = as_profile(g, d)
    if amp is None or f is None:
        raise KernelError("自定义核必须同时给出 amplitude 与 symbol_f")
    if d >= 2:
        _check_even(amp, d, "amplitude")
        _check_even(f, d, "symbol_f")
        if g_profile is not None:
            _check_even(g_profile, d, "g")
    return KernelPair(dimension=d, alpha=float(alpha), amplitude=amp, symbol_f=f,
                      kind="custom", g=g_profile)


def symbol_eval(k: KernelPair, xi) -> float:
    return k.symbol(xi)


def _gaussian_moment(power: float) -> float:
    """∫_0^∞ r^{power} e^{-r²/2} dr（power > -1），r=0 处奇异部分用代数权重"""
    head, _ = integrate.quad(lambda r: np.exp(-r * r / 2.0), 0.0, 1.0,
                             weight="alg", wvar=(power, 0.0), epsabs=0.0, epsrel=1e-13)
    tail, _ = integrate.quad(lambda r: r ** power * np.exp(-r * r / 2.0), 1.0, np.inf,
                             epsabs=0.0, epsrel=1e-13)
    return head + tail


def parseval_check(k: KernelPair, sphere_order: Optional[int] = None) -> Tuple[float, float]:
    """Gauss 测试函数 E = e^{-|z|²/2} 的 Parseval 恒等式两侧

    左：∫ K(z) E(z) dz；右：(2π)^{-d} ∫ K̂(ξ) Ê(ξ) dξ，Ê = (2π)^{d/2} E。
    """
    d, a = k.dimension, k.alpha
    if k.is_radial:
        amp_mean = k.constant * sphere_area(d)
        f_mean = sphere_area(d)
    else:
        nodes, w = sphere_nodes(d, sphere_order)
        amp_mean = float(w @ k.amplitude(nodes))
        f_mean = float(w @ k.symbol_f(nodes))
    lhs = amp_mean * _gaussian_moment(a - 1.0)
    rhs = (2.0 * np.pi) ** (-d / 2.0) * f_mean * _gaussian_moment(d - a - 1.0)
    return lhs, rhs


def unit_directions(d: int, count: int, seed: int = 0) -> np.ndarray:
    """随机单位向量（测试与抽样检查用）"""
    rng = np.random.default_rng(seed)
    return normalize(rng.standard_normal((count, d)))
