"""一维辅助问题 h(r) = C1 r^{-α} + C2 r^{-α-1}

计算 ∫_0^∞ (|h(r)| - μ)₊ r^{d-1} dr：先定出 |h| = μ 的交点（RootSet），
再在 |h| > μ 的区间上积分；同时给出 μ → 0 的两项渐近式及交点的渐近展开。
|h| 在 (C1, C2) → (-C1, -C2) 下不变，内部统一规范到 C1 > 0（或 C1 = 0, C2 > 0）。
"""
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from scipy import optimize

from .upper import BoundsError, integrate_checked

logger = logging.getLogger("RieszBounds.Lemma")

NEWTON_MAXITER = 50
REGIME_FACTOR = 0.9
QUAD_EPSREL = 1e-12
EPS = sys.float_info.epsilon


class RegimeError(BoundsError):
    """μ 超出双交点区间（μ 不够小）"""
    pass


@dataclass(frozen=True)
class LemmaProfile:
    c1: float
    c2: float
    alpha: float
    d: int

    def __post_init__(self):
        if not (0.0 < self.alpha < self.d - 1):
            raise BoundsError(f"需要 0 < α < d-1: α={self.alpha}, d={self.d}")
        if self.c1 == 0 and self.c2 == 0:
            raise BoundsError("C1 与 C2 不能同时为 0")

    def normalized(self) -> "LemmaProfile":
        if self.c1 < 0 or (self.c1 == 0 and self.c2 < 0):
            return LemmaProfile(-self.c1, -self.c2, self.alpha, self.d)
        return self

    @property
    def case(self) -> str:
        """single: |h| = μ 只有一个交点；mixed: C1, C2 异号，三个交点"""
        q = self.normalized()
        return "mixed" if q.c1 > 0 and q.c2 < 0 else "single"

    def h(self, r: float) -> float:
        # r^{-α-1}(C1 r + C2)，避免两项相减的抵消
        return r ** (-self.alpha - 1.0) * (self.c1 * r + self.c2)

    def dh(self, r: float) -> float:
        a = self.alpha
        return r ** (-a - 2.0) * (-a * self.c1 * r - (a + 1.0) * self.c2)

    @property
    def zero(self) -> float:
        """h 的零点 r0 = -C2/C1（仅 mixed）"""
        q = self.normalized()
        return -q.c2 / q.c1

    @property
    def peak(self) -> Tuple[float, float]:
        """mixed 情形 h 在 (0, ∞) 上的最大点及最大值"""
        q = self.normalized()
        r_m = (q.alpha + 1.0) * q.zero / q.alpha
        return r_m, q.h(r_m)


@dataclass(frozen=True)
class RootSet:
    mu: float
    case: str
    roots: Dict[str, float] = field(default_factory=dict)

    def intervals(self) -> List[Tuple[float, float, float]]:
        """|h| > μ 的区间 (a, b, s)，s 为规范化后 h 在区间上的符号"""
        if self.case == "single":
            return [(0.0, self.roots["r_plus"], 1.0)]
        return [(0.0, self.roots["r_minus"], -1.0),
                (self.roots["r_plus_1"], self.roots["r_plus_2"], 1.0)]


def _check_mu(mu: float):
    if not (mu > 0):
        raise BoundsError(f"μ 必须为正: {mu}")


def _check_regime(q: LemmaProfile, mu: float):
    r_m, h_max = q.peak
    if mu >= REGIME_FACTOR * h_max:
        raise RegimeError(f"μ={mu:.6g} 不在双交点区间内（需 μ < {REGIME_FACTOR}·max h = {REGIME_FACTOR * h_max:.6g}）")


def asymptotic_roots(p: LemmaProfile, mu: float) -> RootSet:
    """交点的截断渐近展开"""
    _check_mu(mu)
    q = p.normalized()
    a = q.alpha
    if q.c1 == 0:
        return RootSet(mu, "single", {"r_plus": (q.c2 / mu) ** (1.0 / (a + 1.0))})
    far = q.c1 ** (1.0 / a) * mu ** (-1.0 / a) + q.c2 / (a * q.c1)
    if q.case == "single":
        return RootSet(mu, "single", {"r_plus": far})
    r0 = q.zero
    shift = r0 ** (a + 1.0) * mu / q.c1
    return RootSet(mu, "mixed", {"r_minus": r0 - shift, "r_plus_1": r0 + shift, "r_plus_2": far})


def _residual_ok(q: LemmaProfile, r: float, level: float) -> bool:
    tol = max(1e-12 * abs(level), 8.0 * EPS * abs(r * q.dh(r)))
    return abs(q.h(r) - level) <= tol


def _expand(q: LemmaProfile, start: float, factor: float, stop) -> float:
    """从 start 出发按 factor 伸缩，直到 stop(h(r)) 成立"""
    r = start
    for _ in range(2000):
        r *= factor
        if stop(q.h(r)):
            return r
    raise BoundsError(f"无法为交点建立区间 (start={start:.6g})")


def _solve(q: LemmaProfile, level: float, start: float, lo: float, hi: float) -> float:
    """在 [lo, hi] 内求 h(r) = level：先 Newton（从渐近值出发），失败则 brentq"""
    try:
        root, info = optimize.newton(lambda r: q.h(r) - level, start, fprime=q.dh,
                                     maxiter=NEWTON_MAXITER, full_output=True, disp=False)
        if info.converged and lo <= root <= hi and _residual_ok(q, root, level):
            return float(root)
    except (ArithmeticError, RuntimeError, TypeError, ValueError):
        pass
    root = optimize.brentq(lambda r: q.h(r) - level, lo, hi, xtol=1e-300, rtol=4.0 * EPS, maxiter=500)
    if not _residual_ok(q, root, level):
        raise BoundsError(f"交点残差过大: h({root:.17g}) = {q.h(root):.6g}, 目标 {level:.6g}")
    return float(root)


def lemma_roots(p: LemmaProfile, mu: float) -> RootSet:
    """|h| = μ 的精确交点（Newton 细化渐近初值）"""
    _check_mu(mu)
    q = p.normalized()
    guess = asymptotic_roots(q, mu).roots

    if q.case == "single":
        if q.c1 == 0:
            return RootSet(mu, "single", dict(guess))
        start = guess["r_plus"]
        if not start > 0:
            start = (q.c1 / mu) ** (1.0 / q.alpha)
        lo = start if q.h(start) > mu else _expand(q, start, 0.5, lambda v: v > mu)
        hi = start if q.h(start) < mu else _expand(q, start, 2.0, lambda v: v < mu)
        return RootSet(mu, "single", {"r_plus": _solve(q, mu, start, lo, hi)})

    _check_regime(q, mu)
    r0 = q.zero
    r_m, _ = q.peak
    lo = _expand(q, r0, 0.5, lambda v: v < -mu)
    r_minus = _solve(q, -mu, min(max(guess["r_minus"], lo), r0), lo, r0)
    r_plus_1 = _solve(q, mu, min(max(guess["r_plus_1"], r0), r_m), r0, r_m)
    hi = _expand(q, r_m, 2.0, lambda v: v < mu)
    r_plus_2 = _solve(q, mu, min(max(guess["r_plus_2"], r_m), hi), r_m, hi)
    return RootSet(mu, "mixed", {"r_minus": r_minus, "r_plus_1": r_plus_1, "r_plus_2": r_plus_2})


def lemma_integral_numeric(p: LemmaProfile, mu: float, epsrel: float = QUAD_EPSREL) -> float:
    """在 |h| > μ 的各区间上自适应求积"""
    q = p.normalized()
    roots = lemma_roots(q, mu)
    a, d = q.alpha, q.d
    total = 0.0
    for lo, hi, s in roots.intervals():
        if lo == 0.0:
            # (s·h - μ) r^{d-1} = r^{d-α-2}(s(C1 r + C2) - μ r^{α+1})
            total += integrate_checked(
                lambda r, s=s: s * (q.c1 * r + q.c2) - mu * r ** (a + 1.0), 0.0, hi, epsrel,
                weight="alg", wvar=(d - a - 2.0, 0.0))
        else:
            total += integrate_checked(lambda r, s=s: (s * q.h(r) - mu) * r ** (d - 1), lo, hi, epsrel)
    return total


def lemma_integral_exact(p: LemmaProfile, mu: float) -> float:
    """同一区间上的原函数求值（交点仍由数值求得）"""
    q = p.normalized()
    roots = lemma_roots(q, mu)
    a, d = q.alpha, q.d
    total = 0.0
    for lo, hi, s in roots.intervals():
        total += s * (q.c1 * (hi ** (d - a) - lo ** (d - a)) / (d - a)
                      + q.c2 * (hi ** (d - a - 1) - lo ** (d - a - 1)) / (d - a - 1))
        total -= mu * (hi ** d - lo ** d) / d
    return total


def lemma_asymptotic(p: LemmaProfile, mu: float) -> Tuple[float, float]:
    """两项渐近式 (leading, second)，μ → 0"""
    _check_mu(mu)
    if p.c1 == 0:
        raise BoundsError("C1 = 0 时主项退化，请使用数值积分")
    a, d = p.alpha, p.d
    c1 = abs(p.c1)
    leading = a / (d * (d - a)) * c1 ** (d / a) * mu ** (1.0 - d / a)
    second = math.copysign(1.0, p.c1) * c1 ** ((d - a - 1.0) / a) * p.c2 / (d - a - 1.0) \
        * mu ** (1.0 - (d - 1.0) / a)
    return leading, second


def lemma_row(p: LemmaProfile, mu: float) -> Dict[str, float]:
    """单个 μ 的数值值、渐近两项与缩放余项"""
    numeric = lemma_integral_numeric(p, mu)
    exact = lemma_integral_exact(p, mu)
    row = {"c1": p.c1, "c2": p.c2, "alpha": p.alpha, "d": p.d, "mu": mu,
           "numeric": numeric, "exact": exact}
    if p.c1 != 0:
        leading, second = lemma_asymptotic(p, mu)
        scale = mu ** (1.0 - (p.d - 1.0) / p.alpha)
        row.update({"leading": leading, "second": second,
                    "remainder": numeric - leading - second,
                    "scaled_remainder": abs(numeric - leading - second) / scale,
                    "second_coefficient": (numeric - leading) / scale})
    else:
        row.update({"leading": math.nan, "second": math.nan, "remainder": math.nan,
                    "scaled_remainder": math.nan, "second_coefficient": math.nan})
    logger.debug(f"lemma C1={p.c1}, C2={p.c2}, μ={mu:.3g}: numeric={numeric:.12g}")
    return row
