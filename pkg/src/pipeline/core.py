import logging
import math
import time
from typing import Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..bounds import (
    LemmaProfile,
    asymptotic_roots,
    counting_bound,
    counting_bound_general,
    lemma_roots,
    lemma_row,
    lower_bound_two_term,
    optimal_tau,
    second_term_coefficient,
    second_term_ratio,
    tau_scan,
    trusted_floor,
    trusted_lambda_grid,
    upper_bound_general,
    upper_bound_homogeneous,
)
from ..config.loader import ConfigError
from ..config.schemas import ExperimentConfig
from ..dirichlet import (
    berezin_bound,
    box_spectrum,
    counting_function,
    pl_bound,
    polya_bound,
    riesz_mean as dirichlet_riesz_mean,
    semiclassical_bound,
)
from ..geometry import (
    ConvexDomain,
    boundary_coefficient,
    expansion,
    make_domain,
    overlap,
    overlap_monte_carlo,
    remainder_constant,
)
from ..kernels import (
    HelmholtzSymbol,
    KernelPair,
    custom_kernel,
    helmholtz_symbol,
    lower_symbol,
    riesz_kernel,
    unit_directions,
)
from ..spectral import (
    DiscreteSpectrum,
    Mesh,
    assemble,
    build_mesh,
    counting,
    eigenvalues,
    refinement_study,
    riesz_mean,
)
from . import report

logger = logging.getLogger("RieszBounds.Pipeline")

Kernel = Union[KernelPair, HelmholtzSymbol]


def build_domain(config: ExperimentConfig) -> ConvexDomain:
    if config.domain is None:
        raise ConfigError(f"[{config.config_name}] 缺少 [domain] 节")
    spec = config.domain
    return make_domain(spec.kind, spec.dimension, spec.params)


def build_kernel(config: ExperimentConfig) -> Kernel:
    if config.kernel is None or config.domain is None:
        raise ConfigError(f"[{config.config_name}] 缺少 [kernel] 或 [domain] 节")
    spec, d = config.kernel, config.domain.dimension
    if spec.type == "riesz":
        return riesz_kernel(d, spec.alpha)
    if spec.type == "helmholtz":
        return helmholtz_symbol(d, spec.kappa)
    return custom_kernel(d, spec.alpha, spec.amplitude, spec.symbol_f, spec.g)


def compute_spectrum(config: ExperimentConfig, domain: ConvexDomain,
                     kernel: Kernel) -> Tuple[Mesh, DiscreteSpectrum]:
    name = config.config_name
    started = time.perf_counter()
    mesh = build_mesh(domain, config.mesh.cells, config.mesh.max_cells)
    matrix = assemble(mesh, kernel, config.mesh.self_cell_rule, config.workers)
    spec = eigenvalues(matrix, mesh.metadata(), kernel.descriptor(), config.tolerance.null_ratio)
    logger.info(f"[{name}] 谱计算完成: {mesh.size} 个单元, 用时 {time.perf_counter() - started:.1f}s")
    return mesh, spec


def _base_metadata(config: ExperimentConfig) -> Dict[str, object]:
    return {
        "config_name": config.config_name,
        "config_hash": config.config_hash(),
        "description": config.description,
        "seed": config.seed,
    }


def run_spectrum(config: ExperimentConfig, mesh_and_spectrum=None) -> Dict[str, object]:
    domain = build_domain(config)
    kernel = build_kernel(config)
    mesh, spec = mesh_and_spectrum or compute_spectrum(config, domain, kernel)
    report.write_spectrum(spec, config.output_dir, _base_metadata(config))
    summary = {"cells": mesh.size, "max_abs": spec.max_abs,
               "positive_count": spec.positive_count, "negative_count": spec.negative_count}
    if config.mesh.refinement_levels:
        study = refinement_study(domain, kernel, config.mesh.cells, config.mesh.refinement_levels,
                                 config.mesh.self_cell_rule, config.workers, config.mesh.max_cells)
        metadata = _base_metadata(config)
        metadata.update(study.metadata())
        report.write_table(study.to_frame(), config.output_dir, "refinement", metadata)
        summary["refinement_order"] = study.order
    return summary


def _lambda_grid(config: ExperimentConfig, spec: DiscreteSpectrum) -> np.ndarray:
    grid = config.lambda_grid
    if grid.values:
        return np.sort(np.asarray(grid.values, dtype=float))
    return trusted_lambda_grid(spec.max_abs, grid.points, grid.low_ratio, grid.high_ratio,
                               floor=trusted_floor(spec.retained, grid.trusted_fraction))


def _tau_check(kernel: KernelPair, measure: float, lam: float, points: int) -> Dict[str, float]:
    """网格上 riesz_bound(τ)/(λ-τ) 的最小点与 λ(1-α/d) 的比较"""
    taus, values = tau_scan(kernel, measure, lam, points)
    best = float(taus[int(np.argmin(values))])
    return {"lambda": lam, "tau_grid_min": best, "tau_optimal": float(optimal_tau(kernel, lam)),
            "grid_step": float(taus[1] - taus[0])}


def build_curve(config: ExperimentConfig, domain: ConvexDomain, kernel: Kernel,
                mesh: Mesh, spec: DiscreteSpectrum) -> report.BoundCurve:
    """在 λ 网格上计算经验值与各个界，并做占优检查"""
    name = config.config_name
    d = domain.dimension
    lam = _lambda_grid(config, spec)
    nan = np.full(lam.size, np.nan)
    sphere_order = config.tolerance.sphere_order(d)

    columns: Dict[str, np.ndarray] = {"riesz_empirical": riesz_mean(spec, lam)}
    metadata = _base_metadata(config)
    metadata.update({
        "domain": domain.describe(),
        "kernel": kernel.descriptor(),
        "mesh": mesh.metadata(),
        "mesh_h": mesh.h,
        "coverage_deficit": mesh.coverage_deficit,
        "null_threshold": spec.null_threshold,
        "spectrum": {"size": int(spec.eigenvalues.size), "max_abs": spec.max_abs,
                     "positive_count": spec.positive_count, "negative_count": spec.negative_count},
        "lambda_grid": {"points": int(lam.size), "low_ratio": config.lambda_grid.low_ratio,
                        "high_ratio": config.lambda_grid.high_ratio,
                        "trusted_fraction": config.lambda_grid.trusted_fraction,
                        "trusted_floor": trusted_floor(spec.retained, config.lambda_grid.trusted_fraction),
                        "explicit": bool(config.lambda_grid.values)},
    })

    homogeneous = isinstance(kernel, KernelPair)
    if config.bounds.upper:
        if homogeneous:
            columns["upper_bound"] = upper_bound_homogeneous(kernel, domain.measure, lam, sphere_order)
        else:
            columns["upper_bound"] = np.array([upper_bound_general(kernel, domain.measure, x,
                                                                   config.tolerance.quad_epsrel)
                                               for x in lam])

    if config.bounds.lower:
        reason = None
        if not homogeneous:
            reason = "非齐次核没有两项下界"
        elif not domain.strictly_convex_smooth:
            reason = f"{domain.kind} 不是严格凸光滑区域"
        elif not kernel.alpha < d - 1:
            reason = f"需要 α < d-1 (α={kernel.alpha}, d={d})"
        if reason:
            logger.warning(f"[{name}] 跳过下界: {reason}")
            columns["lower_leading"], columns["lower_second"] = nan, nan
            metadata["lower_bound"] = {"skipped": reason}
        else:
            exp = expansion(domain, sphere_order=sphere_order, tolerance=config.tolerance.fd_tolerance)
            ls = lower_symbol(kernel, exp, sphere_order=sphere_order)
            leading, second = lower_bound_two_term(kernel, domain, ls, lam, sphere_order)
            columns["lower_leading"], columns["lower_second"] = leading, second
            columns["second_term_ratio"] = second_term_ratio(columns["riesz_empirical"], leading, lam,
                                                             d, kernel.alpha)
            metadata["lower_bound"] = {
                "gamma": ls.gamma,
                "gamma_source": ls.source,
                "a_integral": exp.integral(),
                "predicted_coefficient": second_term_coefficient(d, kernel.alpha, domain.measure, ls.gamma),
            }
            logger.info(f"[{name}] γ = {ls.gamma:.10g}, 预测第二项系数 "
                        f"{metadata['lower_bound']['predicted_coefficient']:.6g}")

    if config.bounds.counting:
        columns["counting_empirical"] = counting(spec, lam)
        if homogeneous:
            columns["counting_bound"] = counting_bound(kernel, domain.measure, lam, sphere_order)
            metadata["tau_check"] = _tau_check(kernel, domain.measure, float(np.median(lam)),
                                               config.bounds.tau_points)
        else:
            columns["counting_bound"] = np.array([counting_bound_general(kernel, domain.measure, x)[0]
                                                  for x in lam])

    dominance: Dict[str, object] = {}
    if "upper_bound" in columns:
        bad = lam[columns["riesz_empirical"] > columns["upper_bound"]]
        dominance["upper_ok"] = bool(bad.size == 0)
        dominance["upper_violations"] = bad
        positive = columns["upper_bound"] > 0
        if np.any(positive):
            dominance["upper_max_ratio"] = float(np.max(columns["riesz_empirical"][positive]
                                                        / columns["upper_bound"][positive]))
    if "counting_bound" in columns:
        bad = lam[columns["counting_empirical"] > columns["counting_bound"]]
        dominance["counting_ok"] = bool(bad.size == 0)
        dominance["counting_violations"] = bad

    for key in ("upper_ok", "counting_ok"):
        if dominance.get(key) is False:
            logger.warning(f"[{name}] 占优检查失败: {key}")
    return report.BoundCurve(lam=lam, columns=columns, metadata=metadata, dominance=dominance)


def run_bounds(config: ExperimentConfig, mesh_and_spectrum=None) -> report.BoundCurve:
    domain = build_domain(config)
    kernel = build_kernel(config)
    mesh, spec = mesh_and_spectrum or compute_spectrum(config, domain, kernel)
    curve = build_curve(config, domain, kernel, mesh, spec)
    report.write_report(curve, config.output_dir)
    report.write_spectrum(spec, config.output_dir, _base_metadata(config))
    return curve


def lemma_frame(config: ExperimentConfig) -> pd.DataFrame:
    """每个 (C1, C2) × μ 一行：数值积分、原函数值、渐近两项与交点"""
    spec = config.lemma
    rows = []
    for c1, c2 in spec.profiles:
        profile = LemmaProfile(c1, c2, spec.alpha, spec.d)
        for mu in spec.mus:
            row = lemma_row(profile, mu)
            exact_roots = lemma_roots(profile, mu).roots
            approx_roots = asymptotic_roots(profile, mu).roots
            for label in ("r_minus", "r_plus_1", "r_plus_2", "r_plus"):
                row[label] = exact_roots.get(label, math.nan)
                row[f"{label}_asymptotic"] = approx_roots.get(label, math.nan)
            rows.append(row)
    return pd.DataFrame(rows)


def run_lemma(config: ExperimentConfig) -> pd.DataFrame:
    if config.lemma is None:
        raise ConfigError(f"[{config.config_name}] 缺少 [lemma] 节")
    frame = lemma_frame(config)
    report.write_table(frame, config.output_dir, "lemma", _base_metadata(config))
    return frame


def eta_frame(config: ExperimentConfig, domain: ConvexDomain) -> Tuple[pd.DataFrame, Dict[str, object]]:
    """沿若干方向的 η(rθ)：闭式、Monte-Carlo 与一阶展开"""
    d = domain.dimension
    spec, tol = config.eta, config.tolerance
    directions = unit_directions(d, spec.directions, config.seed)
    r_max = domain.inner_diameter / 2.0
    radii = np.linspace(0.0, r_max, spec.radii_points + 1)

    smooth = domain.strictly_convex_smooth
    meta: Dict[str, object] = {"r_max": r_max, "directions": directions}
    if smooth:
        exp = expansion(domain, sphere_order=tol.sphere_order(d), tolerance=tol.fd_tolerance)
        meta["a_integral"] = exp.integral()
        meta["a_range"] = [float(exp.a_samples.min()), float(exp.a_samples.max())]

    rows = []
    for i, theta in enumerate(directions):
        a_value, a_error, c_fit = math.nan, math.nan, math.nan
        if smooth:
            coefficient = boundary_coefficient(domain, theta, tolerance=tol.fd_tolerance)
            a_value, a_error = coefficient.value, coefficient.error
            c_fit = remainder_constant(domain, theta, a_value, r_max)
        exact = overlap(domain, radii[:, None] * theta[None, :])
        for r, value in zip(radii, exact):
            row = {"direction": i, "r": r, "eta": value, "a_coefficient": a_value,
                   "a_error": a_error, "first_order": domain.measure + r * a_value,
                   "remainder_constant": c_fit, "eta_mc": math.nan, "eta_mc_stderr": math.nan}
            if spec.monte_carlo:
                mc = overlap_monte_carlo(domain, r * theta, tol.mc_samples, config.seed)
                row["eta_mc"], row["eta_mc_stderr"] = mc.value, mc.stderr
            rows.append(row)
    return pd.DataFrame(rows), meta


def run_eta(config: ExperimentConfig) -> pd.DataFrame:
    domain = build_domain(config)
    frame, meta = eta_frame(config, domain)
    metadata = _base_metadata(config)
    metadata.update({"domain": domain.describe(), "eta": meta})
    report.write_table(frame, config.output_dir, "eta", metadata)
    return frame


def dirichlet_frame(config: ExperimentConfig) -> Tuple[pd.DataFrame, Dict[str, object]]:
    spec = config.dirichlet
    d = len(spec.sides)
    spectrum = box_spectrum(spec.sides, spec.nu_max)
    measure = spectrum.measure
    nu_min = spec.nu_min if spec.nu_min is not None else float(spectrum.eigenvalues[0])
    nu = np.linspace(nu_min, spec.nu_max, spec.points)

    columns = {
        "nu": nu,
        "counting": counting_function(spectrum, nu),
        "polya_bound": polya_bound(d, measure, nu),
        "semiclassical_bound": semiclassical_bound(d, measure, nu),
        "pl_bound": pl_bound(d, measure, nu) if d >= 3 else np.full(nu.size, np.nan),
        "riesz_mean": dirichlet_riesz_mean(spectrum, nu),
        "berezin_bound": berezin_bound(d, measure, nu),
    }
    frame = pd.DataFrame(columns)
    frame["weyl_ratio"] = frame["counting"] / frame["polya_bound"]

    dominance = {
        "polya_ok": bool(np.all(frame["counting"] <= frame["polya_bound"])),
        "semiclassical_ok": bool(np.all(frame["counting"] <= frame["semiclassical_bound"])),
        "berezin_ok": bool(np.all(frame["riesz_mean"] <= frame["berezin_bound"])),
    }
    if d >= 3:
        dominance["pl_ok"] = bool(np.all(frame["counting"] <= frame["pl_bound"]))
    meta = {"sides": list(spec.sides), "measure": measure, "modes": int(spectrum.eigenvalues.size),
            "weyl_ratio_at_nu_max": float(frame["weyl_ratio"].iloc[-1]), "dominance": dominance}
    return frame, meta


def run_dirichlet(config: ExperimentConfig) -> Tuple[pd.DataFrame, Dict[str, object]]:
    if config.dirichlet is None:
        raise ConfigError(f"[{config.config_name}] 缺少 [dirichlet] 节")
    frame, meta = dirichlet_frame(config)
    metadata = _base_metadata(config)
    metadata.update(meta)
    report.write_table(frame, config.output_dir, "dirichlet", metadata)
    return frame, meta


def run_experiment(config: ExperimentConfig, tasks: Optional[Tuple[str, ...]] = None) -> Dict[str, object]:
    """按任务列表执行一个实验，返回摘要（含占优检查结果）"""
    name = config.config_name
    tasks = tasks or config.tasks
    logger.info(f"[{name}] 开始执行任务: {', '.join(tasks)}")
    summary: Dict[str, object] = {"config_name": name, "output_dir": config.output_dir,
                                  "dominance_ok": True}

    cached = None
    if "spectrum" in tasks and "bounds" in tasks:
        domain, kernel = build_domain(config), build_kernel(config)
        cached = compute_spectrum(config, domain, kernel)

    for task in tasks:
        if task == "spectrum":
            summary["spectrum"] = run_spectrum(config, cached)
        elif task == "bounds":
            curve = run_bounds(config, cached)
            summary["bounds"] = report.to_jsonable(curve.dominance)
            summary["dominance_ok"] = summary["dominance_ok"] and curve.dominance_ok
        elif task == "lemma":
            summary["lemma"] = len(run_lemma(config))
        elif task == "eta":
            summary["eta"] = len(run_eta(config))
        elif task == "dirichlet":
            _, meta = run_dirichlet(config)
            summary["dirichlet"] = meta["dominance"]
            summary["dominance_ok"] = summary["dominance_ok"] and all(meta["dominance"].values())
        else:
            raise ConfigError(f"[{name}] 未知任务: {task}")

    logger.info(f"[{name}] 任务完成, 占优检查 {'通过' if summary['dominance_ok'] else '失败'}")
    return summary
