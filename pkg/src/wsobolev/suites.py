"""Named verification suites shared by the CLI and the acceptance tests.

Every suite returns a :class:`SuiteResult` with row-level data (for CSV
emission), the empirical constants it measured, and a pass verdict at the
pinned tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .constructions import CorpusSpec, hat_corpus
from .duality import (hardy_constants, holder_constant, verify_embedding,
                      verify_reflexivity, verify_strong_of_weak_zero, window_products)
from .equilibrium import EquilibriumSolution, build_eta_grid, check_identity
from .functions import indicator
from .functionals import block_norm, weak_norm
from .quad import QuadratureSpec


@dataclass
class SuiteResult:
    name: str
    passed: bool
    rows: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    notes: str = ""


def default_g_corpus(seed: int, hats: int = 6, bumps: int = 3):
    """Associate-side corpus: hats, bumps and one indicator (10 members)."""
    members = hat_corpus(CorpusSpec(seed=seed, n_hats=hats, n_bumps=bumps))
    members.append(indicator(1.0, 2.0, label="chi12"))
    return members


def identity_suite(sol: EquilibriumSolution, n_t: int = 100,
                   t_range: tuple = (1.0, 100.0), h: float = 1e-5,
                   tol: float = 1e-6) -> SuiteResult:
    """Differential balance identity residuals on a log-spaced t grid."""
    rows = []
    worst = 0.0
    for t in np.geomspace(*t_range, n_t):
        r = check_identity(sol, float(t), h)
        worst = max(worst, r)
        rows.append({"t": float(t), "residual": r})
    return SuiteResult("identity", worst < tol, rows,
                       {"max_residual": worst, "tolerance": tol})


def hardy_suite(sol: EquilibriumSolution, k_range: int = 4, n_t: int = 100,
                tol: float = 1e-6, quad: QuadratureSpec | None = None) -> SuiteResult:
    """Cellwise Hardy products <= 1, kernel powers <= 1/(p-1), window products <= 1."""
    quad = quad or sol.quad
    p = sol.pair.p
    grid = build_eta_grid(sol, k_range + 1)
    rows = []
    ok = True
    kernel_bound = 1.0 / (p - 1.0)
    for k in range(-k_range, k_range + 1):
        hc = hardy_constants(grid, k, quad)
        row_ok = (hc.a1 <= 1.0 + tol and hc.a2 <= 1.0 + tol and
                  hc.a1_kernel_pow <= kernel_bound + tol and
                  hc.a2_kernel_pow <= kernel_bound + tol)
        ok &= row_ok
        rows.append({"k": k, "A1": hc.a1, "A2": hc.a2,
                     "A1_kernel_pow": hc.a1_kernel_pow,
                     "A2_kernel_pow": hc.a2_kernel_pow,
                     "script_A": hc.script_a, "passed": row_ok})
    worst_wp = 0.0
    for t in np.geomspace(grid.span[0] * 1.05, grid.span[1] * 0.95, n_t):
        wa, wb = window_products(sol, float(t))
        worst_wp = max(worst_wp, wa, wb)
    ok &= worst_wp <= 1.0 + tol
    return SuiteResult("hardy", ok, rows,
                       {"kernel_bound": kernel_bound, "max_window_product": worst_wp,
                        "tolerance": tol})


def hoelder_suite(sol: EquilibriumSolution, quad: QuadratureSpec,
                  seed: int = 1234, drift_limit: float = 0.01) -> SuiteResult:
    """Pairing-inequality constant over a 10 x 10 corpus, stable under refinement."""
    f_corpus = hat_corpus(CorpusSpec(seed=seed))
    g_corpus = default_g_corpus(seed + 1)
    c_base, rows = holder_constant(f_corpus, g_corpus, sol, quad)
    c_tight, _ = holder_constant(f_corpus, g_corpus, sol, quad.tightened(10.0))
    drift = abs(c_tight - c_base) / c_base if c_base > 0 else 0.0
    ok = math.isfinite(c_base) and c_base > 0 and drift < drift_limit
    return SuiteResult("hoelder", ok, rows,
                       {"holder_constant": c_base, "holder_constant_tight": c_tight,
                        "drift": drift, "drift_limit": drift_limit})


def embedding_suite(sol: EquilibriumSolution, quad: QuadratureSpec,
                    seed: int = 1234, ceiling: float = 100.0) -> SuiteResult:
    """weak norm / ‖g/v0‖_{p'} bounded across the corpus."""
    rows = []
    ok = True
    worst = 0.0
    for g in default_g_corpus(seed + 1):
        ratio = verify_embedding(g, sol.pair, sol, quad)
        worst = max(worst, ratio)
        ok &= math.isfinite(ratio) and ratio <= ceiling
        rows.append({"g": g.label, "ratio": ratio})
    return SuiteResult("embedding", ok, rows,
                       {"max_ratio": worst, "ceiling": ceiling})


def blocks_suite(sol: EquilibriumSolution, quad: QuadratureSpec, seed: int = 1234,
                 half_width: int = 6, ratio_lo: float = 0.01, ratio_hi: float = 100.0,
                 drift_limit: float = 0.01) -> SuiteResult:
    """Cellwise decomposition vs weak norm: bounded ratio, refinement-stable."""
    grid = build_eta_grid(sol, half_width)
    tight = quad.tightened(10.0)
    rows = []
    ok = True
    for g in default_g_corpus(seed + 1):
        wn = weak_norm(g, sol, quad).value
        bn = block_norm(g, grid, quad).value
        ratio = bn / wn if wn > 0 else math.inf
        wn_t = weak_norm(g, sol, tight).value
        bn_t = block_norm(g, grid, tight).value
        ratio_t = bn_t / wn_t if wn_t > 0 else math.inf
        drift = abs(ratio_t - ratio) / ratio if ratio > 0 else 0.0
        row_ok = ratio_lo <= ratio <= ratio_hi and drift < drift_limit
        ok &= row_ok
        rows.append({"g": g.label, "weak": wn, "block": bn, "ratio": ratio,
                     "ratio_tight": ratio_t, "drift": drift, "passed": row_ok})
    return SuiteResult("blocks", ok, rows,
                       {"ratio_lo": ratio_lo, "ratio_hi": ratio_hi,
                        "drift_limit": drift_limit})


def corol_divergence_suite(sol: EquilibriumSolution, quad: QuadratureSpec,
                           eps_list=(1e-1, 1e-2, 1e-3),
                           growth_tol: float = 0.2) -> SuiteResult:
    """Unit-level oscillator pairing ratios grow ~10x per decade of eps."""
    f = indicator(1.0, 2.0, label="one12")
    rows_raw = verify_strong_of_weak_zero(f, eps_list, sol, quad)
    # the construction guarantees weak_norm <= C_impl * eps with one constant
    c_impl = max(r.weak_norm / r.eps for r in rows_raw)
    rows = []
    ok = True
    prev = None
    for r in rows_raw:
        growth = (r.ratio / prev.ratio) if prev is not None else float("nan")
        if prev is not None:
            decade = math.log10(prev.eps / r.eps)
            expected = 10.0 ** decade
            ok &= abs(growth - expected) <= growth_tol * expected
            ok &= r.ratio > prev.ratio  # strict growth as eps decreases
        ok &= r.ratio >= r.lower_bound / c_impl * (1.0 - 1e-9)
        rows.append({"eps": r.eps, "n_blocks": r.n_blocks, "weak_norm": r.weak_norm,
                     "pairing_abs": r.pairing_abs, "ratio": r.ratio,
                     "lower_bound": r.lower_bound, "growth": growth})
        prev = r
    return SuiteResult("corol-divergence", ok, rows,
                       {"growth_tol": growth_tol, "c_impl": c_impl})


def reflexivity_suite(sol: EquilibriumSolution, quad: QuadratureSpec,
                      seed: int = 1234, ceiling: float = 100.0,
                      scale_invariance_tol: float = 0.01) -> SuiteResult:
    """Sandwich estimates for the hat corpus plus scale invariance of one member."""
    corpus = hat_corpus(CorpusSpec(seed=seed))
    reports = verify_reflexivity(corpus, sol.pair, sol, quad)
    rows = []
    ok = True
    for r in reports:
        row_ok = 0.0 < r.j_lower <= r.holder_upper * (1 + 1e-9) and r.sandwich_ratio <= ceiling
        ok &= row_ok
        rows.append({"f": r.f_label, "sobolev": r.sobolev_value, "j_lower": r.j_lower,
                     "holder_upper": r.holder_upper, "sandwich_ratio": r.sandwich_ratio,
                     "passed": row_ok})
    # homogeneity: doubling f doubles both sides, the ratio is invariant
    f = corpus[0]
    base = verify_reflexivity([f], sol.pair, sol, quad)[0]
    doubled = verify_reflexivity([f.scaled(2.0)], sol.pair, sol, quad)[0]
    inv = abs(doubled.sandwich_ratio / base.sandwich_ratio - 1.0)
    ok &= inv < scale_invariance_tol
    tracked = max((r["j_lower"] / r["sobolev"] for r in rows if r["sobolev"] > 0),
                  default=0.0)
    return SuiteResult("reflexivity", ok, rows,
                       {"ceiling": ceiling, "tracked_constant": tracked,
                        "scale_invariance": inv,
                        "max_sandwich_ratio": max(r["sandwich_ratio"] for r in rows)})


def run_suite(name: str, cfg: RunConfig, sol: EquilibriumSolution) -> SuiteResult:
    quad = cfg.quadrature()
    if name == "identity":
        return identity_suite(sol)
    if name == "hardy":
        return hardy_suite(sol, quad=quad)
    if name == "hoelder":
        return hoelder_suite(sol, quad, seed=cfg.seed)
    if name == "embedding":
        return embedding_suite(sol, quad, seed=cfg.seed, ceiling=cfg.embedding_ceiling)
    if name == "blocks":
        return blocks_suite(sol, quad, seed=cfg.seed, half_width=cfg.half_width,
                            ratio_lo=cfg.block_ratio_lo, ratio_hi=cfg.block_ratio_hi)
    if name == "corol-divergence":
        return corol_divergence_suite(sol, quad)
    if name == "reflexivity":
        return reflexivity_suite(sol, quad, seed=cfg.seed, ceiling=cfg.sandwich_ceiling)
    raise ValueError(f"unknown suite {name!r}")
