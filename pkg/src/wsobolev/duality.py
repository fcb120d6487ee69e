"""Duality pairings, sandwich estimates and Hardy-type window constants.

The pairing functional over a normed family gives computable lower bounds for
the associate-norm supremum; the tracked pairing-inequality constant gives the
upper line.  Together they certify two-sided norm equivalences empirically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constructions import dual_gradient_bump, extremal_F, oscillator, smooth_to_g
from .equilibrium import EquilibriumSolution, EtaGrid, build_eta_grid
from .errors import DivergentIntegralError, QuadratureFaultError, WindowUnsolvableError
from .functions import HalfLineFunction, indicator, lincomb
from .functionals import sobolev_norm, weak_norm, weighted_lp_norm
from .quad import DEFAULT_QUAD, QuadratureSpec, adaptive_integral
from .weights import DIVERGENCE_THRESHOLD, WeightPair

_FLOOR = 1e-12


def pairing(f: HalfLineFunction, g: HalfLineFunction,
            quad: QuadratureSpec = DEFAULT_QUAD,
            absolute: bool = False) -> tuple[float, float]:
    """∫_0^inf f g (or ∫ |f g|) with an error estimate, scipy-style tuple."""
    sup_f = f.support
    sup_g = g.support
    if sup_f is not None and sup_g is not None:
        lo, hi = max(sup_f[0], sup_g[0]), min(sup_f[1], sup_g[1])
        if hi <= lo:
            return 0.0, 0.0
    elif sup_f is not None:
        lo, hi = sup_f
    elif sup_g is not None:
        lo, hi = sup_g
    elif quad.truncation is not None:
        lo, hi = quad.truncation
    else:
        raise ValueError("no support declared and no truncation window configured")
    lo = max(lo, _FLOOR)
    pts = sorted({*(b for b in f.breakpoints if lo < b < hi),
                  *(b for b in g.breakpoints if lo < b < hi)})

    def integrand(x):
        x = np.asarray(x, dtype=float)
        v = f.evaluate(x) * g.evaluate(x)
        return np.abs(v) if absolute else v

    res = adaptive_integral(integrand, lo, hi, points=pts, quad=quad)
    val = float(res.value)
    if not math.isfinite(val) or abs(val) > DIVERGENCE_THRESHOLD:
        raise DivergentIntegralError("pairing integral diverges", side="unknown", partial=val)
    return val, res.est_error


@dataclass(frozen=True)
class MemberRatio:
    g_label: str
    pairing: float
    weak_norm: float
    ratio: float


@dataclass(frozen=True)
class SandwichReport:
    """Lower and upper lines of the norm equivalence for one f."""

    f_label: str
    sobolev_value: float
    j_lower: float
    holder_upper: float
    family_size: int
    ratios: tuple

    @property
    def sandwich_ratio(self) -> float:
        """holder_upper / j_lower (>= 1 when the family contains a witness)."""
        if self.j_lower <= 0.0:
            return math.inf
        return self.holder_upper / self.j_lower


def estimate_J(f: HalfLineFunction, family, sol: EquilibriumSolution,
               quad: QuadratureSpec = DEFAULT_QUAD,
               holder_constant: float | None = None,
               weak_norms: dict | None = None) -> SandwichReport:
    """Lower-bound the pairing supremum over a finite family.

    j_lower = max over the family of |∫ f g| / ‖g‖_weak; the upper line is
    holder_constant * ‖f‖_Sobolev.  When no tracked constant is supplied the
    family's own best ratio is used, which makes the upper line trivially
    valid; suites pass the corpus-tracked constant instead.
    """
    family = list(family)
    if not family:
        raise ValueError("family must not be empty")
    sob = sobolev_norm(f, sol.pair, quad).value
    ratios = []
    for g in family:
        wn = None if weak_norms is None else weak_norms.get(g.label)
        if wn is None:
            wn = weak_norm(g, sol, quad).value
        pr, _ = pairing(f, g, quad)
        ratios.append(MemberRatio(g.label, pr, wn,
                                  abs(pr) / wn if wn > 0 else 0.0))
    j_lower = max(r.ratio for r in ratios)
    if holder_constant is None:
        holder_constant = (j_lower / sob) if sob > 0 else 0.0
    return SandwichReport(f.label, sob, j_lower, holder_constant * sob,
                          len(family), tuple(ratios))


def holder_constant(f_corpus, g_corpus, sol: EquilibriumSolution,
                    quad: QuadratureSpec = DEFAULT_QUAD):
    """Tracked pairing-inequality constant: max |∫fg| / (‖f‖_W ‖g‖_weak).

    Returns (constant, table of rows) over the full product corpus.
    """
    rows = []
    best = 0.0
    wns = {g.label: weak_norm(g, sol, quad).value for g in g_corpus}
    for f in f_corpus:
        sob = sobolev_norm(f, sol.pair, quad).value
        for g in g_corpus:
            pr, _ = pairing(f, g, quad)
            denom = sob * wns[g.label]
            ratio = abs(pr) / denom if denom > 0 else 0.0
            rows.append({"f": f.label, "g": g.label, "pairing": pr,
                         "sobolev": sob, "weak": wns[g.label], "ratio": ratio})
            best = max(best, ratio)
    return best, rows


def verify_embedding(g: HalfLineFunction, pair: WeightPair, sol: EquilibriumSolution,
                     quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """weak norm of g over ‖g/v0‖_{p'}; bounded across corpora by the embedding."""
    wn = weak_norm(g, sol, quad).value
    denom = weighted_lp_norm(g, pair.v0, pair.p_conj, weight_power=-1.0, quad=quad)
    if denom == 0.0:
        if wn == 0.0:
            return 0.0   # 0/0 is taken to be zero
        raise QuadratureFaultError(
            f"‖g/v0‖ = 0 with nonzero weak norm {wn:g} for {g.label!r}")
    return wn / denom


@dataclass(frozen=True)
class DivergenceRow:
    eps: float
    n_blocks: int
    weak_norm: float
    pairing_abs: float
    ratio: float
    lower_bound: float


def _auto_segment(f: HalfLineFunction, quad: QuadratureSpec) -> tuple[float, float] | None:
    if f.support is None:
        if quad.truncation is None:
            return None
        lo, hi = quad.truncation
    else:
        lo, hi = f.support
    xs = np.linspace(lo, hi, 513)
    vals = np.abs(f.evaluate(xs))
    peak = float(vals.max())
    if peak <= 0.0:
        return None
    mask = vals >= 0.25 * peak
    runs = np.flatnonzero(np.diff(np.concatenate([[0], mask.view(np.int8), [0]])))
    best = None
    for s, e in zip(runs[::2], runs[1::2]):
        if best is None or (e - s) > (best[1] - best[0]):
            best = (s, e)
    if best is None or best[1] - best[0] < 4:
        return None
    return float(xs[best[0]]), float(xs[best[1] - 1])


def verify_strong_of_weak_zero(f: HalfLineFunction, eps_list, sol: EquilibriumSolution,
                               quad: QuadratureSpec = DEFAULT_QUAD,
                               segment: tuple[float, float] | None = None) -> list[DivergenceRow]:
    """Absolute-pairing blow-up against unit-level oscillators of shrinking norm.

    For each eps the oscillator g with |g| = 1 on (c, d) has weak norm ~ eps,
    so ∫|f g| / ‖g‖ grows like 1/eps: the strong functional over the weak
    associate space is unbounded for every f that is not a.e. zero.
    """
    if segment is None:
        segment = _auto_segment(f, quad)
    if segment is None:
        raise ValueError("no-witness-segment: f vanishes on every probed segment")
    c, d = segment
    rows = []
    for eps in eps_list:
        level = indicator(c, d, 1.0, label=f"one[{c:g},{d:g}]")
        g, plan = oscillator(level, c, d, eps, sol, "normalized", quad)
        wn = weak_norm(g, sol, quad).value
        pr, _ = pairing(f, g, quad, absolute=True)
        f_mass = pr  # = ∫_c^d |f| because |g| = 1 there
        rows.append(DivergenceRow(eps, plan.n, wn, pr,
                                  pr / wn if wn > 0 else math.inf,
                                  f_mass / eps))
    return rows


@dataclass(frozen=True)
class HardyConstants:
    """Window Hardy products for one grid cell, with maximizer locations."""

    k: int
    a1: float
    a2: float
    a1_kernel_pow: float    # bounded by 1/(p-1)
    a2_kernel_pow: float
    script_a: float
    maximizers: dict


def _sup_scan(fn, lo: float, hi: float, n: int = 512, refine_tol: float = 1e-8):
    """Dense log-spaced scan plus golden-section refinement of the best cell."""
    xs = np.geomspace(lo, hi, n)
    vals = np.array([fn(float(x)) for x in xs])
    j = int(np.argmax(vals))
    a = xs[max(j - 1, 0)]
    b = xs[min(j + 1, n - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > refine_tol * max(1.0, abs(b)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    x_best = 0.5 * (a + b)
    return max(float(vals[j]), fn(x_best)), x_best


def hardy_constants(grid: EtaGrid, k: int, quad: QuadratureSpec = DEFAULT_QUAD) -> HardyConstants:
    """Sup products controlling the cellwise Hardy inequalities on cell k."""
    sol = grid.solution
    pair = sol.pair
    p, pc = pair.p, pair.p_conj
    lo, hi = grid.cell(k)
    w1c = sol.w1_cum
    v0c = sol.v0_cum

    def a1(t):
        return max(v0c(hi) - v0c(t), 0.0) ** (1.0 / p) * \
            max(w1c(t) - w1c(lo), 0.0) ** (1.0 / pc)

    def a2(t):
        ai = sol.a_inv(t)
        return max(v0c(ai) - v0c(hi), 0.0) ** (1.0 / p) * \
            max(w1c(hi) - w1c(t), 0.0) ** (1.0 / pc)

    def kernel_pow(t, upper: bool):
        # ∫ v1^{-p'} [V1^-]^{-p} over the moving range, times the mass factor
        if upper:
            rng = (hi, sol.a_inv(t))
            mass = max(w1c(hi) - w1c(t), 0.0)
        else:
            rng = (t, hi)
            mass = max(w1c(t) - w1c(lo), 0.0)
        if rng[1] <= rng[0]:
            return 0.0
        res = adaptive_integral(
            lambda x: sol.w1_density(x) * sol.V1_minus(np.asarray(x, dtype=float)) ** (-p),
            rng[0], rng[1], quad=quad)
        return max(float(res.value), 0.0) * mass ** (p - 1.0)

    def script_a(t):
        try:
            bi = sol.b_inv(t)
        except WindowUnsolvableError:
            return 0.0
        ai = sol.a_inv(t)
        return sol.V1(t) ** (1.0 / pc) * max(v0c(ai) - v0c(bi), 0.0) ** (1.0 / p)

    v_a1, x_a1 = _sup_scan(a1, lo, hi)
    v_a2, x_a2 = _sup_scan(a2, lo, hi)
    v_k1, x_k1 = _sup_scan(lambda t: kernel_pow(t, False), lo * (1 + 1e-9), hi * (1 - 1e-9),
                           n=128)
    v_k2, x_k2 = _sup_scan(lambda t: kernel_pow(t, True), lo * (1 + 1e-9), hi * (1 - 1e-9),
                           n=128)
    v_sa, x_sa = _sup_scan(script_a, lo, hi, n=128)
    return HardyConstants(k, v_a1, v_a2, v_k1, v_k2, v_sa,
                          {"a1": x_a1, "a2": x_a2, "a1_kernel": x_k1,
                           "a2_kernel": x_k2, "script_a": x_sa})


def window_products(sol: EquilibriumSolution, t: float) -> tuple[float, float]:
    """The two one-sided window products (each bounded by 1)."""
    pc, p = sol.pair.p_conj, sol.pair.p
    v1 = sol.V1(t) ** (1.0 / pc)
    up = max(sol.v0_cum(sol.a_inv(t)) - sol.v0_cum(t), 0.0) ** (1.0 / p)
    dn = max(sol.v0_cum(t) - sol.v0_cum(sol.b_inv(t)), 0.0) ** (1.0 / p)
    return v1 * up, v1 * dn


def lp_dual_member(f: HalfLineFunction, pair: WeightPair) -> HalfLineFunction:
    """sgn(f) v0^p |f|^{p-1}: the extremal function of the plain L^p pairing."""
    p = pair.p

    def ev(x):
        x = np.asarray(x, dtype=float)
        v = f.evaluate(x)
        return np.sign(v) * pair.v0.pow(p, x) * np.abs(v) ** (p - 1.0)

    return HalfLineFunction(ev, None, support=f.support,
                            label=f"lp-dual[{f.label}]", breakpoints=f.breakpoints)


def reflexivity_family(f: HalfLineFunction, grid: EtaGrid,
                       quad: QuadratureSpec = DEFAULT_QUAD, N: int | None = None):
    """Weak-associate members tailored to f: extremal kernels for both kernel
    powers, the plain L^p dual element, and the derivative-aligned bump."""
    if N is None:
        N = min(-grid.kmin, grid.kmax) - 1
    sol = grid.solution
    members = []
    for delta in (0, 1):
        f1 = extremal_F(f, grid, delta, 1, N, quad)
        f2 = extremal_F(f, grid, delta, 2, N, quad)
        members.append(lincomb([(1.0, f1), (1.0, f2)], label=f"F[{f.label};d{delta}]"))
    members.append(lp_dual_member(f, sol.pair))
    if f.has_derivative:
        members.append(smooth_to_g(dual_gradient_bump(f, sol.pair)))
    return members


def verify_reflexivity(corpus, pair: WeightPair, sol: EquilibriumSolution,
                       quad: QuadratureSpec = DEFAULT_QUAD,
                       grid: EtaGrid | None = None,
                       tracked_constant: float | None = None) -> list[SandwichReport]:
    """Empirical two-sided sandwich for every corpus member.

    For each f the family of near-extremal weak-associate members yields
    j_lower; the corpus-tracked pairing constant yields the upper line.  The
    sandwich ratio stays below a configured desk ceiling when the equivalence
    holds with constants depending only on p.
    """
    corpus = list(corpus)
    if grid is None:
        lo = min(f.support[0] for f in corpus)
        hi = max(f.support[1] for f in corpus)
        sol_n = 2
        while grid is None or grid.span[0] > lo * 0.49 or grid.span[1] < hi * 2.05:
            sol_n += 1
            grid = build_eta_grid(sol, sol_n)
            if sol_n > 40:
                break
    reports = []
    families = {f.label: reflexivity_family(f, grid, quad) for f in corpus}
    if tracked_constant is None:
        tracked_constant = 0.0
        for f in corpus:
            rep = estimate_J(f, families[f.label], sol, quad)
            if rep.sobolev_value > 0:
                tracked_constant = max(tracked_constant, rep.j_lower / rep.sobolev_value)
    for f in corpus:
        reports.append(estimate_J(f, families[f.label], sol, quad,
                                  holder_constant=tracked_constant))
    return reports
