"""Proof-level test functions: oscillators, extremal kernels, witnesses.

These are the concrete families the verification suites pair against: the
equal-mass sign-flipping oscillator with arbitrarily small weak norm, the
near-extremal functions of the block decomposition, derivative-of-bump
functions, and the harmonic divergence witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .equilibrium import EquilibriumSolution, EtaGrid
from .errors import BlockBudgetExceededError
from .functions import HalfLineFunction, bump, hat, indicator, lincomb, zero_function
from .functionals import KernelContext, weak_norm
from .quad import (DEFAULT_QUAD, PrefixIntegrator, QuadratureSpec, _NODES, _W15,
                   adaptive_integral)


@dataclass(frozen=True)
class OscillatorPlan:
    """Partition bookkeeping for the sign-flipping construction."""

    n: int
    alphas: tuple
    betas: tuple
    density_mode: str          # "raw" | "normalized"
    epsilon: float
    mu_total: float
    kernel_factor: float       # (∫ v1^{-p'} V1^{p'})^{1/p'} over [c, d]
    max_mass_residual: float   # worst relative equal-mass deviation
    max_bisect_residual: float


def oscillator(h: HalfLineFunction, c: float, d: float, eps: float,
               sol: EquilibriumSolution, mode: str = "normalized",
               quad: QuadratureSpec = DEFAULT_QUAD, n_override: int | None = None,
               max_blocks: int = 100_000) -> tuple[HalfLineFunction, OscillatorPlan]:
    """Sign-flipping oscillator with per-block zero mean against 1/V1.

    raw mode returns V1·|h|·Σ(±χ) with blocks carrying equal |h| mass;
    normalized mode returns |h|·Σ(±χ) (so |g| = |h| on [c, d]) with blocks
    carrying equal |h|/V1 mass.  Either way every block integrates g/V1 to
    zero and the weak norm scales like 1/n.
    """
    if not (0.0 < c < d < math.inf):
        raise ValueError("need 0 < c < d < inf")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if mode not in ("raw", "normalized"):
        raise ValueError(f"unknown density mode {mode!r}")
    pc = sol.pair.p_conj
    habs = lambda x: np.abs(h.evaluate(np.asarray(x, dtype=float)))
    if mode == "raw":
        mu = habs
    else:
        mu = lambda x: habs(x) / sol.V1(np.asarray(x, dtype=float))
    edges = np.array(sorted({c, d, *(b for b in h.breakpoints if c < b < d)}))
    prefix = PrefixIntegrator(mu, edges, quad)
    total = prefix.total

    kf = adaptive_integral(
        lambda t: sol.w1_density(t) * sol.V1(np.asarray(t, dtype=float)) ** pc,
        c, d, quad=quad)
    kernel_factor = max(float(kf.value), 0.0) ** (1.0 / pc)

    if total <= 1e-300:
        plan = OscillatorPlan(1, (c, d), (0.5 * (c + d),), mode, eps, 0.0,
                              kernel_factor, 0.0, 0.0)
        return zero_function(label=f"osc[{h.label}]=0"), plan

    if n_override is not None:
        n = int(n_override)
        if n < 1:
            raise ValueError("n_override must be >= 1")
    else:
        n = int(math.floor(kernel_factor * total / eps)) + 1
    if n > max_blocks:
        raise BlockBudgetExceededError(n, max_blocks)

    def invert_mass(target: float) -> float:
        return brentq(lambda x: float(prefix.prefix(np.array([x]))[0]) - target,
                      c, d, xtol=1e-15 * (d - c), rtol=8.9e-16)

    step = total / n
    alphas = [c]
    betas = []
    for i in range(n):
        betas.append(invert_mass((i + 0.5) * step))
        alphas.append(invert_mass((i + 1.0) * step) if i < n - 1 else d)

    flip = np.empty(2 * n)
    flip[0::2] = alphas[:-1]
    flip[1::2] = betas
    sign_edges = np.concatenate([flip, [d]])

    v1fn = sol.V1

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        inside = (x >= c) & (x <= d)
        idx = np.searchsorted(sign_edges, x, side="right") - 1
        sign = np.where(idx % 2 == 0, 1.0, -1.0)
        base = habs(x)
        if mode == "raw":
            safe = np.where(inside, x, c)
            base = base * v1fn(safe)
        return np.where(inside, sign * base, 0.0)

    # certify the partition: equal block masses, bisecting betas
    a_arr = np.array(alphas)
    cum = prefix.prefix(a_arr)
    masses = np.diff(cum)
    beta_cum = prefix.prefix(np.array(betas))
    mass_res = float(np.max(np.abs(masses - step))) / step
    bis_res = float(np.max(np.abs(beta_cum - cum[:-1] - 0.5 * step))) / step

    gtilde = HalfLineFunction(
        evaluate, None, support=(c, d),
        label=f"osc[{h.label};n={n};{mode}]",
        breakpoints=tuple(sorted({*alphas, *betas,
                                  *(b for b in h.breakpoints if c < b < d)})))
    plan = OscillatorPlan(n, tuple(alphas), tuple(betas), mode, eps, total,
                          kernel_factor, mass_res, bis_res)
    return gtilde, plan


def extremal_F(g: HalfLineFunction, grid: EtaGrid, delta: int, i: int, N: int,
               quad: QuadratureSpec = DEFAULT_QUAD,
               samples_per_cell: int = 96) -> HalfLineFunction:
    """Near-extremal pairing function built from the block kernels of g.

    The duality pairing ∫ g (F_1 + F_2) reproduces the block sum of the
    decomposition exactly (the kernels are normalized by V1, making the
    identity hold without stray factors).
    """
    if delta not in (0, 1) or i not in (1, 2):
        raise ValueError("delta must be 0/1 and i must be 1/2")
    if grid.kmin > -N - 1 or grid.kmax < N + 1:
        raise ValueError(f"grid [{grid.kmin},{grid.kmax}] too small for N={N} "
                         "(needs one spare cell on each side)")
    sol = grid.solution
    pc = sol.pair.p_conj
    ctx = KernelContext(g, sol, quad)

    cell_data = {}
    for k in range(-N, N + 1):
        t_lo, t_hi = grid.cell(k)
        eta_k = t_hi
        kinks = [p for p in ctx.outer_points(t_lo, t_hi)]
        base = np.unique(np.concatenate([np.linspace(t_lo, t_hi, samples_per_cell),
                                         np.array(kinks, dtype=float)])) if kinks else \
            np.linspace(t_lo, t_hi, samples_per_cell)

        def g_block(ts):
            ts = np.asarray(ts, dtype=float)
            ek = np.full_like(ts, eta_k)
            if i == 1:
                lo_arg, hi_arg = ts, ek
            else:
                lo_arg, hi_arg = ek, np.maximum(sol.a_inv(ts), eta_k)
            phi = ctx.between("phi", lo_arg, hi_arg)
            if delta == 0:
                psi = ctx.between("psi", lo_arg, hi_arg)
                return sol.w1_cum(ts) * phi - psi
            return sol.V1(ts) * phi

        def s_kernel(ts):
            gb = g_block(ts)
            v1d = sol.V1(np.asarray(ts, dtype=float)) ** delta if delta else 1.0
            return sol.w1_density(ts) * np.sign(gb) * v1d * np.abs(gb) ** (pc - 1.0)

        # cumulative ∫ s and ∫ s·W1 on the sample grid, then monotone-free pchip
        mids = 0.5 * (base[:-1] + base[1:])
        half = 0.5 * np.diff(base)
        nodes = (mids[:, None] + half[:, None] * _NODES).ravel()
        sv = s_kernel(nodes).reshape(len(mids), 15)
        w1v = sol.w1_cum(nodes).reshape(len(mids), 15)
        p0_seg = (sv * _W15).sum(axis=1) * half
        p1_seg = ((sv * w1v) * _W15).sum(axis=1) * half
        p0 = np.concatenate([[0.0], np.cumsum(p0_seg)])
        p1 = np.concatenate([[0.0], np.cumsum(p1_seg)])
        cell_data[k] = (base, PchipInterpolator(base, p0, extrapolate=False),
                        PchipInterpolator(base, p1, extrapolate=False),
                        float(p0[-1]), float(p1[-1]))

    etas = {k: grid.value(k) for k in grid.indices}

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k in range(-N, N + 1):
            if i == 1:
                x_lo, x_hi = etas[k - 1], etas[k]
            else:
                x_lo, x_hi = etas[k], etas[k + 1]
            m = (x > x_lo) & (x <= x_hi)
            if not m.any():
                continue
            xs = x[m]
            _, P0, P1, p0_end, p1_end = cell_data[k]
            v1x = sol.V1(xs)
            if i == 1:
                p0 = P0(xs)
                if delta == 0:
                    w1a = sol.w1_cum(sol.a(xs))
                    out[m] = (P1(xs) - w1a * p0) / v1x
                else:
                    out[m] = p0 / v1x
            else:
                ax = np.clip(sol.a(xs), etas[k - 1], etas[k])
                p0a = P0(ax)
                if delta == 0:
                    w1a = sol.w1_cum(ax)
                    out[m] = ((p1_end - P1(ax)) - w1a * (p0_end - p0a)) / v1x
                else:
                    out[m] = (p0_end - p0a) / v1x
        return out

    if i == 1:
        support = (etas[-N - 1], etas[N])
    else:
        support = (etas[-N], etas[N + 1])
    bks = tuple(etas[k] for k in range(max(grid.kmin, -N - 1), min(grid.kmax, N + 1) + 1))
    return HalfLineFunction(evaluate, None, support=support,
                            label=f"F[{g.label};d{delta};i{i};N{N}]",
                            breakpoints=bks)


def smooth_to_g(phi: HalfLineFunction) -> HalfLineFunction:
    """The derivative of a compactly supported differentiable bump."""
    if phi.support is None or not math.isfinite(phi.support[1]):
        raise ValueError(f"{phi.label!r} must declare compact support")
    if not phi.has_derivative:
        raise ValueError(f"{phi.label!r} must declare a derivative")
    return HalfLineFunction(phi.derivative, None, support=phi.support,
                            label=f"d/dx[{phi.label}]", breakpoints=phi.breakpoints)


def c1_interpolant(xs, ys, label: str = "c1") -> HalfLineFunction:
    """Monotone-cubic interpolant through (xs, ys), zero outside [xs0, xs-1].

    The endpoint values must be zero so the extension is C^0; the derivative
    is the interpolant's own (exact, not numeric).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if abs(ys[0]) > 0 or abs(ys[-1]) > 0:
        raise ValueError("endpoint values must vanish")
    f = PchipInterpolator(xs, ys, extrapolate=False)
    df = f.derivative()
    lo, hi = float(xs[0]), float(xs[-1])

    def ev(x):
        x = np.asarray(x, dtype=float)
        v = f(np.clip(x, lo, hi))
        return np.where((x >= lo) & (x <= hi), v, 0.0)

    def dev(x):
        x = np.asarray(x, dtype=float)
        v = df(np.clip(x, lo, hi))
        return np.where((x > lo) & (x < hi), v, 0.0)

    return HalfLineFunction(ev, dev, support=(lo, hi), label=label,
                            breakpoints=tuple(xs))


def dual_gradient_bump(f: HalfLineFunction, pair, n_knots: int = 65,
                       smooth_passes: int = 3) -> HalfLineFunction:
    """C^1 bump aligned with v1^p |f'|^{p-1} sgn f', vanishing at the support ends.

    Used as the phi of the derivative pairing: ∫ f phi' ≈ -‖v1 f'‖_p^p up to
    the smoothing, which makes phi' a near-extremal weak-associate member for
    the derivative part of the Sobolev norm.
    """
    if f.support is None or not f.has_derivative:
        raise ValueError("f needs compact support and a derivative")
    lo, hi = f.support
    p = pair.p
    xs = np.linspace(lo, hi, n_knots)
    # sample off the exact knots so one-sided derivative values are irrelevant
    probe = np.clip(xs + 0.25 * (hi - lo) / (n_knots - 1), lo, hi)
    dfv = f.d(probe)
    raw = pair.v1.pow(p, probe) * np.abs(dfv) ** (p - 1.0) * np.sign(dfv)
    ys = raw.copy()
    kern = np.array([0.25, 0.5, 0.25])
    for _ in range(smooth_passes):
        ys = np.convolve(np.pad(ys, 1, mode="edge"), kern, mode="valid")
    ys[0] = ys[-1] = 0.0
    return c1_interpolant(xs, ys, label=f"dual-bump[{f.label}]")


@dataclass(frozen=True)
class WitnessTerm:
    k: int
    segment: tuple
    min_abs_f: float
    theta: float
    n_blocks: int
    weak_norm: float
    pairing: float
    lower_bound: float


@dataclass(frozen=True)
class WitnessReport:
    terms: tuple
    rejected: tuple            # (segment index, reason)
    partial_pairings: tuple    # cumulative ∫|f g_k| sums
    g_sum: HalfLineFunction | None
    sum_weak_norm: float | None


def witness_unbounded(f: HalfLineFunction, segments, sol: EquilibriumSolution,
                      k_max: int, quad: QuadratureSpec = DEFAULT_QUAD,
                      compute_sum_norm: bool = True,
                      norm_schedule: str = "geometric") -> WitnessReport:
    """Harmonic divergence witness: per-segment oscillators with summable norms.

    On segment k the flat level theta_k = 1/(k m_k (b_k - a_k)) makes the
    pairing with |f| at least 1/k while the term norms stay summable below 1,
    so the partial pairings grow like harmonic numbers.

    ``norm_schedule`` picks the per-term norm targets: "geometric" enforces
    ‖g_k‖ < 2^-k; "quadratic" enforces ‖g_k‖ < 1/(2 k^2) (still summing below
    1), which keeps block counts tractable for long walks where a geometric
    schedule would demand astronomically fine oscillators.
    """
    if norm_schedule == "geometric":
        target_of = lambda k: 2.0 ** (-k)
    elif norm_schedule == "quadratic":
        target_of = lambda k: 0.5 / (k * k)
    else:
        raise ValueError(f"unknown norm schedule {norm_schedule!r}")
    terms = []
    rejected = []
    gs = []
    partials = []
    running = 0.0
    prev_b = 0.0
    for idx, (a_k, b_k) in enumerate(list(segments)[:k_max], start=1):
        if not (prev_b <= a_k < b_k):
            rejected.append((idx, "segments must be disjoint and increasing"))
            continue
        prev_b = b_k
        xs = np.unique(np.concatenate([np.linspace(a_k, b_k, 257),
                                       [b for b in f.breakpoints if a_k <= b <= b_k]]))
        m_k = float(np.min(np.abs(f.evaluate(xs))))
        if m_k <= 0.0:
            rejected.append((idx, "min |f| = 0 on segment"))
            continue
        theta = 1.0 / (idx * m_k * (b_k - a_k))
        target = target_of(idx)
        level = indicator(a_k, b_k, theta, label=f"level{idx}")
        g_k, plan = oscillator(level, a_k, b_k, 0.5 * target, sol, "normalized", quad)
        wn = weak_norm(g_k, sol, quad).value
        for _ in range(8):
            if wn <= 0.9 * target:
                break
            n_new = int(math.ceil(plan.n * wn / (0.9 * target) * 1.2)) + 1
            g_k, plan = oscillator(level, a_k, b_k, 0.5 * target, sol, "normalized",
                                   quad, n_override=n_new)
            wn = weak_norm(g_k, sol, quad).value

        pair_pts = sorted({*g_k.breakpoints, *(b for b in f.breakpoints if a_k < b < b_k)})
        pr = adaptive_integral(
            lambda x: np.abs(f.evaluate(np.asarray(x, dtype=float)) * g_k.evaluate(x)),
            a_k, b_k, points=pair_pts, quad=quad)
        pairing = float(pr.value)
        running += pairing
        partials.append(running)
        terms.append(WitnessTerm(idx, (a_k, b_k), m_k, theta, plan.n, wn, pairing,
                                 theta * m_k * (b_k - a_k)))
        gs.append((1.0, g_k))

    g_sum = lincomb(gs, label="witness-sum") if gs else None
    sum_norm = None
    if g_sum is not None and compute_sum_norm:
        sum_norm = weak_norm(g_sum, sol, quad).value
    return WitnessReport(tuple(terms), tuple(rejected), tuple(partials), g_sum, sum_norm)


@dataclass(frozen=True)
class CorpusSpec:
    """Deterministic generator parameters for the test-function corpus."""

    seed: int = 1234
    n_hats: int = 7
    n_bumps: int = 3
    lo_range: tuple = (0.6, 2.0)
    width_range: tuple = (0.5, 2.5)
    height_range: tuple = (0.4, 2.0)


def hat_corpus(spec: CorpusSpec = CorpusSpec()) -> list[HalfLineFunction]:
    """Piecewise-linear hats and quartic bumps with f(0) = 0, compact support."""
    rng = np.random.default_rng(spec.seed)
    out = []
    for j in range(spec.n_hats):
        lo = rng.uniform(*spec.lo_range)
        width = rng.uniform(*spec.width_range)
        peak = lo + width * rng.uniform(0.25, 0.75)
        height = rng.uniform(*spec.height_range)
        out.append(hat(lo, peak, lo + width, height, label=f"hat{j}"))
    for j in range(spec.n_bumps):
        lo = rng.uniform(*spec.lo_range)
        width = rng.uniform(*spec.width_range)
        height = rng.uniform(*spec.height_range)
        out.append(bump(lo, lo + width, height, label=f"bump{j}"))
    return out
