"""Equilibrium boundary functions a(t), b(t) and the covering grid.

For each t > 0 the window (a(t), b(t)) balances the mass of v1^{-p'} on both
sides of t and is normalized so that the product of the window norms equals
one.  Both residuals are monotone in the half-mass m = ∫_a^t v1^{-p'}, so the
solver is a nested bracketed root find: closed-form (or bisected) inversion of
the cumulative recovers a and b from m, and an outer bracket + Brent step
drives the normalization residual to zero.  No Jacobian is ever needed.

Solved windows are cached on a geometric node grid and interpolated
monotonically (PCHIP in log-log coordinates) between nodes; every accessor
takes ``exact=True`` to bypass the cache for verification runs.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import GridRangeError, WindowUnsolvableError
from .quad import DEFAULT_QUAD, QuadratureSpec, PrefixIntegrator
from .weights import Weight, WeightPair, check_S6, integrate_power

_TINY = 1e-280
_CAP_ACCEPT = 1e-8  # |normalization residual| accepted at a mass-cap boundary


class _MassInfeasible(Exception):
    def __init__(self, side: str):
        self.side = side


def cumulative_callable(w: Weight, r: float, anchor: float,
                        quad: QuadratureSpec = DEFAULT_QUAD):
    """Vectorized x ↦ ∫_anchor^x w^r (negative below the anchor)."""
    if w.gamma is not None:
        q = r * w.gamma
        if q == -1.0:
            return lambda x: np.log(np.asarray(x, dtype=float) / anchor)
        e = q + 1.0
        a_pow = anchor ** e
        return lambda x: (np.asarray(x, dtype=float) ** e - a_pow) / e

    state = {"prefix": None, "lo": anchor / 4.0, "hi": anchor * 4.0}
    integrand = lambda x: np.asarray(w.evaluate(x), dtype=float) ** r

    def rebuild():
        span_breaks = [b for b in w.breakpoints if state["lo"] < b < state["hi"]]
        n = max(64, int(24 * math.log(state["hi"] / state["lo"])))
        edges = np.unique(np.concatenate([
            np.geomspace(state["lo"], state["hi"], n), np.array(span_breaks + [anchor])]))
        state["prefix"] = PrefixIntegrator(integrand, edges, quad)

    rebuild()

    def cum(x):
        x = np.asarray(x, dtype=float)
        lo = float(np.min(x)) if x.size else anchor
        hi = float(np.max(x)) if x.size else anchor
        if lo < state["lo"] or hi > state["hi"]:
            state["lo"] = min(state["lo"], lo / 2.0)
            state["hi"] = max(state["hi"], hi * 2.0)
            rebuild()
        p = state["prefix"]
        return p.prefix(x) - p.prefix(np.array([anchor]))[0]

    return cum


class EquilibriumSolution:
    """Boundary functions, their inverses, and window-mass accessors.

    Solving is pure per t; the node cache is guarded by a lock so concurrent
    readers see a consistent table (reads are lock-free, inserts serialized).
    """

    def __init__(self, pair: WeightPair, tol: float = 1e-10,
                 quad: QuadratureSpec = DEFAULT_QUAD, cache: bool = True,
                 nodes_per_efold: int = 192, require_s6: bool = True):
        self.pair = pair
        self.tol = tol
        self.quad = quad
        self.cache_enabled = cache
        self._h = 1.0 / nodes_per_efold
        self._r1 = -pair.p_conj   # v1 enters through v1^{-p'}
        self._nodes: dict[int, tuple[float, float]] = {}   # k -> (log a, log b)
        self._k_lo = None
        self._k_hi = None
        self._bad_lo = None       # known-unsolvable node just below the range
        self._bad_hi = None
        self._interp = None       # (a, b, a_inv, b_inv) PCHIPs, rebuilt when dirty
        self._lock = threading.RLock()
        self._w1_cum = cumulative_callable(pair.v1, self._r1, 1.0, quad)
        self._v0_cum = cumulative_callable(pair.v0, pair.p, 1.0, quad)
        self.s6 = check_S6(pair, 1.0, quad)
        if require_s6 and self.s6.satisfied is False:
            raise ValueError(
                "the weight pair fails the two-sided divergence condition; "
                "pass require_s6=False to construct anyway (degenerate regions "
                "will report window-unsolvable)")

    # -- exact window solving -------------------------------------------------

    def _mass_down(self, t: float, m: float) -> float:
        """a with ∫_a^t v1^{-p'} = m."""
        v1 = self.pair.v1
        if v1.mass_bound_down is not None:
            a = v1.mass_bound_down(self._r1, t, m)
            if a <= 0.0:
                try:
                    cap = integrate_power(v1, self._r1, 0.0, t, self.quad)
                except Exception:
                    cap = math.inf
                if math.isfinite(cap) and abs(cap - m) <= 1e-12 * m:
                    return 0.0
                raise _MassInfeasible("lower")
            return a
        lo = t * 0.5
        while integrate_power(v1, self._r1, lo, t, self.quad) < m:
            lo *= 0.5
            if lo < _TINY:
                raise _MassInfeasible("lower")
        return brentq(lambda a: integrate_power(v1, self._r1, a, t, self.quad) - m,
                      lo, t * (1 - 1e-15), xtol=1e-300, rtol=8.9e-16)

    def _mass_up(self, t: float, m: float) -> float:
        """b with ∫_t^b v1^{-p'} = m."""
        v1 = self.pair.v1
        if v1.mass_bound_up is not None:
            b = v1.mass_bound_up(self._r1, t, m)
            if math.isinf(b):
                raise _MassInfeasible("upper")
            return b
        hi = t * 2.0
        while integrate_power(v1, self._r1, t, hi, self.quad) < m:
            hi *= 2.0
            if hi > 1e280:
                raise _MassInfeasible("upper")
        return brentq(lambda b: integrate_power(v1, self._r1, t, b, self.quad) - m,
                      t * (1 + 1e-15), hi, xtol=1e-300, rtol=8.9e-16)

    def _norm_residual(self, t: float, m: float):
        """log of the normalization product at half-mass m, with the window."""
        a = self._mass_down(t, m)
        b = self._mass_up(t, m)
        v0_ab = integrate_power(self.pair.v0, self.pair.p, a, b, self.quad) if a > 0 else \
            integrate_power(self.pair.v0, self.pair.p, _TINY, b, self.quad)
        if v0_ab <= 0:
            return -math.inf, a, b
        val = math.log(2.0 * m) / self.pair.p_conj + math.log(v0_ab) / self.pair.p
        return val, a, b

    def _solve_exact(self, t: float) -> tuple[float, float]:
        if not (t > 0) or not math.isfinite(t):
            raise ValueError(f"t must be positive and finite, got {t!r}")
        v0t = float(np.asarray(self.pair.v0.evaluate(t), dtype=float))
        v1t = float(np.asarray(self.pair.v1.evaluate(t), dtype=float))
        m = 1.0 / (2.0 * v0t * v1t ** (self.pair.p_conj - 1.0)) if v0t > 0 and v1t > 0 else 1.0

        def res(mm):
            return self._norm_residual(t, mm)[0]

        # lower bracket: shrink until the residual is negative
        lo = m
        r_lo = None
        for _ in range(600):
            try:
                r_lo = res(lo)
            except _MassInfeasible:
                lo *= 0.25
                continue
            if r_lo < 0.0:
                break
            lo *= 0.25
            if lo < _TINY:
                raise WindowUnsolvableError(t, "lower")
        else:
            raise WindowUnsolvableError(t, "lower")

        # upper bracket: grow until positive, probing the feasibility frontier
        hi = lo
        r_hi = r_lo
        for _ in range(600):
            trial = hi * 4.0
            try:
                r_trial = res(trial)
            except _MassInfeasible as exc:
                feas, infeas = hi, trial
                for _ in range(200):
                    mid = math.sqrt(feas * infeas)
                    if mid <= feas * (1 + 1e-14) or mid >= infeas * (1 - 1e-14):
                        break
                    try:
                        res(mid)
                        feas = mid
                    except _MassInfeasible:
                        infeas = mid
                r_f, a_f, b_f = self._norm_residual(t, feas)
                if -_CAP_ACCEPT < r_f <= 0.0:
                    return a_f, b_f
                if r_f > 0.0:
                    hi, r_hi = feas, r_f
                    break
                raise WindowUnsolvableError(t, exc.side)
            if r_trial > 0.0:
                hi, r_hi = trial, r_trial
                break
            hi, r_hi = trial, r_trial
        if not (r_lo < 0.0 <= r_hi):
            raise WindowUnsolvableError(t, "upper")

        def res_safe(uu):
            # interior probes can land a rounding error past the mass cap;
            # the residual is +inf there, which any large value represents
            try:
                return res(math.exp(uu))
            except _MassInfeasible:
                return 1e9

        u = brentq(res_safe, math.log(lo), math.log(hi), xtol=1e-14, rtol=8.9e-16)
        try:
            _, a, b = self._norm_residual(t, math.exp(u))
        except _MassInfeasible:
            _, a, b = self._norm_residual(t, math.exp(u) * (1.0 - 1e-12))
        return a, b

    # -- node cache + interpolation -------------------------------------------

    def _node_t(self, k: int) -> float:
        return math.exp(k * self._h)

    def _solve_node(self, k: int) -> bool:
        t = self._node_t(k)
        try:
            a, b = self._solve_exact(t)
        except WindowUnsolvableError:
            return False
        if a < _TINY:
            return False  # boundary-degenerate; exact path still serves it
        self._nodes[k] = (math.log(a), math.log(b))
        self._interp = None
        return True

    def _ensure_range(self, klo: int, khi: int) -> bool:
        """Extend the contiguous solved node range to cover [klo, khi].

        Inserts are serialized; concurrent readers either see the finished
        extension or fall back to exact solves.
        """
        with self._lock:
            return self._ensure_range_locked(klo, khi)

    def _ensure_range_locked(self, klo: int, khi: int) -> bool:
        if self._k_lo is None:
            mid = (klo + khi) // 2
            for k in sorted(range(mid - 32, mid + 33), key=lambda q: abs(q - mid)):
                if self._solve_node(k):
                    self._k_lo = self._k_hi = k
                    break
            else:
                return False
        ok = True
        while self._k_hi < khi:
            if (self._bad_hi is not None and self._k_hi + 1 >= self._bad_hi) or \
                    not self._solve_node(self._k_hi + 1):
                self._bad_hi = self._k_hi + 1
                ok = False
                break
            self._k_hi += 1
        while self._k_lo > klo:
            if (self._bad_lo is not None and self._k_lo - 1 <= self._bad_lo) or \
                    not self._solve_node(self._k_lo - 1):
                self._bad_lo = self._k_lo - 1
                ok = False
                break
            self._k_lo -= 1
        return ok

    _SLOPE_LIMIT = 3.0  # max |d log-boundary / d log t| trusted for interpolation

    def _interpolants(self):
        if self._interp is None:
            with self._lock:
                ks = np.arange(self._k_lo, self._k_hi + 1)
                us = ks * self._h
                la = np.array([self._nodes[k][0] for k in ks])
                lb = np.array([self._nodes[k][1] for k in ks])
                cuts = {}
                for which, ly in ((0, la), (1, lb)):
                    # exclude the steep edge runs (degenerate-frontier zones),
                    # where the boundary varies over decades per cell and
                    # interpolation cannot be trusted; queries there solve exactly
                    steep = (np.abs(np.diff(ly)) / self._h) > self._SLOPE_LIMIT
                    i0 = 0
                    if len(steep) and steep[0]:
                        i0 = int(np.argmin(steep)) if not steep.all() else len(steep)
                        i0 = min(max(i0, 1), len(ly) - 1)
                    j0 = len(ly) - 1
                    if len(steep) and steep[-1]:
                        run = int(np.argmin(steep[::-1])) if not steep.all() else len(steep)
                        j0 = max(len(ly) - 1 - max(run, 1), 0)
                    cuts[(which, False)] = (us[i0], us[j0])
                    cuts[(which, True)] = (ly[i0], ly[j0])
                self._interp = (
                    PchipInterpolator(us, la, extrapolate=False),
                    PchipInterpolator(us, lb, extrapolate=False),
                    PchipInterpolator(la, us, extrapolate=False),
                    PchipInterpolator(lb, us, extrapolate=False),
                    cuts,
                )
        return self._interp

    def _eval_cached(self, x, which: int, inverse: bool):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xs = np.atleast_1d(x).astype(float)
        if np.any(xs <= 0):
            raise ValueError("arguments must be positive")
        out = np.empty_like(xs)
        ux = np.log(xs)
        if not inverse:
            self._ensure_range(int(np.floor(ux.min() / self._h)) - 1,
                               int(np.ceil(ux.max() / self._h)) + 1)
        else:
            # grow the range until the node image covers the queried values
            self._ensure_range(int(np.floor(ux.min() / self._h)) - 2,
                               int(np.ceil(ux.max() / self._h)) + 2)
            while self._k_lo is not None:
                prev = (self._k_lo, self._k_hi)
                img_lo = self._nodes[self._k_lo][which]
                img_hi = self._nodes[self._k_hi][which]
                need_lo = ux.min() < img_lo + 2 * self._h
                need_hi = ux.max() > img_hi - 2 * self._h
                if not need_lo and not need_hi:
                    break
                if need_lo:
                    self._ensure_range(self._k_lo - 16, self._k_hi)
                if need_hi:
                    self._ensure_range(self._k_lo, self._k_hi + 16)
                if (self._k_lo, self._k_hi) == prev:
                    break
        good = np.zeros(xs.shape, dtype=bool)
        if self._k_hi is not None and self._k_hi - self._k_lo >= 3:
            fa, fb, fai, fbi, cuts = self._interpolants()
            fn = (fa, fb)[which] if not inverse else (fai, fbi)[which]
            vals = fn(ux)
            good = ~np.isnan(vals)
            cut_lo, cut_hi = cuts[(which, inverse)]
            good &= (ux >= cut_lo) & (ux <= cut_hi)
            out[good] = np.exp(vals[good])
        if not np.all(good):
            for i in np.nonzero(~good)[0]:
                out[i] = self._eval_exact_scalar(float(xs[i]), which, inverse)
        return float(out[0]) if scalar else out

    def _eval_exact_scalar(self, x: float, which: int, inverse: bool) -> float:
        if not inverse:
            return self._solve_exact(x)[which]
        return self._invert_exact(x, which)

    def _invert_exact(self, s: float, which: int) -> float:
        """Solve boundary(x) = s by bracketed search (which: 0 for a, 1 for b).

        The solvable set is an interval; when the search walks into a
        degenerate region, the frontier is located by bisection so targets
        arbitrarily close to it can still be inverted.
        """
        def try_val(x):
            try:
                return self._solve_exact(x)[which]
            except WindowUnsolvableError:
                return None

        anchor = None
        x = s
        for _ in range(200):
            v = try_val(x)
            if v is not None:
                anchor = (x, v)
                break
            x *= 2.0
            if x > 1e280:
                break
        if anchor is None:
            x = s
            for _ in range(200):
                x *= 0.5
                if x < _TINY:
                    break
                v = try_val(x)
                if v is not None:
                    anchor = (x, v)
                    break
        if anchor is None:
            raise WindowUnsolvableError(s, "both", f"no solvable points found near {s!r}")
        x0, v0 = anchor
        if v0 == s:
            return x0
        name = "ab"[which]
        if v0 < s:
            lo = x0
            hi = x0
            for _ in range(400):
                hi *= 2.0
                v = try_val(hi)
                if v is None:
                    x_lo, x_hi = lo, hi
                    found = None
                    for _ in range(220):
                        mid = math.sqrt(x_lo * x_hi)
                        vm = try_val(mid)
                        if vm is None:
                            x_hi = mid
                        elif vm >= s:
                            found = mid
                            break
                        else:
                            x_lo = mid
                            lo = mid
                        if x_hi / x_lo - 1.0 < 4e-16:
                            break
                    if found is None:
                        raise WindowUnsolvableError(
                            s, "upper", f"{name}^-1({s!r}) lies beyond the solvable range")
                    hi = found
                    break
                if v >= s:
                    break
                lo = hi
            else:
                raise WindowUnsolvableError(s, "upper", f"cannot bracket {name}^-1 at {s!r}")
        else:
            hi = x0
            lo = x0
            for _ in range(400):
                lo *= 0.5
                if lo < _TINY:
                    raise WindowUnsolvableError(
                        s, "lower", f"{name}^-1({s!r}) lies beyond the solvable range")
                v = try_val(lo)
                if v is None:
                    x_lo, x_hi = lo, hi
                    found = None
                    for _ in range(220):
                        mid = math.sqrt(x_lo * x_hi)
                        vm = try_val(mid)
                        if vm is None:
                            x_lo = mid
                        elif vm <= s:
                            found = mid
                            break
                        else:
                            x_hi = mid
                            hi = mid
                        if x_hi / x_lo - 1.0 < 4e-16:
                            break
                    if found is None:
                        raise WindowUnsolvableError(
                            s, "lower", f"{name}^-1({s!r}) lies beyond the solvable range")
                    lo = found
                    break
                if v <= s:
                    break
                hi = lo
            else:
                raise WindowUnsolvableError(s, "lower", f"cannot bracket {name}^-1 at {s!r}")
        return brentq(lambda x: self._solve_exact(x)[which] - s, lo, hi,
                      xtol=1e-300, rtol=8.9e-16)

    # -- public accessors ------------------------------------------------------

    def window(self, t, *, exact: bool = False):
        """(a(t), b(t)) — exact solve or cache-interpolated."""
        if exact or not self.cache_enabled:
            if np.ndim(t) == 0:
                return self._solve_exact(float(t))
            pairs = [self._solve_exact(float(x)) for x in np.asarray(t, dtype=float)]
            return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])
        return self.a(t), self.b(t)

    def a(self, t, *, exact: bool = False):
        if exact or not self.cache_enabled:
            if np.ndim(t) == 0:
                return self._solve_exact(float(t))[0]
            return np.array([self._solve_exact(float(x))[0] for x in np.asarray(t, dtype=float)])
        return self._eval_cached(t, 0, inverse=False)

    def b(self, t, *, exact: bool = False):
        if exact or not self.cache_enabled:
            if np.ndim(t) == 0:
                return self._solve_exact(float(t))[1]
            return np.array([self._solve_exact(float(x))[1] for x in np.asarray(t, dtype=float)])
        return self._eval_cached(t, 1, inverse=False)

    def a_inv(self, s, *, exact: bool = False):
        if exact or not self.cache_enabled:
            if np.ndim(s) == 0:
                return self._invert_exact(float(s), 0)
            return np.array([self._invert_exact(float(x), 0) for x in np.asarray(s, dtype=float)])
        return self._eval_cached(s, 0, inverse=True)

    def b_inv(self, s, *, exact: bool = False):
        if exact or not self.cache_enabled:
            if np.ndim(s) == 0:
                return self._invert_exact(float(s), 1)
            return np.array([self._invert_exact(float(x), 1) for x in np.asarray(s, dtype=float)])
        return self._eval_cached(s, 1, inverse=True)

    def w1_cum(self, x):
        """∫_1^x v1^{-p'} (vectorized; negative below 1)."""
        return self._w1_cum(x)

    def v0_cum(self, x):
        """∫_1^x v0^p (vectorized)."""
        return self._v0_cum(x)

    def w1_density(self, x):
        """v1(x)^{-p'}, vectorized."""
        return self.pair.v1.pow(-self.pair.p_conj, x)

    def V1_minus(self, t, *, exact: bool = False):
        return self._w1_cum(t) - self._w1_cum(self.a(t, exact=exact))

    def V1_plus(self, t, *, exact: bool = False):
        return self._w1_cum(self.b(t, exact=exact)) - self._w1_cum(t)

    def V1(self, t, *, exact: bool = False):
        a = self.a(t, exact=exact)
        b = self.b(t, exact=exact)
        return self._w1_cum(b) - self._w1_cum(a)

    def V0_minus(self, t, *, exact: bool = False):
        return self._v0_cum(t) - self._v0_cum(self.a(t, exact=exact))

    def V0_plus(self, t, *, exact: bool = False):
        return self._v0_cum(self.b(t, exact=exact)) - self._v0_cum(t)

    def V0(self, t, *, exact: bool = False):
        a = self.a(t, exact=exact)
        b = self.b(t, exact=exact)
        return self._v0_cum(b) - self._v0_cum(a)

    def masses(self, t: float, *, exact: bool = False) -> "WindowMasses":
        """All six window masses at t in one bundle."""
        a = self.a(t, exact=exact)
        b = self.b(t, exact=exact)
        w1a, w1t, w1b = (float(self._w1_cum(x)) for x in (a, t, b))
        v0a, v0t, v0b = (float(self._v0_cum(x)) for x in (a, t, b))
        return WindowMasses(w1t - w1a, w1b - w1t, w1b - w1a,
                            v0t - v0a, v0b - v0t, v0b - v0a)

    def residuals(self, t: float) -> tuple[float, float]:
        """(balance, normalization) residual certificates at t, from exact solves."""
        a, b = self._solve_exact(t)
        lo = self._w1_cum(max(a, _TINY))
        mid = self._w1_cum(t)
        hi = self._w1_cum(b)
        m_lo = mid - lo
        m_hi = hi - mid
        v0_ab = self._v0_cum(b) - self._v0_cum(max(a, _TINY))
        res2 = abs(m_lo - m_hi)
        res3 = abs((m_lo + m_hi) ** (1.0 / self.pair.p_conj) *
                   v0_ab ** (1.0 / self.pair.p) - 1.0)
        return float(res2), float(res3)


@dataclass(frozen=True)
class WindowMasses:
    """The window masses (v1^{-p'} and v0^p) split at the center point."""

    v1_minus: float
    v1_plus: float
    v1: float
    v0_minus: float
    v0_plus: float
    v0: float


def solve_window(pair: WeightPair, t: float, tol: float = 1e-10,
                 quad: QuadratureSpec = DEFAULT_QUAD,
                 require_s6: bool = True) -> tuple[float, float]:
    """Solve one equilibrium window; returns (a, b) with both residuals ≤ tol."""
    sol = EquilibriumSolution(pair, tol=tol, quad=quad, cache=False, require_s6=require_s6)
    a, b = sol._solve_exact(t)
    res2, res3 = sol.residuals(t)
    if res2 > tol or res3 > tol:
        raise WindowUnsolvableError(
            t, "residual", f"window residuals ({res2:.3e}, {res3:.3e}) exceed tol {tol:g}")
    return a, b


@dataclass(frozen=True)
class EtaGrid:
    """The covering sequence eta_k with eta_0 = 1 and eta_k = a^{-1}(eta_{k-1})."""

    indices: tuple
    values: tuple
    solution: EquilibriumSolution

    def value(self, k: int) -> float:
        return self.values[self.indices.index(k)]

    def cell(self, k: int) -> tuple[float, float]:
        """The k-th cell [eta_{k-1}, eta_k]."""
        return self.value(k - 1), self.value(k)

    @property
    def kmin(self) -> int:
        return self.indices[0]

    @property
    def kmax(self) -> int:
        return self.indices[-1]

    @property
    def span(self) -> tuple[float, float]:
        return self.values[0], self.values[-1]


def build_eta_grid(sol: EquilibriumSolution, N: int, *,
                   allow_truncation: bool = False) -> EtaGrid:
    """Walk eta_k from eta_0 = 1: upward through a^{-1}, downward through a.

    When the walk hits a degenerate region the default is to raise
    :class:`GridRangeError` carrying the reachable range; with
    ``allow_truncation=True`` the partial grid is returned instead.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    up = [1.0]
    lo_stop = hi_stop = None
    for _ in range(N):
        try:
            nxt = sol.a_inv(up[-1], exact=True)
        except WindowUnsolvableError as exc:
            hi_stop = exc
            break
        up.append(nxt)
    down = []
    cur = 1.0
    for _ in range(N):
        try:
            prev = sol.a(cur, exact=True)
        except WindowUnsolvableError as exc:
            lo_stop = exc
            break
        if prev <= 0.0:
            lo_stop = WindowUnsolvableError(cur, "lower", "grid walk reached the origin")
            break
        down.append(prev)
        cur = prev
    kmin = -len(down)
    kmax = len(up) - 1
    values = tuple(reversed(down)) + tuple(up)
    indices = tuple(range(kmin, kmax + 1))
    if (lo_stop or hi_stop) and not allow_truncation:
        exc = lo_stop or hi_stop
        raise GridRangeError(exc.t, exc.endpoint, (kmin, kmax),
                             dict(zip(indices, values)))
    return EtaGrid(indices, values, sol)


def check_identity(sol: EquilibriumSolution, t: float, h: float | None = None) -> float:
    """Residual of the differential balance identity at t.

    |v1^{-p'}(a(t)) a'(t) + v1^{-p'}(b(t)) b'(t) - 2 v1^{-p'}(t)| with a', b'
    by central differences of step h (cache bypassed).
    """
    if h is None:
        h = max(1e-6 * t, 1e-9)
    a_m, b_m = sol.window(t - h, exact=True)
    a_p, b_p = sol.window(t + h, exact=True)
    a_t, b_t = sol.window(t, exact=True)
    da = (a_p - a_m) / (2.0 * h)
    db = (b_p - b_m) / (2.0 * h)
    w = lambda x: float(sol.w1_density(x))
    return abs(w(a_t) * da + w(b_t) * db - 2.0 * w(t))
