"""Sobolev and associate-space norm functionals.

All associate norms integrate kernels of the moving window [t, a^{-1}(t)].
The signed inner integrals (absolute value outside) are evaluated through
shared antiderivative caches so that their cancellation is never split
inconsistently by the outer adaptive scheme; quadrature panels are cut at the
test function's breakpoints and at their window images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import EquilibriumSolution, EtaGrid
from .errors import DerivativeRequiredError, WindowUnsolvableError
from .functions import HalfLineFunction, restrict
from .quad import DEFAULT_QUAD, PrefixIntegrator, QuadratureSpec, adaptive_integral
from .weights import Weight, WeightPair

_FLOOR = 1e-12


@dataclass(frozen=True)
class NormReport:
    """A computed norm with its quadrature error estimate and window."""

    value: float
    est_error: float
    truncation_used: tuple[float, float]
    components: dict = field(default_factory=dict)
    warnings: tuple = ()

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class BlockCell:
    k: int
    i: int
    delta: int
    contribution_pow: float


@dataclass(frozen=True)
class BlockReport(NormReport):
    table: tuple = ()


def _root_error(pow_value: float, pow_error: float, root: float) -> float:
    if pow_value <= 0.0:
        return pow_error ** (1.0 / root)
    return pow_error * pow_value ** (1.0 / root - 1.0) / root


def _support_window(g: HalfLineFunction, quad: QuadratureSpec) -> tuple[float, float]:
    if g.support is not None:
        return g.support
    if quad.truncation is not None:
        return quad.truncation
    raise ValueError(
        f"function {g.label!r} declares no support and the quadrature spec has "
        "no truncation window")


def _lenient_a(sol: EquilibriumSolution, x: float, steps: int = 1) -> float:
    for _ in range(steps):
        try:
            nxt = sol.a(x)
        except WindowUnsolvableError:
            break
        if nxt <= 0.0:
            break
        x = nxt
    return x


def _lenient_a_inv(sol: EquilibriumSolution, x: float, steps: int = 1) -> float:
    for _ in range(steps):
        try:
            x = sol.a_inv(x)
        except WindowUnsolvableError:
            break
    return x


class KernelContext:
    """Shared inner-integral caches for one (g, sol) pair.

    ``between(kind, lo, hi)`` returns ∫_lo^hi of the kernel integrand:
    'phi' is g/V1, 'psi' is g(x) W1(a(x))/V1(x) with W1 the cumulative
    v1^{-p'}, and 'abs' is |g|.
    """

    def __init__(self, g: HalfLineFunction, sol: EquilibriumSolution,
                 quad: QuadratureSpec = DEFAULT_QUAD):
        self.g = g
        self.sol = sol
        self.quad = quad
        self.lo, self.hi = _support_window(g, quad)
        self.lo = max(self.lo, _FLOOR)
        bks = sorted({self.lo, self.hi,
                      *(b for b in g.breakpoints if self.lo < b < self.hi)})
        self._edges = np.array(bks)
        self._prefixes: dict[str, PrefixIntegrator] = {}
        try:
            self.window_lo = sol.a(self.lo)
        except WindowUnsolvableError:
            self.window_lo = 0.0

    def _integrand(self, kind: str):
        g, sol = self.g, self.sol
        if kind == "abs":
            return lambda x: np.abs(g.evaluate(np.asarray(x, dtype=float)))
        if kind == "phi":
            def phi(x):
                x = np.asarray(x, dtype=float)
                return g.evaluate(x) / sol.V1(x)
            return phi
        if kind == "psi":
            def psi(x):
                x = np.asarray(x, dtype=float)
                return g.evaluate(x) * sol.w1_cum(sol.a(x)) / sol.V1(x)
            return psi
        raise KeyError(kind)

    def prefix(self, kind: str) -> PrefixIntegrator:
        if kind not in self._prefixes:
            self._prefixes[kind] = PrefixIntegrator(self._integrand(kind), self._edges, self.quad)
        return self._prefixes[kind]

    def between(self, kind: str, lo, hi):
        p = self.prefix(kind)
        return p.prefix(hi) - p.prefix(lo)

    def outer_points(self, t_lo: float, t_hi: float, extra=()) -> list[float]:
        """Kink registration: breakpoints and their window preimages."""
        pts = set(extra)
        for b in self._edges:
            pts.add(float(b))
            try:
                pts.add(float(self.sol.a(b)))
            except WindowUnsolvableError:
                pass
        return sorted(p for p in pts if t_lo < p < t_hi)

    def outer_range(self, widen_steps: int = 2) -> tuple[float, float]:
        """Support window widened by grid cells; kernels vanish outside."""
        t_lo = max(_FLOOR, _lenient_a(self.sol, self.lo, widen_steps))
        t_hi = _lenient_a_inv(self.sol, self.hi, widen_steps)
        if self.quad.truncation is not None:
            t_lo = max(t_lo, self.quad.truncation[0])
            t_hi = min(t_hi, self.quad.truncation[1])
        return t_lo, t_hi


def strong_norm(g: HalfLineFunction, sol: EquilibriumSolution,
                quad: QuadratureSpec = DEFAULT_QUAD) -> NormReport:
    """Strong associate norm: the window operator applied to |g|."""
    pc = sol.pair.p_conj
    ctx = KernelContext(g, sol, quad)
    t_lo, t_hi = ctx.outer_range()
    hit_lo, hit_hi = ctx.window_lo, ctx.hi

    def integrand(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        mask = (t > hit_lo) & (t < hit_hi)
        if mask.any():
            ts = t[mask]
            ai = sol.a_inv(ts)
            inner = ctx.between("abs", ts, ai)
            out[mask] = sol.w1_density(ts) * inner ** pc
        return out

    res = adaptive_integral(integrand, t_lo, t_hi,
                            points=ctx.outer_points(t_lo, t_hi), quad=quad)
    pow_val = max(float(res.value), 0.0)
    value = pow_val ** (1.0 / pc)
    return NormReport(value, _root_error(pow_val, res.est_error, pc), (t_lo, t_hi),
                      components={"G_sf_pow": pow_val},
                      warnings=() if res.converged else ("quadrature-budget",))


def weak_norm(g: HalfLineFunction, sol: EquilibriumSolution,
              quad: QuadratureSpec = DEFAULT_QUAD) -> NormReport:
    """Weak associate norm: sum of the kernel component and the mass component.

    Both share the a^{-1} and V1 evaluations and the inner antiderivatives.
    """
    pc = sol.pair.p_conj
    ctx = KernelContext(g, sol, quad)
    t_lo, t_hi = ctx.outer_range()
    hit_lo, hit_hi = ctx.window_lo, ctx.hi

    def integrand(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros((t.size, 2))
        mask = (t > hit_lo) & (t < hit_hi)
        if mask.any():
            ts = t[mask]
            ai = sol.a_inv(ts)
            phi = ctx.between("phi", ts, ai)
            psi = ctx.between("psi", ts, ai)
            w1d = sol.w1_density(ts)
            w1t = sol.w1_cum(ts)
            v1t = sol.V1(ts)
            out[mask, 0] = w1d * np.abs(w1t * phi - psi) ** pc
            out[mask, 1] = w1d * (v1t * np.abs(phi)) ** pc
        return out

    res = adaptive_integral(integrand, t_lo, t_hi,
                            points=ctx.outer_points(t_lo, t_hi), quad=quad)
    gfrak_pow, gcal_pow = (max(float(v), 0.0) for v in res.value)
    gfrak = gfrak_pow ** (1.0 / pc)
    gcal = gcal_pow ** (1.0 / pc)
    err = (_root_error(gfrak_pow, res.est_error, pc) +
           _root_error(gcal_pow, res.est_error, pc))
    return NormReport(gfrak + gcal, err, (t_lo, t_hi),
                      components={"G_frak": gfrak, "G_cal": gcal},
                      warnings=() if res.converged else ("quadrature-budget",))


def block_norm(g: HalfLineFunction, grid: EtaGrid,
               quad: QuadratureSpec = DEFAULT_QUAD) -> BlockReport:
    """Cellwise decomposition of the weak norm over the covering grid.

    value^{p'} is the sum over cells k, split index i and kernel power delta of
    ∫_cell v1^{-p'} |G^{(delta)}_{i,k}|^{p'}; the full table is returned.
    """
    sol = grid.solution
    pc = sol.pair.p_conj
    ctx = KernelContext(g, sol, quad)
    warnings = []
    span_lo, span_hi = grid.span
    if ctx.window_lo < span_lo or ctx.hi > span_hi:
        warnings.append("grid-under-coverage")

    rows = []
    total_pow = 0.0
    total_err = 0.0
    for k in grid.indices[1:]:
        c_lo, c_hi = grid.cell(k)
        eta_k = c_hi

        def integrand(t, eta_k=eta_k):
            t = np.asarray(t, dtype=float)
            out = np.zeros((t.size, 4))
            ts = np.clip(t, c_lo, c_hi)
            ai = np.maximum(sol.a_inv(ts), eta_k)
            phi1 = ctx.between("phi", ts, np.full_like(ts, eta_k))
            psi1 = ctx.between("psi", ts, np.full_like(ts, eta_k))
            phi2 = ctx.between("phi", np.full_like(ts, eta_k), ai)
            psi2 = ctx.between("psi", np.full_like(ts, eta_k), ai)
            w1d = sol.w1_density(ts)
            w1t = sol.w1_cum(ts)
            v1t = sol.V1(ts)
            out[:, 0] = w1d * np.abs(w1t * phi1 - psi1) ** pc   # i=1, delta=0
            out[:, 1] = w1d * np.abs(w1t * phi2 - psi2) ** pc   # i=2, delta=0
            out[:, 2] = w1d * (v1t * np.abs(phi1)) ** pc        # i=1, delta=1
            out[:, 3] = w1d * (v1t * np.abs(phi2)) ** pc        # i=2, delta=1
            return out

        res = adaptive_integral(integrand, c_lo, c_hi,
                                points=ctx.outer_points(c_lo, c_hi), quad=quad)
        vals = np.maximum(np.asarray(res.value, dtype=float), 0.0)
        for idx, (i, delta) in enumerate(((1, 0), (2, 0), (1, 1), (2, 1))):
            rows.append(BlockCell(k, i, delta, float(vals[idx])))
        total_pow += float(vals.sum())
        total_err += res.est_error

    value = total_pow ** (1.0 / pc)
    comp = {}
    for i in (1, 2):
        for d in (0, 1):
            comp[f"i{i}_d{d}_pow"] = sum(r.contribution_pow for r in rows
                                         if r.i == i and r.delta == d)
    return BlockReport(value, _root_error(total_pow, total_err, pc),
                       grid.span, components=comp, warnings=tuple(warnings),
                       table=tuple(rows))


def sobolev_norm(f: HalfLineFunction, pair: WeightPair,
                 quad: QuadratureSpec = DEFAULT_QUAD,
                 allow_numeric_derivative: bool = True) -> NormReport:
    """Two-weight Sobolev norm ‖v0 f‖_p + ‖v1 f'‖_p over the support window."""
    p = pair.p
    lo, hi = _support_window(f, quad)
    lo = max(lo, _FLOOR)
    warnings = []
    if f.has_derivative:
        df = f.d
    elif allow_numeric_derivative:
        warnings.append("numeric-derivative")

        def df(x):
            x = np.asarray(x, dtype=float)
            h = 1e-6 * np.maximum(1.0, x)
            return (f.evaluate(x + h) - f.evaluate(x - h)) / (2.0 * h)
    else:
        raise DerivativeRequiredError(
            f"function {f.label!r} has no derivative and fallbacks are disabled")

    pts = [b for b in f.breakpoints if lo < b < hi]

    def integrand(x):
        x = np.asarray(x, dtype=float)
        return np.stack([
            np.abs(pair.v0.evaluate(x) * f.evaluate(x)) ** p,
            np.abs(pair.v1.evaluate(x) * df(x)) ** p,
        ], axis=-1)

    res = adaptive_integral(integrand, lo, hi, points=pts, quad=quad)
    part0_pow, part1_pow = (max(float(v), 0.0) for v in res.value)
    part0 = part0_pow ** (1.0 / p)
    part1 = part1_pow ** (1.0 / p)
    err = (_root_error(part0_pow, res.est_error, p) +
           _root_error(part1_pow, res.est_error, p))
    if not res.converged:
        warnings.append("quadrature-budget")
    return NormReport(part0 + part1, err, (lo, hi),
                      components={"v0_part": part0, "v1_part": part1},
                      warnings=tuple(warnings))


def weighted_lp_norm(g: HalfLineFunction, w: Weight, p_exp: float,
                     weight_power: float = 1.0,
                     quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """(∫ |g(x) w(x)^{weight_power}|^{p_exp} dx)^{1/p_exp} over the support."""
    lo, hi = _support_window(g, quad)
    lo = max(lo, _FLOOR)
    pts = sorted({*(b for b in g.breakpoints if lo < b < hi),
                  *(b for b in w.breakpoints if lo < b < hi)})

    def integrand(x):
        x = np.asarray(x, dtype=float)
        return np.abs(g.evaluate(x)) ** p_exp * w.pow(weight_power * p_exp, x)

    res = adaptive_integral(integrand, lo, hi, points=pts, quad=quad)
    return max(float(res.value), 0.0) ** (1.0 / p_exp)


def remark_unit_norm(v: HalfLineFunction, p: float,
                     quad: QuadratureSpec = DEFAULT_QUAD,
                     pair: WeightPair | None = None) -> NormReport:
    """Explicit unit-weight dual norm via half-unit moving windows.

    First term: L^{p'} size of t ↦ ∫_t^{t+1/2} v.  Second term: the boundary
    correction with kernel ∫ over y of ∫_t^{y+1/2} v, weighted t^{-p'} below
    1/2.  Only valid for v0 = v1 = 1, which is enforced when a pair is given.
    """
    if pair is not None:
        for w, name in ((pair.v0, "v0"), (pair.v1, "v1")):
            if w.family_tag != "unit":
                raise ValueError(f"unit-weight norm requires unit weights, {name} is {w.family_tag}")
    if not (1.0 < p < math.inf):
        raise ValueError("p must lie in (1, inf)")
    pc = p / (p - 1.0)
    lo, hi = _support_window(v, quad)
    bks = sorted({lo, hi, *(b for b in v.breakpoints if lo < b < hi)})
    pv = PrefixIntegrator(lambda x: v.evaluate(np.asarray(x, dtype=float)),
                          np.array(bks), quad)
    q_edges = np.unique(np.concatenate([[0.0, 0.5, hi + 1.0], np.array(bks)]))
    q2 = PrefixIntegrator(lambda x: pv.prefix(np.asarray(x, dtype=float)), q_edges, quad)
    q2_half = float(q2.prefix(np.array([0.5]))[0])

    def s_term(t):
        t = np.asarray(t, dtype=float)
        return np.abs(pv.prefix(t + 0.5) - pv.prefix(t)) ** pc

    t1_lo, t1_hi = max(_FLOOR, lo - 0.5), hi
    pts1 = sorted({b for b in [*bks, *(b - 0.5 for b in bks)] if t1_lo < b < t1_hi})
    res1 = adaptive_integral(s_term, t1_lo, t1_hi, points=pts1, quad=quad)
    term1_pow = max(float(res1.value), 0.0)
    term1 = term1_pow ** (1.0 / pc)

    def u_term(t):
        t = np.asarray(t, dtype=float)
        u = q2.prefix(t + 0.5) - q2_half - t * pv.prefix(t)
        return t ** (-pc) * np.abs(u) ** pc

    def w_term(t):
        t = np.asarray(t, dtype=float)
        w = q2.prefix(t + 0.5) - q2.prefix(t) - 0.5 * pv.prefix(t)
        return np.abs(w) ** pc

    pts2a = sorted({b for b in (b - 0.5 for b in bks) if _FLOOR < b < 0.5})
    res2a = adaptive_integral(u_term, _FLOOR, 0.5, points=pts2a, quad=quad)
    t2_hi = hi + 0.5
    pts2b = sorted({b for b in [*bks, *(b - 0.5 for b in bks)] if 0.5 < b < t2_hi})
    res2b = adaptive_integral(w_term, 0.5, t2_hi, points=pts2b, quad=quad)
    term2_pow = max(float(res2a.value) + float(res2b.value), 0.0)
    term2 = term2_pow ** (1.0 / pc)

    err = (_root_error(term1_pow, res1.est_error, pc) +
           _root_error(term2_pow, res2a.est_error + res2b.est_error, pc))
    return NormReport(term1 + term2, err, (t1_lo, t2_hi),
                      components={"first_term": term1, "second_term": term2})


def truncate(g: HalfLineFunction, grid: EtaGrid, N: int) -> HalfLineFunction:
    """g restricted to [eta_{-N}, eta_N], with adjusted support metadata."""
    if N < 0 or N > grid.kmax or -N < grid.kmin:
        raise ValueError(f"N={N} outside grid range [{grid.kmin}, {grid.kmax}]")
    lo = grid.value(-N)
    hi = grid.value(N)
    return restrict(g, lo, hi, label=f"{g.label}|eta[{-N},{N}]")
