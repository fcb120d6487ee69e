import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsobolev import (DerivativeRequiredError, QuadratureSpec, bump, build_eta_grid,
                      block_norm, from_callable, hat, indicator, lincomb, oscillator,
                      remark_unit_norm, sobolev_norm, strong_norm, truncate, weak_norm,
                      weighted_lp_norm, zero_function)
from wsobolev.functionals import KernelContext
from wsobolev.quad import adaptive_integral

from oracles import (SOBOLEV_HAT_UNIT, SOBOLEV_HAT_X, UNIT_STRONG_CHI,
                     brute_strong_chi_x, brute_weak_chi_x)


@pytest.fixture(scope="module")
def chi():
    return indicator(1.0, 2.0)


# -- function constructors -----------------------------------------------------

@given(left=st.floats(0.2, 2.0), w1=st.floats(0.1, 2.0), w2=st.floats(0.1, 2.0),
       height=st.floats(0.1, 4.0))
@settings(max_examples=50, deadline=None)
def test_hat_shape(left, w1, w2, height):
    f = hat(left, left + w1, left + w1 + w2, height)
    assert float(f(np.array([left + w1]))[0]) == pytest.approx(height, rel=1e-12)
    assert float(f(np.array([left / 2]))[0]) == 0.0
    assert float(f(np.array([left + w1 + w2 + 1.0]))[0]) == 0.0
    # derivative is consistent with a finite difference away from kinks
    x = left + 0.5 * w1
    fd = (float(f(np.array([x + 1e-7]))[0]) - float(f(np.array([x - 1e-7]))[0])) / 2e-7
    assert float(f.d(np.array([x]))[0]) == pytest.approx(fd, rel=1e-5)


def test_bump_is_c1():
    f = bump(1.0, 3.0, 2.0)
    eps = 1e-7
    for edge in (1.0, 3.0):
        assert abs(float(f(np.array([edge + eps]))[0])) < 1e-12
        assert abs(float(f.d(np.array([edge + eps]))[0])) < 1e-5


# -- Sobolev norm ----------------------------------------------------------------

def test_sobolev_hat_examples(pair_unit, pair_x):
    f = hat(0.0, 1.0, 2.0)
    assert sobolev_norm(f, pair_unit).value == pytest.approx(SOBOLEV_HAT_UNIT, abs=1e-9)
    assert sobolev_norm(f, pair_x).value == pytest.approx(SOBOLEV_HAT_X, abs=1e-9)


def test_sobolev_zero(pair_unit):
    assert sobolev_norm(zero_function(), pair_unit).value == 0.0


def test_sobolev_numeric_fallback_flags_warning(pair_unit, chi):
    smooth = from_callable(lambda x: np.sin(x), support=(1.0, 2.0), label="sin")
    rep = sobolev_norm(smooth, pair_unit)
    assert "numeric-derivative" in rep.warnings
    with pytest.raises(DerivativeRequiredError):
        sobolev_norm(smooth, pair_unit, allow_numeric_derivative=False)


# -- strong norm ------------------------------------------------------------------

def test_strong_unit_oracle(sol_unit, chi):
    rep = strong_norm(chi, sol_unit)
    assert rep.value == pytest.approx(UNIT_STRONG_CHI, abs=1e-8)


def test_strong_power_matches_brute(sol_x, chi):
    rep = strong_norm(chi, sol_x)
    assert rep.value == pytest.approx(brute_strong_chi_x(), abs=1e-8)


def test_strong_zero(sol_x):
    assert strong_norm(zero_function(), sol_x).value == 0.0


def test_strong_refinement_self_consistency(sol_x, chi):
    base = strong_norm(chi, sol_x).value
    tight = strong_norm(chi, sol_x, QuadratureSpec(1e-12, 1e-10)).value
    assert abs(base - tight) < 1e-6


# -- weak norm ---------------------------------------------------------------------

def test_weak_power_matches_brute(sol_x, chi):
    rep = weak_norm(chi, sol_x)
    gfrak, gcal = brute_weak_chi_x()
    assert rep.components["G_frak"] == pytest.approx(gfrak, abs=1e-8)
    assert rep.components["G_cal"] == pytest.approx(gcal, abs=1e-8)
    assert rep.value == pytest.approx(gfrak + gcal, abs=2e-8)


def test_weak_components_recombine(sol_x, chi):
    rep = weak_norm(chi, sol_x)
    assert rep.value == pytest.approx(rep.components["G_frak"] + rep.components["G_cal"],
                                      rel=1e-12)


def test_weak_zero(sol_x):
    assert weak_norm(zero_function(), sol_x).value == 0.0


def test_weak_bounded_by_strong(sol_x, chi):
    """The window mass bounds force weak <= 2.5 strong."""
    w = weak_norm(chi, sol_x).value
    s = strong_norm(chi, sol_x).value
    assert w <= 2.5 * s + 1e-9


def test_weak_refinement_self_consistency(sol_x, chi):
    base = weak_norm(chi, sol_x).value
    tight = weak_norm(chi, sol_x, QuadratureSpec(1e-12, 1e-10)).value
    assert abs(base - tight) < 1e-6


@pytest.mark.parametrize("lam", [-2.0, 0.5, 3.0])
def test_weak_homogeneity(sol_x, lam):
    g = hat(1.0, 1.6, 2.3, 0.8)
    base = weak_norm(g, sol_x).value
    scaled = weak_norm(g.scaled(lam), sol_x).value
    assert scaled == pytest.approx(abs(lam) * base, rel=1e-8)


@pytest.mark.parametrize("lam", [-2.0, 0.5, 3.0])
def test_strong_homogeneity(sol_x, lam):
    g = hat(1.0, 1.6, 2.3, 0.8)
    base = strong_norm(g, sol_x).value
    scaled = strong_norm(g.scaled(lam), sol_x).value
    assert scaled == pytest.approx(abs(lam) * base, rel=1e-8)


def test_weak_triangle_inequality(sol_x):
    rng = np.random.default_rng(5)
    for _ in range(3):
        l1, l2 = rng.uniform(0.8, 1.6, size=2)
        g1 = hat(l1, l1 + 0.5, l1 + 1.1, rng.uniform(0.3, 2.0))
        g2 = bump(l2, l2 + rng.uniform(0.6, 1.4), rng.uniform(0.3, 2.0))
        w12 = weak_norm(lincomb([(1.0, g1), (1.0, g2)]), sol_x).value
        assert w12 <= weak_norm(g1, sol_x).value + weak_norm(g2, sol_x).value + 2e-8


def test_weak_definiteness_on_corpus(sol_x, corpus):
    for g in corpus[:4]:
        assert weak_norm(g, sol_x).value > 0.0


def test_oscillator_small_weak_norm(sol_x):
    g, plan = oscillator(indicator(1.0, 2.0), 1.0, 2.0, 0.1, sol_x)
    assert weak_norm(g, sol_x).value <= 2.0 * 0.1


def test_kernel_bound_cococo(sol_x):
    """∫_{a(t)}^t v1^{-p'} [V1^+]^alpha <= V1(t)^{alpha+1}."""
    pc = sol_x.pair.p_conj
    for t in (0.5, 1.0, 4.0):
        at = sol_x.a(t)
        for alpha in (1.0, pc - 1.0):
            res = adaptive_integral(
                lambda x, alpha=alpha: sol_x.w1_density(x) *
                sol_x.V1_plus(np.asarray(x, dtype=float)) ** alpha,
                at, t)
            assert float(res.value) <= sol_x.V1(t) ** (alpha + 1.0) + 1e-8


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_norms_at_other_exponents(p):
    from wsobolev import EquilibriumSolution, make_pair, power_weight, unit_weight
    pair = make_pair(unit_weight(), power_weight(1.0), p)
    sol = EquilibriumSolution(pair)
    g = hat(1.0, 1.5, 2.0)
    w = weak_norm(g, sol)
    s = strong_norm(g, sol)
    assert 0 < w.value <= 2.5 * s.value + 1e-9
    grid = build_eta_grid(sol, 5)
    ratio = block_norm(g, grid).value / w.value
    assert 0.01 <= ratio <= 100.0
    assert weak_norm(g.scaled(3.0), sol).value == pytest.approx(3.0 * w.value, rel=1e-7)


# -- block decomposition -------------------------------------------------------------

def test_block_zero(sol_x, grid_x):
    rep = block_norm(zero_function(), grid_x)
    assert rep.value == 0.0
    assert all(c.contribution_pow == 0.0 for c in rep.table)


def test_block_support_propagation(sol_x, grid_x):
    """Support inside one cell activates that cell's i=1 and the previous i=2."""
    lo, hi = grid_x.cell(1)  # [1, eta_1]
    g = hat(lo + 0.05 * (hi - lo), lo + 0.5 * (hi - lo), lo + 0.9 * (hi - lo))
    rep = block_norm(g, grid_x)
    total = rep.value ** sol_x.pair.p_conj
    live = {(c.k, c.i) for c in rep.table if c.contribution_pow > 1e-12 * total}
    assert live == {(1, 1), (0, 2)}


def test_block_vs_weak_ratio_stable(sol_x, grid_x, chi):
    quad = QuadratureSpec()
    ratio = block_norm(chi, grid_x, quad).value / weak_norm(chi, sol_x, quad).value
    assert 0.01 <= ratio <= 100.0
    tight = quad.tightened(10.0)
    ratio_t = block_norm(chi, grid_x, tight).value / weak_norm(chi, sol_x, tight).value
    assert abs(ratio_t - ratio) / ratio < 0.01


def test_block_under_coverage_warning(sol_x):
    small = build_eta_grid(sol_x, 1)
    g = hat(0.3, 1.0, 6.0)
    rep = block_norm(g, small)
    assert "grid-under-coverage" in rep.warnings


# -- unit-weight dual norm ------------------------------------------------------------

def test_remark_unit_zero():
    assert remark_unit_norm(zero_function(), 2.0).value == 0.0


def test_remark_unit_first_term(chi):
    rep = remark_unit_norm(chi, 2.0)
    assert rep.components["first_term"] ** 2 == pytest.approx(5.0 / 24.0, abs=1e-9)


def test_remark_unit_refinement(chi):
    base = remark_unit_norm(chi, 2.0).value
    tight = remark_unit_norm(chi, 2.0, QuadratureSpec(1e-12, 1e-10)).value
    assert abs(base - tight) < 1e-6


def test_remark_unit_rejects_non_unit(pair_x, chi):
    with pytest.raises(ValueError):
        remark_unit_norm(chi, 2.0, pair=pair_x)


# -- truncation -------------------------------------------------------------------------

def test_truncate_identity_inside(grid_x, chi):
    gN = truncate(chi, grid_x, 2)
    xs = np.linspace(0.5, 3.0, 301)
    assert np.allclose(gN.evaluate(xs), chi.evaluate(xs))
    lo, hi = gN.support
    assert lo >= grid_x.value(-2) and hi <= grid_x.value(2)


def test_truncate_out_of_range(grid_x, chi):
    with pytest.raises(ValueError):
        truncate(chi, grid_x, 99)


def test_truncate_difference_shrinks(sol_x, grid_x):
    g = from_callable(lambda x: x * np.exp(-x), support=grid_x.span, label="tail")
    previous = math.inf
    for n in (2, 4, 6):
        diff = lincomb([(1.0, g), (-1.0, truncate(g, grid_x, n))])
        wn = weak_norm(diff, sol_x).value
        assert wn <= previous * (1.0 + 1e-9)
        previous = wn


# -- shared kernel context ----------------------------------------------------------------

def test_kernel_context_prefix_consistency(sol_x, chi):
    ctx = KernelContext(chi, sol_x)
    xs = np.array([1.2, 1.7])
    direct = adaptive_integral(
        lambda x: chi.evaluate(x) / sol_x.V1(np.asarray(x, dtype=float)),
        float(xs[0]), float(xs[1]))
    assert float(ctx.between("phi", xs[:1], xs[1:])[0]) == \
        pytest.approx(float(direct.value), abs=1e-11)
