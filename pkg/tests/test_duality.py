import math

import numpy as np
import pytest

from wsobolev import (HalfLineFunction, QuadratureSpec, bump, build_eta_grid,
                      estimate_J, hardy_constants, hat, hat_corpus, CorpusSpec,
                      holder_constant, indicator, oscillator, pairing,
                      reflexivity_family, verify_embedding, verify_reflexivity,
                      verify_strong_of_weak_zero, window_products,
                      zero_function)
from wsobolev.suites import (default_g_corpus, embedding_suite, hardy_suite,
                             identity_suite)


def test_pairing_zero(sol_x):
    v, err = pairing(zero_function(), indicator(1.0, 2.0))
    assert v == 0.0


def test_pairing_hat_indicator():
    f = hat(1.0, 1.5, 2.0)
    chi = indicator(1.0, 2.0)
    v, err = pairing(f, chi)
    assert v == pytest.approx(0.5, abs=1e-10)
    va, _ = pairing(f, chi, absolute=True)
    assert va >= abs(v)


def test_pairing_disjoint_supports():
    v, err = pairing(hat(1.0, 1.5, 2.0), indicator(3.0, 4.0))
    assert v == 0.0 and err == 0.0


def test_pairing_requires_window():
    f = HalfLineFunction(lambda x: np.ones_like(x))
    with pytest.raises(ValueError):
        pairing(f, f)
    v, _ = pairing(f, f, QuadratureSpec(truncation=(1.0, 2.0)))
    assert v == pytest.approx(1.0, abs=1e-10)


def test_pairing_oscillator_antisymmetry(sol_x):
    g, plan = oscillator(indicator(1.0, 2.0), 1.0, 2.0, 0.05, sol_x)
    inv_v1 = HalfLineFunction(lambda x: 1.0 / sol_x.V1(np.asarray(x, dtype=float)),
                              support=(1.0, 2.0), label="1/V1",
                              breakpoints=g.breakpoints)
    v, _ = pairing(inv_v1, g)
    assert abs(v) < 1e-9


def test_estimate_j_zero(sol_x):
    rep = estimate_J(zero_function(), [indicator(1.0, 2.0)], sol_x)
    assert rep.j_lower == 0.0


def test_estimate_j_monotone_in_family(sol_x):
    f = hat(1.0, 2.0, 3.0)
    fam1 = [indicator(1.0, 2.0)]
    fam2 = fam1 + [hat(1.2, 2.0, 2.8), bump(1.1, 2.9, 1.0)]
    j1 = estimate_J(f, fam1, sol_x).j_lower
    j2 = estimate_J(f, fam2, sol_x).j_lower
    assert j2 >= j1


def test_estimate_j_sandwich_consistency(sol_x, grid_x):
    f = hat(1.0, 2.0, 3.0)
    fam = reflexivity_family(f, grid_x)
    rep = estimate_J(f, fam, sol_x, holder_constant=1.0)
    assert 0.0 < rep.j_lower <= rep.holder_upper + 1e-12
    assert rep.family_size == len(fam)
    assert len(rep.ratios) == len(fam)


def test_verify_embedding_zero(pair_x, sol_x):
    assert verify_embedding(zero_function(), pair_x, sol_x) == 0.0


def test_verify_embedding_chi_stable(pair_x, sol_x):
    chi = indicator(1.0, 2.0)
    ratio = verify_embedding(chi, pair_x, sol_x)
    assert math.isfinite(ratio) and ratio > 0
    tight = QuadratureSpec(1e-12, 1e-10)
    ratio_t = verify_embedding(chi, pair_x, sol_x, tight)
    assert abs(ratio_t - ratio) / ratio < 0.01


def test_hardy_constants_bounds(sol_x, grid_x):
    p = sol_x.pair.p
    for k in range(-2, 3):
        hc = hardy_constants(grid_x, k)
        assert hc.a1 <= 1.0 + 1e-6
        assert hc.a2 <= 1.0 + 1e-6
        assert hc.a1_kernel_pow <= 1.0 / (p - 1.0) + 1e-6
        assert hc.a2_kernel_pow <= 1.0 / (p - 1.0) + 1e-6
        lo, hi = grid_x.cell(k)
        for key in ("a1", "a2"):
            assert lo <= hc.maximizers[key] <= hi


def test_window_products_bounded(sol_x, sol_recip):
    for sol in (sol_x, sol_recip):
        for t in np.geomspace(0.2, 20.0, 25):
            wa, wb = window_products(sol, float(t))
            assert wa <= 1.0 + 1e-6
            assert wb <= 1.0 + 1e-6


def test_divergence_no_witness(sol_x):
    with pytest.raises(ValueError, match="no-witness-segment"):
        verify_strong_of_weak_zero(zero_function(), [0.1], sol_x)


def test_divergence_growth_and_linearity(sol_x):
    f1 = indicator(1.0, 2.0, 1.0, label="f1")
    rows = verify_strong_of_weak_zero(f1, [1e-1, 1e-2], sol_x, segment=(1.0, 2.0))
    growth = rows[1].ratio / rows[0].ratio
    assert growth == pytest.approx(10.0, rel=0.2)
    # doubling f doubles the ratio at fixed eps (same oscillator)
    f2 = indicator(1.0, 2.0, 2.0, label="f2")
    rows2 = verify_strong_of_weak_zero(f2, [1e-1], sol_x, segment=(1.0, 2.0))
    assert rows2[0].ratio == pytest.approx(2.0 * rows[0].ratio, rel=1e-9)


def test_reflexivity_small_corpus(pair_x, sol_x):
    corpus = hat_corpus(CorpusSpec(seed=5, n_hats=2, n_bumps=1))
    reports = verify_reflexivity(corpus, pair_x, sol_x)
    for rep in reports:
        assert 0.0 < rep.j_lower <= rep.holder_upper * (1 + 1e-9)
        assert rep.sandwich_ratio <= 100.0


def test_component_lower_bounds(sol_x, grid_x, pair_x, corpus):
    """The family bounds both Sobolev-norm components from below.

    The plain L^p dual member controls ‖v0 f‖_p, the derivative-aligned bump
    controls ‖v1 f'‖_p; both with constants uniform over the corpus.
    """
    from wsobolev import sobolev_norm, weighted_lp_norm
    grid = build_eta_grid(sol_x, 8)
    for f in corpus[:4]:
        fam = reflexivity_family(f, grid)
        rep = estimate_J(f, fam, sol_x)
        v0_part = weighted_lp_norm(f, pair_x.v0, pair_x.p)
        v1_part = sobolev_norm(f, pair_x).components["v1_part"]
        lp_ratio = next(m.ratio for m in rep.ratios if m.g_label.startswith("lp-dual"))
        bump_ratio = next(m.ratio for m in rep.ratios if m.g_label.startswith("d/dx"))
        assert lp_ratio >= 0.5 * v0_part      # measured >= 1.8 * v0_part
        assert bump_ratio >= 0.1 * v1_part    # measured >= 0.34 * v1_part
        assert rep.j_lower >= 0.5 * v0_part


def test_window_masses_bundle(sol_x):
    m = sol_x.masses(1.7)
    assert m.v1 == pytest.approx(m.v1_minus + m.v1_plus, rel=1e-12)
    assert m.v0 == pytest.approx(m.v0_minus + m.v0_plus, rel=1e-12)
    assert m.v1 == pytest.approx(2.0 * m.v1_minus, rel=1e-8)
    pc, p = sol_x.pair.p_conj, sol_x.pair.p
    assert m.v1 ** (1.0 / pc) * m.v0 ** (1.0 / p) == pytest.approx(1.0, abs=1e-8)


def test_holder_constant_positive(sol_x):
    fs = hat_corpus(CorpusSpec(seed=9, n_hats=2, n_bumps=0))
    gs = default_g_corpus(10, hats=2, bumps=0)
    c, rows = holder_constant(fs, gs, sol_x)
    assert c > 0 and math.isfinite(c)
    assert len(rows) == len(fs) * len(gs)
    assert all(r["ratio"] <= c + 1e-15 for r in rows)


def test_identity_suite_passes(sol_x):
    res = identity_suite(sol_x, n_t=20)
    assert res.passed
    assert res.constants["max_residual"] < 1e-6


def test_hardy_suite_passes(sol_x):
    res = hardy_suite(sol_x, k_range=2, n_t=20)
    assert res.passed


def test_embedding_suite_passes(sol_x):
    res = embedding_suite(sol_x, QuadratureSpec(), seed=1234)
    assert res.passed
    assert res.constants["max_ratio"] <= 100.0
