import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from resonwave import oracle
from resonwave.expansion import (delta_projection_closed, expand,
                                 field_to_state, operator_state, poly_coeff,
                                 residue_term, scan_bounds,
                                 spectral_projection_apply, tail_integral,
                                 windowed_l2, zero_resonance_term)
from resonwave.model import (ContourSpec, PotentialSpec, UniformGrid, l2_norm,
                             cutoff_window, sample_state)
from resonwave.resonances import Resonance, find_resonances


def test_poly_coeff_simple_zero_closed_forms():
    mu = 0.7 - 0.3j
    # simple zero: cosine residue coefficient p = 1/2; sine p = 1/(2 mu)
    assert np.allclose(poly_coeff(1, mu, 1), [0.5])
    assert np.allclose(poly_coeff(0, mu, 1), [1.0 / (2.0 * mu)])


def test_poly_coeff_double_zero_closed_forms():
    mu = -1.0 + 0.0j
    assert np.allclose(poly_coeff(1, mu, 2), [0.0, 1.0 / (4.0 * mu)])
    assert np.allclose(poly_coeff(0, mu, 2),
                       [-1.0 / (4.0 * mu ** 3), 1.0 / (4.0 * mu ** 2)])


def test_delta_projection_closed_form(indicator, delta_m2, grid):
    # P of indicator[-1,1] for alpha = -2: 2(1 - 1/e) e^{-|x|}
    got = delta_projection_closed(indicator, delta_m2).values
    expect = 2.0 * (1.0 - np.exp(-1.0)) * np.exp(-np.abs(grid.nodes()))
    assert l2_norm(got - expect, grid.spacing) < 1e-10


def test_projection_contour_matches_closed():
    g = UniformGrid(-12.0, 12.0, 3073)
    V = PotentialSpec.delta(-2.0)
    f = sample_state("indicator", {"a": -1.0, "b": 1.0}, g)
    pc = spectral_projection_apply(1.0, f, V).values
    cl = delta_projection_closed(f, V).values
    assert l2_norm(pc - cl, g.spacing) < 1e-8


def test_projection_idempotent_contour():
    g = UniformGrid(-12.0, 12.0, 3073)
    V = PotentialSpec.delta(-2.0)
    f = sample_state("indicator", {"a": -1.0, "b": 1.0}, g)
    pf = spectral_projection_apply(1.0, f, V).values
    pf_state = field_to_state(pf, g, 12.0, kinks=(0.0,))
    ppf = spectral_projection_apply(1.0, pf_state, V).values
    assert l2_norm(ppf - pf, g.spacing) < 1e-8


def test_projection_commutes_with_operator():
    # A (P f) = lambda0^2 (P f) on the eigenspace: apply the delta stencil
    g = UniformGrid(-12.0, 12.0, 3073)
    V = PotentialSpec.delta(-2.0)
    f = sample_state("indicator", {"a": -1.0, "b": 1.0}, g)
    pf = spectral_projection_apply(1.0, f, V).values
    from resonwave.oracle import _discrete_apply
    apf = _discrete_apply(pf, g, V)
    # away from the grid boundary the discrete operator acts like A
    inner = slice(10, -10)
    gap = l2_norm((apf - 1.0 ** 2 * pf)[inner], g.spacing)
    # finite-difference truncation floor (second differences of e^{-|x|}
    # plus the one-node delta stencil); a wrong projection would be O(1)
    assert gap < 1e-3


def test_residue_term_delta_closed_vs_moments(grid, delta_m2, bump_off):
    r = Resonance(lambda0=1.0 + 0.0j, multiplicity=1)
    for kappa in (0, 1):
        tm = residue_term(r, kappa, bump_off, delta_m2, method="moments")
        tc = residue_term(r, kappa, bump_off, delta_m2, method="closed")
        assert l2_norm(tm.spatial - tc.spatial, grid.spacing) \
            < 1e-10 * max(1.0, l2_norm(tm.spatial, grid.spacing))


def test_residue_poly_degree_bound(grid, bump):
    from resonwave.jost import double_zero_coupling
    V = PotentialSpec.square_well(double_zero_coupling())
    r = Resonance(lambda0=-1.0 + 0.0j, multiplicity=2)
    tm = residue_term(r, 1, bump, V)
    assert tm.coeff_fields.shape[0] == 2  # degree <= mult - 1


def test_zero_term_free_model(grid):
    V = PotentialSpec.free()
    f = sample_state("indicator", {"a": -1.0, "b": 1.0}, grid)
    zt = zero_resonance_term(f, V)
    assert zt is not None and zt.order == 1
    # L1 = (1/2) int f = 1 for indicator[-1,1]; sine zero term is L1 * t^0
    vals = zt.evaluate(0, 2.0)
    assert abs(vals[grid.nearest_index(0.0)] - 1.0) < 1e-10
    # cosine zero term vanishes for a simple zero at 0
    assert np.max(np.abs(zt.evaluate(1, 2.0))) < 1e-10


def test_zero_term_absent_delta_and_well(bump, delta_m2, well5):
    assert zero_resonance_term(bump, delta_m2) is None
    assert zero_resonance_term(bump, well5) is None


def test_operator_state_exact_eval(grid, well5, bump):
    g1 = operator_state(bump, well5, 1)
    xs = np.linspace(-0.25, 0.85, 37)
    expect = bump.d2_eval(xs) + well5.value_at(xs) * bump.evaluate(xs)
    assert np.max(np.abs(g1.evaluate(xs) - expect)) < 1e-13


def test_free_decomposition_matches_dalembert(grid, window, contour):
    V = PotentialSpec.free()
    f = sample_state("bump", {"center": 0.0, "radius": 1.0}, grid)
    t = 2.0
    for kind, ref_fn in (("cosine", oracle.dalembert_cosine),
                         ("sine", oracle.dalembert_sine)):
        zt = zero_resonance_term(f, V, contour)
        kappa = 1 if kind == "cosine" else 0
        tail = tail_integral(t, f, 1, contour, kind, window, V).values
        recon = tail + zt.evaluate(kappa, t)
        ref = ref_fn(t, f).values
        assert windowed_l2(recon - ref, window, grid.spacing) < 1e-6


def test_tail_eps_independence(grid, window, delta_m2, bump_off):
    # moving the contour shift eps must not change the total (no resonance
    # sits between the two curves)
    t = 1.5
    c1 = ContourSpec(eps=0.05, g0_level=0.05, gstar_eta=1.0,
                     gstar_etatilde=0.05, im_truncation=40.0, quad_tol=1e-6)
    c2 = ContourSpec(eps=0.30, g0_level=0.35, gstar_eta=1.0,
                     gstar_etatilde=0.05, im_truncation=40.0, quad_tol=1e-6)
    t1 = tail_integral(t, bump_off, 1, c1, "cosine", window, delta_m2).values
    t2 = tail_integral(t, bump_off, 1, c2, "cosine", window, delta_m2).values
    assert windowed_l2(t1 - t2, window, grid.spacing) < 1e-5


def test_expand_report_delta(grid, window, contour, delta_m2, bump_off):
    rep = expand("cosine", [2.0], bump_off, delta_m2, contour, window=window)
    assert len(rep.terms) == 1
    assert abs(rep.terms[0].lambda0 - 1.0) < 1e-10
    assert rep.oracle_gap[0] < 5.0 * (contour.quad_tol + 1e-5)
    assert rep.zero_term is None


def test_expand_sine_cosine_derivative_consistency(grid, window, contour,
                                                   delta_m2, bump_off):
    # d/dt S(t) f = C(t) f: check on the reconstructions via finite diff
    dt = 1e-3
    reps = expand("sine", [2.0 - dt, 2.0 + dt], bump_off, delta_m2, contour,
                  window=window, with_oracle=False)
    repc = expand("cosine", [2.0], bump_off, delta_m2, contour,
                  window=window, with_oracle=False)
    ds = (reps.reconstruction(1) - reps.reconstruction(0)) / (2 * dt)
    gap = windowed_l2(ds - repc.reconstruction(0), window, grid.spacing)
    assert gap < 1e-4


def test_scan_bounds_shapes(contour, delta_m2, well5):
    r1 = scan_bounds(delta_m2, contour)
    assert r1.re_max >= 1.0
    r2 = scan_bounds(well5, contour)
    assert r2.re_max >= np.sqrt(5.0)
