"""Matching-condition residuals and the score-moment Monte Carlo suite."""

import csv
import io
import math

import numpy as np
import pytest

from bvnprior.errors import DomainError
from bvnprior.matching import (
    CONDITION_IDS,
    CONDITIONS,
    FLAT_PRIOR,
    MATCHING_PRIOR,
    GridSpec,
    PriorSpec,
    moment_report_csv,
    moment_report_table,
    pde_residual,
    residual_report_csv,
    residual_report_table,
    verify_prior,
    verify_score_moments,
)
from bvnprior.model import OrthogonalParams

MATCHING_FD = PriorSpec("matching-fd", MATCHING_PRIOR.log_prior)

# conditions the flat prior happens to satisfy; the rest it must fail
FLAT_PASSES = {"dist_fn_A2_beta", "dist_fn_eta_main", "hpd_eta_pde"}


def test_condition_registry_shape():
    assert len(CONDITION_IDS) == 11
    assert set(CONDITION_IDS) == set(CONDITIONS)
    targets = {c.target for c in CONDITIONS.values()}
    regions = {c.region for c in CONDITIONS.values()}
    assert targets == {"beta", "theta", "eta"}
    assert regions == {"quantile", "hpd", "likelihood_ratio"}


@pytest.mark.parametrize("cid", CONDITION_IDS)
def test_matching_prior_analytic_residuals_vanish(cid):
    report = pde_residual(cid, MATCHING_PRIOR)
    assert report.used_analytic_partials
    assert report.max_abs_residual <= 1e-12
    assert report.passed
    assert report.n_points == 9 * 9 * 9


@pytest.mark.parametrize("cid", CONDITION_IDS)
def test_matching_prior_finite_difference_residuals_vanish(cid):
    report = pde_residual(cid, MATCHING_FD)
    assert not report.used_analytic_partials
    assert report.max_abs_residual <= 1e-6
    assert report.passed


def test_flat_prior_fails_exactly_the_expected_conditions():
    for report in verify_prior(FLAT_PRIOR):
        assert report.passed == (report.condition_id in FLAT_PASSES)


def test_flat_prior_constant_residuals_at_every_grid_point():
    # with a constant prior two of the failing identities reduce to exact
    # constants, everywhere on any grid
    for b in np.linspace(-2.0, 2.0, 5):
        for t in np.linspace(0.5, 3.0, 5):
            for e in np.linspace(0.5, 3.0, 5):
                partials = FLAT_PRIOR.analytic_partials(b, t, e)
                assert CONDITIONS["hpd_theta_pde"].residual(
                    partials, b, t, e
                ) == pytest.approx(-2.0, abs=1e-8)
                assert CONDITIONS["lr_theta_pde"].residual(
                    partials, b, t, e
                ) == pytest.approx(4.0, abs=1e-8)


def test_flat_prior_finite_difference_route_matches_analytic():
    flat_fd = PriorSpec("flat-fd", FLAT_PRIOR.log_prior)
    for cid in ("hpd_theta_pde", "lr_theta_pde", "dist_fn_A1_beta"):
        a = pde_residual(cid, FLAT_PRIOR)
        f = pde_residual(cid, flat_fd)
        assert f.max_abs_residual == pytest.approx(a.max_abs_residual, abs=1e-8)


def test_residuals_are_linear_in_the_prior():
    # scaling the prior by 7 scales every residual by 7
    scaled = PriorSpec("flat-x7", lambda b, t, e: math.log(7.0))
    r1 = pde_residual("hpd_theta_pde", PriorSpec("flat-fd", FLAT_PRIOR.log_prior))
    r7 = pde_residual("hpd_theta_pde", scaled)
    assert r7.max_abs_residual == pytest.approx(7.0 * r1.max_abs_residual, rel=1e-9)


def test_pde_residual_rejects_unknown_condition():
    with pytest.raises(DomainError):
        pde_residual("no_such_condition", MATCHING_PRIOR)


def test_grid_spec_validation_and_axes():
    with pytest.raises(DomainError):
        GridSpec(beta=(1.0, -1.0, 9))
    with pytest.raises(DomainError):
        GridSpec(theta=(0.0, 2.0, 9))
    with pytest.raises(DomainError):
        GridSpec(eta=(0.5, 2.0, 1))
    g = GridSpec(beta=(-1.0, 1.0, 3), theta=(1.0, 2.0, 2), eta=(1.0, 2.0, 2))
    bax, tax, eax = g.axes()
    assert list(bax) == [-1.0, 0.0, 1.0]
    assert list(tax) == [1.0, 2.0]
    report = pde_residual("lr_eta_pde", MATCHING_PRIOR, g)
    assert report.n_points == 12


def test_verify_prior_covers_all_conditions_in_order():
    reports = verify_prior(MATCHING_PRIOR)
    assert [r.condition_id for r in reports] == list(CONDITION_IDS)
    assert all(r.passed for r in reports)


POINT = OrthogonalParams(0.0, 0.0, 0.6, 1.7, 0.8)


def test_score_moments_all_pass_at_asymmetric_point():
    checks = verify_score_moments(POINT, n_samples=200_000, seed=14)
    assert len(checks) == 15
    assert all(c.passed for c in checks)
    # theta and eta differ here, so the nonzero claims are all distinct
    nonzero = {c.label: c.claimed for c in checks if c.claimed != 0.0}
    assert len(set(nonzero.values())) >= 4


def test_score_moment_claim_formulas():
    checks = {c.label: c for c in verify_score_moments(POINT, 100_000, seed=2)}
    t, e = POINT.theta, POINT.eta
    assert checks["E[(dl/dtheta)^3]"].claimed == pytest.approx(2.0 / t**3)
    assert checks["E[d3l/dtheta3]"].claimed == pytest.approx(4.0 / t**3)
    assert checks["E[d3l/deta3]"].claimed == pytest.approx(3.0 / e**3)
    assert checks["E[(dl/deta)(d2l/deta2)]"].claimed == pytest.approx(-1.0 / e**3)
    assert checks["E[d3l/dbeta2 dtheta]"].claimed == pytest.approx(1.0 / (t * e * e))
    assert checks["E[d3l/dbeta2 deta]"].claimed == pytest.approx(1.0 / e**3)


def test_score_moments_deterministic_in_seed():
    a = verify_score_moments(POINT, 100_000, seed=8)
    b = verify_score_moments(POINT, 100_000, seed=8)
    assert [c.estimate for c in a] == [c.estimate for c in b]


def test_score_moments_rejects_tiny_sample():
    with pytest.raises(DomainError):
        verify_score_moments(POINT, n_samples=1000, seed=0)


def test_report_serializations():
    reports = verify_prior(MATCHING_PRIOR)
    text = residual_report_csv(reports)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == [
        "condition_id", "prior", "max_abs_residual",
        "worst_beta", "worst_theta", "worst_eta", "pass",
    ]
    assert len(rows) == 1 + 11
    assert all(row[-1] == "true" for row in rows[1:])
    table = residual_report_table(reports)
    assert table.count("\n") == 12

    checks = verify_score_moments(POINT, 100_000, seed=4)
    mtext = moment_report_csv(checks)
    mrows = list(csv.reader(io.StringIO(mtext)))
    assert mrows[0] == ["moment", "claimed", "estimate", "stderr", "n_samples", "pass"]
    assert len(mrows) == 1 + 15
    mtable = moment_report_table(checks)
    assert mtable.count("\n") == 16
