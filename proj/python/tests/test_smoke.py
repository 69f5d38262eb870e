import numpy as np
import pytest

import cliquemat as cm

TWO_TRIANGLES = np.array(
    [[1, 1, 1, 0], [1, 1, 1, 1], [1, 1, 1, 1], [0, 1, 1, 1]], dtype=np.int32
)
COVER = np.array([[1, 0], [1, 1], [1, 1], [0, 1]], dtype=np.int32)


def columns(z):
    return sorted(tuple(np.flatnonzero(z[:, c])) for c in range(z.shape[1]))


def test_incidence_reconstructs():
    z = cm.incidence_matrix(TWO_TRIANGLES)
    assert z.shape == (4, 5)
    assert cm.is_valid_clique_matrix(TWO_TRIANGLES, z)
    assert np.array_equal(cm.heaviside_reconstruct(z), TWO_TRIANGLES)


def test_log_likelihood_of_cover():
    assert cm.log_likelihood(TWO_TRIANGLES, COVER) == pytest.approx(-0.033577, abs=1e-5)


def test_fixed_c_recovers_two_triangles():
    r = cm.solve_fixed_c(TWO_TRIANGLES, 2, restarts=10, seed=3)
    assert columns(r["z"]) == columns(COVER)
    again = cm.solve_fixed_c(TWO_TRIANGLES, 2, restarts=10, seed=3)
    assert np.array_equal(r["theta"], again["theta"])


def test_auto_c_prunes_columns():
    r = cm.solve_auto_c(TWO_TRIANGLES, 8, restarts=10, seed=2)
    assert len(r["retained_columns"]) == 2
    assert len(r["alpha"]) == 8
    assert columns(r["z"]) == columns(COVER)


def test_prior_spot_value():
    assert np.exp(cm.beta_bernoulli_log_prior(0, 2, 1.0, 3.0)) == pytest.approx(0.6, rel=1e-14)


def test_expansion_of_cover():
    assert cm.expand_clique_matrix(COVER).shape == (4, 11)


def test_four_cycle_fit_keeps_zeros():
    g = cm.four_cycle()
    mask = cm.expand_clique_matrix(cm.incidence_matrix(g))
    s = np.array(
        [[2.0, 0.5, 0.3, 0.0], [0.5, 2.0, 0.0, 0.4], [0.3, 0.0, 2.0, 0.6], [0.0, 0.4, 0.6, 2.0]]
    )
    fit = cm.fit_covariance(s, g, mask)
    sigma = fit["sigma"]
    assert sigma[0, 3] == 0.0 and sigma[1, 2] == 0.0
    assert fit["kappa"] == pytest.approx(cm.kappa(sigma, s), rel=1e-12)
    assert fit["rms_error"] >= 0.0


def test_errors_map_to_python_exceptions():
    with pytest.raises(cm.ConfigError):
        cm.solve_fixed_c(TWO_TRIANGLES, 0)
    with pytest.raises(cm.NumericalError):
        cm.fit_covariance(-np.eye(4), cm.four_cycle(), cm.incidence_matrix(cm.four_cycle()))
    with pytest.raises(cm.Error):
        cm.is_valid_clique_matrix(TWO_TRIANGLES, np.ones((3, 1), dtype=np.int32))


def test_replication_is_deterministic():
    a, b = cm.run_replication(7, 3), cm.run_replication(7, 3)
    assert a == b
