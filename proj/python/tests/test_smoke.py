import cmath
import math

import numpy as np
import pytest
from scipy.linalg import expm

import dilateron as dl


def random_generator(rng, n):
    """Symmetric killed graph Laplacian (mu = 1)."""
    w = rng.uniform(0.0, 1.0, (n, n))
    w = np.triu(w, 1)
    w = w + w.T
    a = w - np.diag(w.sum(axis=1) + rng.uniform(0.05, 0.5, n))
    return a


def test_suite_names():
    names = dl.suite_names()
    assert len(names) == 12
    assert {"dilation-verify", "powers", "transfer", "khinchin", "vn"} <= set(names)


def test_run_suite_is_deterministic():
    a = dl.run_suite("vn", {"trials": 20}, seed=5)
    b = dl.run_suite("vn", {"trials": 20}, seed=5)
    assert a["passed"] and a["failures"] == 0
    assert len(a["records"]) == 20
    a.pop("timing")
    b.pop("timing")
    assert a == b


def test_run_suite_errors():
    with pytest.raises(dl.InputError):
        dl.run_suite("vn")
    with pytest.raises(dl.InputError):
        dl.run_suite("no-such-suite", seed=1)


def test_gamma_against_math():
    for x in (0.5, 1.0, 2.5, 7.0):
        assert dl.complex_gamma(x) == pytest.approx(math.gamma(x), rel=1e-13)
    assert abs(dl.complex_gamma(1j)) == pytest.approx(math.sqrt(math.pi / math.sinh(math.pi)), rel=1e-12)
    z = 0.3 + 2.0j
    assert dl.complex_gamma(z + 1) == pytest.approx(z * dl.complex_gamma(z), rel=1e-12)
    assert dl.complex_gamma(z) * dl.complex_gamma(1 - z) == pytest.approx(cmath.pi / cmath.sin(cmath.pi * z), rel=1e-12)


def test_positive_norm_matches_svd():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.uniform(0.0, 2.0, (rng.integers(1, 7), rng.integers(1, 7)))
        value, witness = dl.positive_norm(a, 2.0)
        assert value == pytest.approx(np.linalg.norm(a, 2), rel=1e-10)
        assert np.all(witness >= 0.0)
        assert dl.positive_norm(a, 1.0)[0] == pytest.approx(a.sum(axis=0).max(), rel=1e-14)


def test_extremal_vector_and_contraction_error():
    t = np.full((3, 3), 1.0 / 3.0)
    u, defect = dl.extremal_vector(t, 1.5)
    assert np.all(u > 0.0) and defect <= 1e-8
    with pytest.raises(dl.ContractionError):
        dl.extremal_vector(1.2 * np.eye(2), 2.0)
    assert issubclass(dl.ContractionError, dl.Error)


def test_dilation_identity():
    rng = np.random.default_rng(11)
    t = rng.uniform(0.0, 1.0, (4, 4))
    t /= max(t.sum(axis=0).max(), t.sum(axis=1).max())
    for p in (1.0, 1.5, 3.0):
        err, per_k = dl.verify_dilation(t, p, depth=6, seed=2)
        assert err < 1e-10 and len(per_k) == 7
    signed = t * np.exp(1j * rng.uniform(0.0, 2 * np.pi, t.shape))
    err, _ = dl.verify_dilation(signed, 2.0, depth=6, seed=2)
    assert err < 1e-10


def test_spectral_calculus():
    rng = np.random.default_rng(7)
    a = random_generator(rng, 5)
    mu = np.ones(5)
    for gamma in (-3.0, 0.0, 2.0):
        assert dl.norm2_mu(dl.imaginary_power(a, gamma), mu) == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(dl.semigroup(a, 0.7), expm(0.7 * a), atol=1e-12)


def test_transfer_of_a_point_mass_is_the_semigroup():
    rng = np.random.default_rng(9)
    a = random_generator(rng, 4)
    h = 0.1
    op = dl.transfer_operator(np.array([1.0 / h]), h, a, t0=0.45)
    np.testing.assert_allclose(op, expm(0.45 * a), atol=1e-12)
    samples = np.exp(-np.arange(200) * h)
    assert dl.convolver_upper(samples, h, 1.5) <= h * samples.sum() + 1e-12


def test_khinchin_and_mellin():
    assert dl.khinchin_constants(2.0) == (1.0, 1.0)
    c, big_c = dl.khinchin_constants(3.0)
    assert c <= 1.0 <= big_c
    assert dl.mellin_residual(1.0, math.pi / 4, -1.0) < 1e-6
    assert dl.mellin_residual(2.0, math.pi / 3, -0.5, average=True) < 1e-6
    with pytest.raises(dl.DomainError):
        dl.mellin_residual(1.0, math.pi / 3, 1.0)
