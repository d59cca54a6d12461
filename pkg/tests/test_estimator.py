"""Shared estimator-contract checks for both reconstructors."""

import numpy as np
import pytest

from phaseframe import ExactReconstructor, NotFittedError, PartialReconstructor

CASES = [
    (ExactReconstructor, dict(N=8, p=5.0, M=5)),
    (PartialReconstructor, dict(N=5, p=7.0)),
]


def _samples(rng, N):
    return rng.standard_normal(N) + 1j * rng.standard_normal(N)


@pytest.mark.parametrize("cls,kwargs", CASES)
def test_get_params_round_trip(cls, kwargs):
    est = cls(**kwargs)
    params = est.get_params()
    for key, value in kwargs.items():
        assert params[key] == value
    clone = cls(**params)
    assert clone.get_params() == params


@pytest.mark.parametrize("cls,kwargs", CASES)
def test_set_params_returns_self_and_rejects_unknown(cls, kwargs):
    est = cls(**kwargs)
    assert est.set_params(p=kwargs["p"]) is est
    with pytest.raises(ValueError, match="invalid parameter"):
        est.set_params(bogus=3)


@pytest.mark.parametrize("cls,kwargs", CASES)
def test_set_params_invalidates_fit(cls, kwargs):
    rng = np.random.default_rng(5)
    est = cls(**kwargs).fit(_samples(rng, kwargs["N"]))
    est.state()
    est.set_params(p=kwargs["p"] + 1.0)
    with pytest.raises(NotFittedError):
        est.state()
    assert est.coef_ is None
    assert est.samples_ is None


@pytest.mark.parametrize("cls,kwargs", CASES)
def test_unfitted_access_raises(cls, kwargs):
    est = cls(**kwargs)
    with pytest.raises(NotFittedError):
        est.predict(0.3 + 0.1j)
    with pytest.raises(NotFittedError):
        est.state()


@pytest.mark.parametrize("cls,kwargs", CASES)
def test_fit_transform_matches_transform(cls, kwargs):
    rng = np.random.default_rng(11)
    x = _samples(rng, kwargs["N"])
    est = cls(**kwargs)
    out = est.fit_transform(x)
    assert out.ndim == 2
    assert out.shape[0] == 1
    row = cls(**kwargs).transform(x)
    assert np.allclose(out, row, rtol=1e-12, atol=0.0)
    assert np.array_equal(out[0], est.coef_)


@pytest.mark.parametrize("cls,kwargs", CASES)
def test_transform_stacks_rows_linearly(cls, kwargs):
    rng = np.random.default_rng(17)
    X = np.stack([_samples(rng, kwargs["N"]), _samples(rng, kwargs["N"])])
    est = cls(**kwargs)
    out = est.transform(X)
    assert out.shape[0] == 2
    # sample-to-coefficient map is linear, so rows must combine accordingly
    combo = est.transform(X[0] + 2.0 * X[1])
    assert np.allclose(combo[0], out[0] + 2.0 * out[1], rtol=1e-12, atol=1e-14)
    with pytest.raises(ValueError, match="2-d"):
        est.transform(X[None, :, :])


@pytest.mark.parametrize("cls", [ExactReconstructor, PartialReconstructor])
def test_missing_hyperparameters_fail_fast(cls):
    with pytest.raises(ValueError):
        cls().fit(np.zeros(4, dtype=complex))
