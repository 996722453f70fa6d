import math

import numpy as np
import pytest

import effham

ETA = [25.5, 0.30, 0.02, 0.02, 0.003]


def test_mode_frequency_at_zero_flux():
    assert effham.mode_frequency(20.0, 0.25, 0.0) == pytest.approx(math.sqrt(40.0) - 0.25)
    with pytest.raises(effham.DomainError):
        effham.mode_frequency(20.0, 0.25, math.pi)


def test_hamiltonian_is_hermitian():
    h = effham.full_hamiltonian(ETA, [0.1, 0.2, 0.5])
    assert h.shape == (8, 8)
    assert np.allclose(h, h.conj().T, atol=1e-14)


def test_reduction_and_baseline_agree_when_dispersive():
    phi = [0.25, 0.25, 0.1]
    r = effham.reduce(ETA, phi)
    s = effham.swpt(ETA, phi)
    assert set(r["c_true"]) == set(effham.TERMS)
    assert r["fidelity_true"] >= r["fidelity_dress"] - 1e-12
    assert s["ZZ"] == 0.0
    for term in ("ZI", "IZ", "XX", "YY"):
        assert abs(r["c_true"][term] - s[term]) < 1.0
    assert max(effham.hybridization_ratios(ETA, phi)) < 0.12


def test_expectation_and_sampling():
    assert effham.expectation([0, 0, 0, 0, 0], "(Z+,Z-)|ZZ", 1.0) == pytest.approx(-1.0)
    a = effham.sample_ensemble(5, seed=3)
    assert a == effham.sample_ensemble(5, seed=3)
    assert len(a) == 5 and len(a[0]) == len(effham.ETA_NAMES)


def test_cli_usage_error():
    assert effham.run(["no-such-command"]) == 1
