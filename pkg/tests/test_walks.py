import dataclasses
import math

import numpy as np
import pytest

from rankone.bundled import schottky_spec
from rankone.kernels import free_return_logprobs, lattice_return_logprobs
from rankone.orbits import cyclic_spec, modular_spec
from rankone.walks import parse_abstract, walk_spectral_radius


@pytest.mark.parametrize("text,want", [("free:2", ("free", 2)), ("F3", ("free", 3)),
                                       ("Z", ("abelian", 1)), ("Z^2", ("abelian", 2)),
                                       ("abelian:3", ("abelian", 3))])
def test_parse_abstract(text, want):
    assert parse_abstract(text) == want


@pytest.mark.parametrize("text", ["free:0", "Z^4", "SL2", ""])
def test_parse_abstract_rejects(text):
    with pytest.raises(ValueError):
        parse_abstract(text)


def test_odd_steps_rejected():
    with pytest.raises(ValueError):
        walk_spectral_radius("Z", steps=11)


def _free_return_oracle(k, m_max):
    """p_{2m}(e) on F_k by the distance-from-identity Markov chain."""
    q = 2 * k
    dist = np.zeros(2 * m_max + 2)
    dist[0] = 1.0
    out = []
    for step in range(1, 2 * m_max + 1):
        new = np.zeros_like(dist)
        new[1] += dist[0]
        new[:-1] += dist[1:] / q
        new[2:] += dist[1:-1] * (q - 1) / q
        dist = new
        if step % 2 == 0:
            out.append(dist[0])
    return np.log(np.array(out))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_free_dp_matches_markov_chain(k):
    got = free_return_logprobs(k, 40)
    assert np.allclose(got, _free_return_oracle(k, 40), atol=1e-10)


def test_lattice_dp_small_values():
    # Z: p_2 = 1/2, p_4 = 6/16; Z^2: p_2 = 1/4, p_4 = 36/256
    z1 = np.exp(lattice_return_logprobs(1, 2))
    z2 = np.exp(lattice_return_logprobs(2, 2))
    assert np.allclose(z1, [0.5, 6 / 16])
    assert np.allclose(z2, [0.25, 36 / 256])


@pytest.mark.parametrize("k", [2, 3, 4])
def test_free_group_radius(k):
    est = walk_spectral_radius(f"free:{k}")
    assert abs(est.value - math.sqrt(2 * k - 1) / k) < 1e-2
    assert not est.low_confidence


def test_certified_free_spec_is_below_one():
    est = walk_spectral_radius(schottky_spec(1.5, 2))
    assert est.value < 1
    assert "certified free" in est.target


def test_infinite_cyclic_spec_is_one():
    est = walk_spectral_radius(cyclic_spec(1.0), steps=200)
    assert abs(est.value - 1.0) < 1e-2
    assert "infinite cyclic" in est.target


def test_modular_spec_element_dp():
    est = walk_spectral_radius(modular_spec(), steps=40)
    assert est.method == "element distribution DP"
    assert 0 < est.value < 1


def test_monte_carlo_is_seeded():
    a = walk_spectral_radius(modular_spec(), steps=20, trials=2000, seed=4)
    b = walk_spectral_radius(modular_spec(), steps=20, trials=2000, seed=4)
    assert a.value == b.value and a.method == "monte carlo"


def test_precision_limited_spec_is_flagged():
    spec = dataclasses.replace(schottky_spec(3.0, 2), certified_free=False, free_rank=None)
    est = walk_spectral_radius(spec, steps=40)
    assert est.low_confidence


def test_few_steps_flagged():
    assert walk_spectral_radius("free:2", steps=8).low_confidence
