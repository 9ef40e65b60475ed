"""Config parsing: pairs, matrices, presets, state round-trip."""

import numpy as np
import pytest

from oneparticle.config import (
    ConfigError,
    parse_complex,
    parse_initial_state,
    parse_matrix,
    parse_rate,
    parse_time_grid,
    state_to_mapping,
)
from oneparticle.sampling import random_one_particle_state, rng_for
from oneparticle.states import assemble


def test_parse_complex_pairs():
    assert parse_complex([1.0, -2.0], "x") == 1 - 2j
    assert parse_complex(3, "x") == 3 + 0j
    with pytest.raises(ConfigError):
        parse_complex([1.0], "x")
    with pytest.raises(ConfigError):
        parse_complex("nope", "x")


def test_parse_matrix_shape_check():
    M = parse_matrix([[[1, 0], [0, 1]], [[0, -1], [1, 0]]], "M")
    np.testing.assert_array_equal(M, [[1, 1j], [-1j, 1]])
    with pytest.raises(ConfigError):
        parse_matrix([[[1, 0]], [[1, 0], [0, 0]]], "M")


def test_time_grid_validation():
    grid = parse_time_grid({"start": 0.0, "stop": 2.0, "samples": 5})
    np.testing.assert_allclose(grid.points(), [0, 0.5, 1.0, 1.5, 2.0])
    with pytest.raises(ConfigError):
        parse_time_grid({"stop": 0.0, "samples": 5})
    with pytest.raises(ConfigError):
        parse_time_grid({"stop": 1.0, "samples": 1})


def test_rate_presets_and_tables():
    assert parse_rate(2.5, "g") == 2.5
    g = parse_rate({"preset": "one-plus-sin"}, "g")
    assert g(0.0) == pytest.approx(1.0)
    table = parse_rate({"table": {"times": [0.0, 1.0], "values": [0.5, 2.0]}}, "g")
    assert table(0.2) == 0.5 and table(1.7) == 2.0
    with pytest.raises(ConfigError):
        parse_rate({"preset": "sawtooth"}, "g")
    with pytest.raises(ConfigError):
        parse_rate({"table": {"times": [0.5], "values": [1.0]}}, "g")


def test_state_round_trip_through_mapping():
    rng = rng_for(110)
    s = random_one_particle_state(rng, 3)
    back = parse_initial_state(state_to_mapping(s), 3)
    assert np.max(np.abs(assemble(back) - assemble(s))) <= 1e-12


def test_state_presets():
    vac = parse_initial_state({"preset": "vacuum"}, 2)
    assert vac.rho00 == 1.0
    site = parse_initial_state({"preset": "site", "index": 2}, 2)
    assert site.R[1, 1] == 1.0
    with pytest.raises(ConfigError):
        parse_initial_state({"preset": "site", "index": 5}, 2)
    with pytest.raises(ConfigError):
        parse_initial_state({"preset": "w-state"}, 2)
