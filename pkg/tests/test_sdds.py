import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canalnet.derrida import NetworkSpec, derrida_exhaustive, derrida_value
from canalnet.sdds import (
    SDDSSpec,
    as_probability,
    gammas,
    sdds_derrida,
    sdds_derrida_exact,
    sdds_derrida_exhaustive,
    sdds_derrida_monte_carlo,
    sdds_from_dict,
    sdds_step,
)
from canalnet.truthtable import BooleanFunction, parse_table

P = [Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(1)]
NOT = parse_table("10")


def random_network(rng, N, self_inputs=True, balanced=False):
    functions, inputs = [], []
    for i in range(N):
        pool = np.arange(N) if self_inputs else np.delete(np.arange(N), i)
        n = int(rng.integers(1, min(3, len(pool)) + 1))
        if balanced:
            table = rng.permutation(np.repeat(np.array([0, 1], dtype=np.uint8), 1 << (n - 1)))
        else:
            table = rng.integers(0, 2, 1 << n, dtype=np.uint8)
        functions.append(BooleanFunction.from_table(table))
        inputs.append(rng.choice(pool, n, replace=False).tolist())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return NetworkSpec.build(functions, inputs)


def has_self_input(net):
    return any(i in node.inputs for i, node in enumerate(net.nodes))


def test_gamma_examples():
    assert gammas(1, 1) == gammas(Fraction(1), Fraction(1))
    g = gammas(1, 1)
    assert (g.g1, g.g2, g.g3, g.g4) == (1, 0, 1, 0)
    g = gammas(0, 0)
    assert (g.g1, g.g2, g.g3, g.g4) == (1, 1, 0, 0)
    g = gammas(Fraction(1, 2), Fraction(1, 2))
    assert (g.g1, g.g2, g.g3, g.g4) == (Fraction(3, 4), Fraction(1, 2), Fraction(1, 2), Fraction(1, 4))
    with pytest.raises(ValueError):
        gammas(Fraction(3, 2), 0)


@given(st.sampled_from(P), st.sampled_from(P))
def test_gamma_invariants(up, down):
    g = gammas(up, down)
    assert g.g1 - g.g2 == up * down
    assert g.g3 >= g.g4
    assert all(0 <= x <= 1 for x in (g.g1, g.g2, g.g3, g.g4))


def test_decimal_probabilities_are_exact():
    assert as_probability(0.5) == Fraction(1, 2)
    assert as_probability("1/3") == Fraction(1, 3)
    assert as_probability(0.1) == Fraction(1, 10)


@pytest.mark.parametrize("self_inputs", [False, True])
@pytest.mark.parametrize("seed", range(6))
def test_deterministic_reduction(seed, self_inputs):
    rng = np.random.default_rng(seed)
    net = random_network(rng, int(rng.integers(2, 8)), self_inputs)
    spec = SDDSSpec.uniform(net, 1)
    for m in range(net.N + 1):
        assert sdds_derrida(spec, m) == derrida_value(net, m)


@pytest.mark.parametrize("self_inputs", [False, True])
@pytest.mark.parametrize("seed", range(6))
def test_frozen_reduction(seed, self_inputs):
    rng = np.random.default_rng(seed)
    net = random_network(rng, int(rng.integers(2, 8)), self_inputs)
    spec = SDDSSpec.uniform(net, 0)
    for m in range(net.N + 1):
        assert sdds_derrida(spec, m) == m
        assert sdds_derrida_exact(spec, m) == m
    est = sdds_derrida_monte_carlo(spec, 1, 2000, seed=seed)
    assert est.mean == 1 and est.stderr == 0


def test_step_examples():
    rng = np.random.default_rng(0)
    net = NetworkSpec.build([NOT, NOT, parse_table("0001")], [[1], [0], [0, 1]])
    x = np.array([1, 0, 1], dtype=bool)
    assert np.array_equal(sdds_step(SDDSSpec.uniform(net, 1), x, rng), net.step(x[None])[0])
    assert np.array_equal(sdds_step(SDDSSpec.uniform(net, 0), x, rng), x)
    single = NetworkSpec.build([NOT], [[0]])
    spec = SDDSSpec(single, (0,), (1,))
    for _ in range(20):
        assert sdds_step(spec, np.array([True]), rng).tolist() == [False]
    with pytest.raises(ValueError):
        sdds_step(spec, np.array([True, False]), rng)


def test_deterministic_limit_monte_carlo():
    net = random_network(np.random.default_rng(3), 6)
    est = sdds_derrida_monte_carlo(SDDSSpec.uniform(net, 1), 2, 100_000, seed=1)
    assert abs(est.mean - float(derrida_exhaustive(net, 2))) < 4 * est.stderr


def test_independent_coins():
    # x and its complement both want to flip; independent coins leave them
    # different only when both or neither move
    single = NetworkSpec.build([NOT], [[0]])
    spec = SDDSSpec.uniform(single, Fraction(1, 2))
    assert sdds_derrida_exhaustive(spec, 1) == Fraction(1, 2)
    assert sdds_derrida_exact(spec, 1) == Fraction(1, 2)
    est = sdds_derrida_monte_carlo(spec, 1, 100_000, seed=2)
    assert abs(est.mean - 0.5) < 4 * est.stderr


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(P))
def test_theorem_exact_without_self_inputs_symmetric_p(seed, p):
    rng = np.random.default_rng(seed)
    net = random_network(rng, int(rng.integers(2, 7)), self_inputs=False)
    spec = SDDSSpec.uniform(net, p)
    for m in range(net.N + 1):
        assert sdds_derrida(spec, m) == sdds_derrida_exhaustive(spec, m)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_theorem_exact_for_balanced_nodes(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(2, 7))
    net = random_network(rng, N, self_inputs=False, balanced=True)
    spec = SDDSSpec(net, tuple(P[i] for i in rng.integers(0, 7, N)), tuple(P[i] for i in rng.integers(0, 7, N)))
    for m in range(N + 1):
        assert sdds_derrida(spec, m) == sdds_derrida_exhaustive(spec, m)


def test_theorem_not_exact_with_asymmetric_rates():
    net = NetworkSpec.build([parse_table("0001"), NOT, NOT], [[1, 2], [0], [1]])
    spec = SDDSSpec.uniform(net, 1, 0)
    assert sdds_derrida(spec, 1) != sdds_derrida_exhaustive(spec, 1)
    assert sdds_derrida_exact(spec, 1) == sdds_derrida_exhaustive(spec, 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_exact_generalization(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(1, 7))
    net = random_network(rng, N)
    spec = SDDSSpec(net, tuple(P[i] for i in rng.integers(0, 7, N)), tuple(P[i] for i in rng.integers(0, 7, N)))
    for m in range(N + 1):
        assert sdds_derrida_exact(spec, m) == sdds_derrida_exhaustive(spec, m)


def test_symmetric_example_monte_carlo():
    rng = np.random.default_rng(6)
    net = random_network(rng, 6, self_inputs=False)
    spec = SDDSSpec.uniform(net, Fraction(1, 2))
    est = sdds_derrida_monte_carlo(spec, 2, 10**6, seed=6)
    assert abs(est.mean - float(sdds_derrida(spec, 2))) < 4 * est.stderr


def test_grid_is_bounded():
    net = random_network(np.random.default_rng(9), 5)
    grid = [Fraction(i, 4) for i in range(5)]
    for up in grid:
        for down in grid:
            spec = SDDSSpec.uniform(net, up, down)
            for m in range(6):
                for fn in (sdds_derrida, sdds_derrida_exact):
                    assert 0 <= fn(spec, m) <= 5


def test_spec_json_round_trip():
    data = {"N": 2, "nodes": [
        {"inputs": [2], "function": "10", "p_up": "1/3", "p_down": 0.5},
        {"inputs": [1], "function": "01"},
    ]}
    spec = sdds_from_dict(data)
    assert spec.p_up == (Fraction(1, 3), 1) and spec.p_down == (Fraction(1, 2), 1)
    assert sdds_from_dict(spec.to_dict()) == spec
    with pytest.raises(ValueError):
        sdds_from_dict({"nodes": [{"inputs": [1], "function": "10", "p_up": 2}]})
    with pytest.raises(ValueError):
        sdds_derrida(spec, 3)
