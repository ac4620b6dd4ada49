import json
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canalnet.derrida import (
    NetworkSpec,
    derrida_curve,
    derrida_exhaustive,
    derrida_homogeneous,
    derrida_monte_carlo,
    derrida_value,
    hypergeometric_pmf,
    hypergeometric_pmf_dual,
    load_network,
    network_from_dict,
    normalized_sensitivities,
)
from canalnet.ensemble import LayerSpec, build_layered
from canalnet.sensitivity import layered_sensitivity_profile
from canalnet.truthtable import BooleanFunction, parse_table

AND3 = parse_table("00000001")


def random_network(rng, N, max_inputs=4):
    functions, inputs = [], []
    for _ in range(N):
        n = int(rng.integers(1, min(max_inputs, N) + 1))
        functions.append(BooleanFunction.from_table(rng.integers(0, 2, 1 << n, dtype=np.uint8)))
        inputs.append(rng.choice(N, n, replace=False).tolist())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return NetworkSpec.build(functions, inputs)


def homogeneous(f, N, seed=0):
    rng = np.random.default_rng(seed)
    return NetworkSpec.build([f] * N, [rng.choice(N, f.n, replace=False).tolist() for _ in range(N)])


def test_hypergeometric_examples():
    assert hypergeometric_pmf(10, 1, 3, 1) == Fraction(3, 10)
    assert hypergeometric_pmf(5, 5, 3, 3) == 1
    assert hypergeometric_pmf(5, 5, 3, 2) == 0
    with pytest.raises(ValueError):
        hypergeometric_pmf(5, -1, 3, 0)


def test_hypergeometric_mixture_identity():
    for N in range(2, 10):
        for m in range(N + 1):
            for n in range(N):
                for c in range(n + 1):
                    lhs = hypergeometric_pmf(N, m, n, c)
                    rhs = Fraction(0)
                    if m:
                        rhs += Fraction(m, N) * hypergeometric_pmf(N - 1, m - 1, n, c)
                    if m < N:
                        rhs += Fraction(N - m, N) * hypergeometric_pmf(N - 1, m, n, c)
                    assert lhs == rhs


@given(st.integers(1, 12).flatmap(lambda N: st.tuples(st.just(N), st.integers(0, N), st.integers(0, N))))
def test_hypergeometric_forms_agree(case):
    N, m, n = case
    total = Fraction(0)
    for c in range(-1, N + 2):
        p = hypergeometric_pmf(N, m, n, c)
        assert p == hypergeometric_pmf_dual(N, m, n, c)
        total += p
    assert total == 1


def test_identity_network():
    net = NetworkSpec.identity(6)
    assert derrida_curve(net, range(7)) == {m: m for m in range(7)}
    assert all(derrida_exhaustive(net, m) == m for m in range(7))
    est = derrida_monte_carlo(net, 3, 5000, seed=1)
    assert est.mean == 3 and est.stderr == 0


def test_constant_network():
    net = NetworkSpec.build([BooleanFunction.constant(0, 1)] * 5, [[]] * 5)
    assert all(derrida_value(net, m) == 0 == derrida_exhaustive(net, m) for m in range(6))


def test_and3_network():
    assert derrida_value(homogeneous(AND3, 100), 1) == Fraction(3, 4)
    net8 = homogeneous(AND3, 8, seed=4)
    assert derrida_value(net8, 1) == Fraction(3, 4) == derrida_exhaustive(net8, 1)


def test_and3_monte_carlo():
    est = derrida_monte_carlo(homogeneous(AND3, 100), 1, 10**6, seed=11)
    assert abs(est.mean - 0.75) < 3 * est.stderr
    assert est.samples == 10**6


def test_monte_carlo_reproducible():
    net = random_network(np.random.default_rng(0), 7)
    a = derrida_monte_carlo(net, 2, 70_000, seed=5)
    b = derrida_monte_carlo(net, 2, 70_000, seed=5)
    assert a == b


def test_ncf_weight_one():
    profile = layered_sensitivity_profile(5, (5,))
    assert derrida_homogeneous(100, profile.s, 5, 1) == Fraction(5, 16)
    f = build_layered(LayerSpec(5, (5,)))
    assert f.weight == 1
    assert derrida_value(homogeneous(f, 100), 1) == Fraction(5, 16)


@pytest.mark.filterwarnings("ignore:node .* is not essential")
@pytest.mark.parametrize("seed", range(8))
def test_homogeneous_matches_explicit(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(3, 13))
    n = int(rng.integers(1, min(4, N) + 1))
    f = BooleanFunction.from_table(rng.integers(0, 2, 1 << n, dtype=np.uint8))
    net = homogeneous(f, N, seed)
    s = normalized_sensitivities(f)
    for m in range(N + 1):
        assert derrida_homogeneous(N, s, n, m) == derrida_value(net, m)
    assert derrida_homogeneous(N, s, n, 0) == 0


def test_parity_network():
    parity = parse_table("01101001")
    s = normalized_sensitivities(parity)
    assert s == (0, 1, 0, 1)
    net = homogeneous(parity, 7, seed=2)
    for m in range(8):
        assert derrida_homogeneous(7, s, 3, m) == derrida_exhaustive(net, m)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_formula_equals_exhaustive(seed, N):
    net = random_network(np.random.default_rng(seed), N)
    for m in range(N + 1):
        assert derrida_value(net, m) == derrida_exhaustive(net, m)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 9))
def test_complement_invariance(seed, N):
    net = random_network(np.random.default_rng(seed), N)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        flipped = net.complement()
    for m in range(N + 1):
        assert derrida_value(net, m) == derrida_value(flipped, m)
        assert 0 <= derrida_value(net, m) <= N


def test_exhaustive_cap():
    net = NetworkSpec.identity(17)
    with pytest.raises(ValueError):
        derrida_exhaustive(net, 1)
    with pytest.raises(ValueError):
        derrida_exhaustive(NetworkSpec.identity(10), 5, work_cap=100)


def test_m_range_checked():
    net = NetworkSpec.identity(3)
    for fn in (derrida_value, derrida_exhaustive):
        with pytest.raises(ValueError):
            fn(net, 4)


def test_network_json(tmp_path):
    data = {"N": 3, "nodes": [
        {"inputs": [2, 3], "function": "x1 & x2"},
        {"inputs": [1], "function": "10"},
        {"inputs": [1, 2, 3], "function": "0x69"},
    ]}
    path = tmp_path / "net.json"
    path.write_text(json.dumps(data))
    net = load_network(path)
    assert net.N == 3 and net.nodes[0].inputs == (1, 2)
    assert network_from_dict(net.to_dict()) == net
    for m in range(4):
        assert derrida_value(net, m) == derrida_exhaustive(net, m)


def test_network_validation():
    with pytest.raises(ValueError):
        network_from_dict({"N": 2, "nodes": [{"inputs": [1], "function": "01"}]})
    with pytest.raises(ValueError):
        network_from_dict({"nodes": [{"inputs": [1, 1], "function": "0001"}]})
    with pytest.raises(ValueError):
        network_from_dict({"nodes": [{"inputs": [2], "function": "01"}]})
    with pytest.raises(ValueError):
        network_from_dict({"nodes": [{"inputs": [1], "function": "0001"}]})
    with pytest.warns(UserWarning, match="not essential"):
        network_from_dict({"nodes": [{"inputs": [1], "function": "11"}]})


def test_network_size_effect_is_small():
    # same perturbed fraction (1%) at N = 100 and N = 1000, homogeneous NCFs
    worst = 0.0
    for spec in [LayerSpec(5, s) for s in [(5,), (1, 4), (2, 3), (1, 1, 3), (1, 2, 2), (1, 1, 1, 2)]]:
        s = layered_sensitivity_profile(5, spec.layer_sizes).s
        small = derrida_homogeneous(100, s, 5, 1) / 100
        large = derrida_homogeneous(1000, s, 5, 10) / 1000
        worst = max(worst, abs(float(small - large)))
    print(f"max |D/N| difference between N=100 and N=1000 at m/N=1%: {worst:.3g}")
    assert worst < 1e-3
