import re
from unittest.mock import patch

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import linear_sum_assignment

from consensus_lab.config import config
from consensus_lab.errors import DomainError, NumericError, ResourceError
from consensus_lab.families import GraphFamily, generate, random_connected_graph
from consensus_lab.graph import Graph, build_laplacian
from consensus_lab.spectral import spectrum
from consensus_lab.stability import (
    ComplexPoly,
    Gains,
    ModeVerdict,
    StabilityReport,
    assess,
    closed_loop_matrix,
    eigen_oracle,
    hurwitz_chain,
    hurwitz_matrix,
    leader_follower_size_bound,
    mode_char_poly,
    second_hurwitz_condition,
    to_mu_polynomial,
    undirected_condition,
)


def _random_gains(rng, n):
    return Gains(tuple(rng.uniform(0.1, 2.0, size=n)))


def _random_lambda(rng):
    return complex(rng.uniform(0.01, 3.0), rng.uniform(-2.0, 2.0))


def test_gains_from_string():
    gains = Gains.from_string("0.5,1,1", n=3)
    assert gains.a == (0.5, 1.0, 1.0)
    assert gains.n == 3
    assert gains.a_max == 1.0
    assert gains.admissible_candidate
    assert str(gains) == "0.5,1.0,1.0"


@pytest.mark.parametrize(
    "text, n, error_msg",
    [
        ("0.5,1", 3, "Expected 3 gains for order n=3, got 2 ('0.5,1')"),
        ("0.5,x,1", 3, "Could not parse gains '0.5,x,1'"),
        ("", None, "At least one gain is required (n >= 1)"),
        ("1,-1", None, "Gain a1 must be finite and nonnegative, got -1.0"),
        ("1,nan", None, "Gain a1 must be finite and nonnegative, got nan"),
    ],
)
def test_gains_errors(text, n, error_msg):
    with pytest.raises(DomainError, match=re.escape(error_msg)):
        Gains.from_string(text, n=n)


def test_gains_truncate():
    gains = Gains((0.1, 0.8, 1, 1, 1))
    assert gains.truncate(3) == Gains((0.1, 0.8, 1.0))
    with pytest.raises(DomainError, match=re.escape("Cannot truncate 5 gains to n=6")):
        gains.truncate(6)
    assert not Gains((1.0, 0.0)).admissible_candidate


def test_mode_char_poly():
    p = mode_char_poly(Gains((0.5, 1, 1)), 2 + 1j)
    assert_allclose(p.coef, [1 + 0.5j, 2 + 1j, 2 + 1j, 1])


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_to_mu_polynomial_maps_roots(n):
    rng = np.random.default_rng(n)
    p = mode_char_poly(_random_gains(rng, n), _random_lambda(rng))
    mu = to_mu_polynomial(p)
    assert mu.n == n
    assert mu.coefficients[-1] == 1

    expected = -1j * p.roots()
    got = mu.roots()
    row, col = linear_sum_assignment(np.abs(expected[:, None] - got[None, :]))
    assert_allclose(got[col], expected[row], atol=1e-9)


def test_to_mu_polynomial_requires_monic():
    from numpy.polynomial import Polynomial

    with pytest.raises(DomainError, match=re.escape("Expected a monic polynomial")):
        to_mu_polynomial(Polynomial([1, 2]))


def test_complex_poly_parts():
    p = ComplexPoly(np.array([1 + 2j, 3 - 1j, 1]))
    assert_allclose(p.f, [1, 3])
    assert_allclose(p.g, [2, -1])
    with pytest.raises(DomainError, match=re.escape("ComplexPoly must be monic")):
        ComplexPoly(np.array([1, 2]))


def test_hurwitz_matrix_layout():
    p = ComplexPoly(np.array([1 + 4j, 2 + 5j, 3 + 6j, 1]))
    M = hurwitz_matrix(p, 2)
    assert_allclose(
        M,
        [
            [1, 3, 2, 1],
            [0, 6, 5, 4],
            [0, 1, 3, 2],
            [0, 0, 6, 5],
        ],
    )


def test_hurwitz_chain_known_values():
    chain = hurwitz_chain(to_mu_polynomial(mode_char_poly(Gains((0.5, 1, 1)), 1)))
    assert chain.size == 3
    assert chain[0] == pytest.approx(1.0)
    assert chain[1] == pytest.approx(0.5)
    assert np.all(chain > 0)


def test_hurwitz_chain_degree_zero():
    with pytest.raises(DomainError, match=re.escape("needs degree >= 1")):
        hurwitz_chain(ComplexPoly(np.array([1])))


@pytest.mark.parametrize(
    "a, lam, expected",
    [((0.5, 1, 1), 1, 0.5), ((1, 1, 1), 1j, -1.0), ((0.5, 1, 1), 2 + 1j, 7.0)],
)
def test_second_hurwitz_condition_values(a, lam, expected):
    assert second_hurwitz_condition(Gains(a), lam) == pytest.approx(expected)


def test_second_hurwitz_condition_matches_second_determinant():
    rng = np.random.default_rng(10)
    for _ in range(200):
        n = int(rng.integers(3, 6))
        gains = _random_gains(rng, n)
        lam = _random_lambda(rng)
        chain = hurwitz_chain(to_mu_polynomial(mode_char_poly(gains, lam)))
        closed_form = second_hurwitz_condition(gains, lam)
        assert chain[1] == pytest.approx(closed_form, rel=1e-8, abs=1e-12)


def test_undirected_condition():
    gains = Gains((0.5, 1, 1))
    assert undirected_condition(gains, 0.586) == pytest.approx(0.086)
    assert undirected_condition(gains, 0.468) < 0

    with pytest.raises(DomainError, match=re.escape("needs a real eigenvalue")):
        undirected_condition(gains, 1 + 1j)
    with pytest.raises(DomainError, match=re.escape("Condition needs n >= 3")):
        undirected_condition(Gains((1, 1)), 1)


def test_routh_hurwitz_matches_roots():
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 1000:
        n = int(rng.integers(3, 6))
        gains = _random_gains(rng, n)
        lam = _random_lambda(rng)
        p = mode_char_poly(gains, lam)
        chain = hurwitz_chain(to_mu_polynomial(p))
        max_re = np.max(p.roots().real)
        if np.min(np.abs(chain)) <= 1e-7 or abs(max_re) <= 1e-7:
            continue

        assert bool(np.all(chain > 0)) == bool(max_re < 0), (gains, lam, chain)
        checked += 1


def test_closed_loop_matrix_shape():
    gains = Gains((0.5, 1, 1))
    L = build_laplacian(generate(GraphFamily("cycle"), 4))
    A = closed_loop_matrix(gains, L)
    assert A.shape == (12, 12)
    assert_allclose(A[:4, 4:8], np.eye(4))
    assert_allclose(A[8:, :4], -0.5 * L.matrix)


def _block_graphs():
    return [
        generate(GraphFamily("cycle"), 7),
        generate(GraphFamily("path_fuzz", q=4), 12),
        generate(GraphFamily("directed_cycle", q=2), 6),
        random_connected_graph(9, seed=4),
        Graph(3, [(0, 1, 1.0), (1, 2, 2.0), (2, 0, 0.5)]),
    ]


@pytest.mark.parametrize("g", _block_graphs())
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_block_diagonalization_identity(g, n):
    gains = Gains(tuple(np.linspace(0.3, 1.2, n)))
    L = build_laplacian(g)
    oracle = eigen_oracle(gains, L)

    modes = np.concatenate(
        [mode_char_poly(gains, lam).roots() for lam in spectrum(L).eigenvalues]
    )
    # the consensus modes form an n-fold Jordan block, compare the rest
    modes = modes[np.argsort(np.abs(modes), kind="stable")][n:]
    full = oracle.eigenvalues[np.argsort(np.abs(oracle.eigenvalues), kind="stable")][
        n:
    ]

    row, col = linear_sum_assignment(np.abs(modes[:, None] - full[None, :]))
    assert np.max(np.abs(modes[row] - full[col])) <= 1e-8


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("g", _block_graphs())
def test_oracle_zero_mode_count(g, n):
    gains = Gains(tuple(np.linspace(0.5, 1.0, n)))
    assert eigen_oracle(gains, build_laplacian(g)).zero_mode_count == n


def test_oracle_grounded_has_no_zero_modes():
    g = generate(GraphFamily("tree_path"), 6)
    oracle = eigen_oracle(Gains((0.5, 1, 1)), build_laplacian(g, "grounded", 0))
    assert oracle.zero_mode_count == 0


@pytest.mark.parametrize(
    "edges, components",
    [
        # two triangles
        (
            [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (3, 4, 1.0), (4, 5, 2.0), (5, 3, 1.0)],
            2,
        ),
        # triangle, one edge and an isolated node
        ([(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (3, 4, 0.5)], 3),
    ],
)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_oracle_zero_modes_of_disconnected_graph(edges, components, n):
    g = Graph.from_undirected_edges(6, edges)
    gains = Gains(tuple(np.linspace(0.5, 1.0, n)))
    oracle = eigen_oracle(gains, build_laplacian(g))
    assert oracle.zero_mode_count == components * n


def test_eigen_oracle_benchmark(benchmark, ring_gains):
    L = build_laplacian(generate(GraphFamily("cycle"), 40))
    oracle = benchmark(eigen_oracle, ring_gains, L)
    assert oracle.zero_mode_count == 3
    assert oracle.max_real_part > 0


def test_oracle_resource_guard(config_override, cycle_8):
    config_override("ORACLE_MAX_DIM", 20)
    error_msg = re.escape("Closed loop dimension 24 exceeds ORACLE_MAX_DIM=20")
    with pytest.raises(ResourceError, match=error_msg):
        eigen_oracle(Gains((0.5, 1, 1)), build_laplacian(cycle_8))


def test_assess_cycle_phase_transition(ring_gains, cycle_8, cycle_9):
    stable = assess(ring_gains, cycle_8)
    assert stable.system_stable
    assert stable.status == "stable"
    assert stable.method == "determinant"
    assert stable.lambda2_real == pytest.approx(2 - np.sqrt(2))
    assert len(stable.verdicts) == 7
    assert stable.verdicts[0].l == 2

    unstable = assess(ring_gains, cycle_9)
    assert not unstable.system_stable
    assert unstable.status == "unstable"
    assert unstable.lambda2_real == pytest.approx(2 - 2 * np.cos(2 * np.pi / 9))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_assess_zero_mode_count(path_sweep_gains, cycle_8, n):
    report = assess(path_sweep_gains.truncate(n), cycle_8)
    assert report.zero_mode_count == n


def test_assess_oracle_method_agrees(ring_gains, cycle_8, cycle_9):
    for g in (cycle_8, cycle_9):
        det = assess(ring_gains, g)
        oracle = assess(ring_gains, g, method="oracle")
        assert oracle.method == "oracle"
        assert oracle.system_stable == det.system_stable
        assert oracle.zero_mode_count == 3
        assert all(v.source == "oracle" and v.det_signed == () for v in oracle.verdicts)


def test_assess_non_normal_uses_oracle(ring_gains, directed_triangle):
    report = assess(ring_gains, directed_triangle)
    assert report.method == "oracle"

    error_msg = re.escape("The determinant chain needs a normal Laplacian")
    with pytest.raises(DomainError, match=error_msg):
        assess(ring_gains, directed_triangle, method="determinant")


def test_assess_directed_cycle_uses_determinant(ring_gains):
    report = assess(ring_gains, generate(GraphFamily("directed_cycle"), 5))
    assert report.method == "determinant"
    assert any(v.eigenvalue.imag != 0 for v in report.verdicts)


def test_assess_requires_spanning_tree(ring_gains):
    g = Graph.from_undirected_edges(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(DomainError, match=re.escape("Graph has no spanning tree")):
        assess(ring_gains, g)


def test_assess_leader_mode(ring_gains):
    g = generate(GraphFamily("tree_path"), 3)
    report = assess(ring_gains, g, mode="leader", leader=0)
    assert report.mode == "leader"
    assert report.leader == 0
    assert len(report.verdicts) == 2
    assert report.verdicts[0].l == 1
    assert report.zero_mode_count == 0
    assert report.to_dict()["leader"] == 1

    # the slowest grounded mode is (3 - sqrt(5)) / 2 < 0.5
    assert not report.system_stable


def test_assess_leader_not_reachable(ring_gains, directed_chain):
    with pytest.raises(DomainError, match=re.escape("connected to leader 0")):
        assess(ring_gains, directed_chain, mode="leader", leader=0)
    assert assess(ring_gains, directed_chain, mode="leader", leader=2).N == 3


@pytest.mark.parametrize(
    "kwargs, error_msg",
    [
        ({"mode": "swarm"}, "Unknown mode 'swarm'"),
        ({"method": "guess"}, "Unknown method 'guess'"),
        ({"mode": "leader"}, "A leader index is required"),
    ],
)
def test_assess_argument_errors(ring_gains, cycle_8, kwargs, error_msg):
    with pytest.raises(DomainError, match=re.escape(error_msg)):
        assess(ring_gains, cycle_8, **kwargs)


@patch("consensus_lab.stability.hurwitz_chain")
def test_assess_disagreement_raises(mock_chain, ring_gains, cycle_8):
    mock_chain.return_value = np.array([1.0, -1.0, 1.0])
    with pytest.raises(NumericError, match="disagree for mode l=2") as exc_info:
        assess(ring_gains, cycle_8)
    assert exc_info.value.matrix_id == "L[full, N=8, undirected]"


def _verdict(stable, marginal):
    return ModeVerdict(
        l=2,
        eigenvalue=0.5 + 0j,
        det_signed=(1.0,),
        hurwitz_stable=stable,
        marginal=marginal,
        oracle_max_real_part=-1.0 if stable else 1.0,
    )


@pytest.mark.parametrize(
    "verdicts, status",
    [
        ([(True, False), (True, True)], "stable"),
        ([(True, False), (False, True)], "marginal"),
        ([(False, True), (False, False)], "unstable"),
    ],
)
def test_report_status(ring_gains, verdicts, status):
    modes = tuple(_verdict(*v) for v in verdicts)
    report = StabilityReport(
        gains=ring_gains,
        N=3,
        mode="leaderless",
        verdicts=modes,
        system_stable=all(v.hurwitz_stable for v in modes),
        zero_mode_count=3,
        method="determinant",
        matrix_id="test",
    )
    assert report.status == status


def test_report_to_dict(ring_gains, cycle_8):
    out = assess(ring_gains, cycle_8).to_dict()
    assert set(out) == {
        "gains",
        "n",
        "N",
        "mode",
        "per_mode",
        "system_stable",
        "status",
        "zero_mode_count",
        "method",
    }
    assert out["gains"] == [0.5, 1.0, 1.0]
    assert len(out["per_mode"]) == 7
    assert set(out["per_mode"][0]) == {
        "l",
        "lambda_re",
        "lambda_im",
        "det_signed",
        "stable",
        "marginal",
        "oracle_max_real_part",
        "source",
    }


@pytest.mark.parametrize(
    "a, q, w_max, expected",
    [((0.5, 1, 1), 2, 1.0, 6), ((1, 1, 1), 2, 1.0, 4), ((0.5, 1, 1), 2, 0.5, 4)],
)
def test_leader_follower_size_bound(a, q, w_max, expected):
    assert leader_follower_size_bound(Gains(a), q, w_max) == expected


def test_leader_follower_size_bound_unstable_beyond(ring_gains):
    N = leader_follower_size_bound(ring_gains, 2)
    g = generate(GraphFamily("tree_path"), N)
    assert not assess(ring_gains, g, mode="leader", leader=0).system_stable


def test_leader_smallest_grounded_eigenvalue_condition_is_necessary(ring_gains):
    graphs = [generate(GraphFamily("tree_path"), N) for N in range(3, 15)]
    graphs += [random_connected_graph(N, seed=N) for N in range(3, 15)]

    violated = 0
    for g in graphs:
        L = build_laplacian(g, "grounded", 0)
        smallest = float(spectrum(L).eigenvalues[0].real)
        if undirected_condition(ring_gains, smallest) < -config["MARGIN_TOL"]:
            violated += 1
            report = assess(ring_gains, g, mode="leader", leader=0)
            assert not report.system_stable

    assert violated > 0


@pytest.mark.slow
def test_threshold_on_random_graphs(ring_gains):
    rng = np.random.default_rng(7)
    checked = 0
    seed = 0
    while checked < 200:
        seed += 1
        N = int(rng.integers(3, 31))
        g = random_connected_graph(
            N,
            seed=seed,
            extra_edge_probability=float(rng.uniform(0.0, 0.3)),
            unit_weights=bool(rng.integers(0, 2)),
        )
        lambda2 = spectrum(build_laplacian(g)).lambda2_real
        if abs(lambda2 - 0.5) <= 1e-3:
            continue

        report = assess(ring_gains, g)
        assert report.system_stable == (lambda2 > 0.5)
        oracle = eigen_oracle(ring_gains, build_laplacian(g))
        assert report.system_stable == (oracle.max_real_part < 0)
        checked += 1
