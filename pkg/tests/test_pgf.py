"""The generating-function engine: per-link PGFs, table recursion, ETT, pmf."""

import itertools
import math

import numpy as np
import pytest

from dynpath.closedform import bernoulli_ett, max_geom_ett, steady_ett
from dynpath.errors import InfiniteExpectation
from dynpath.model import EdgeDynamics, FailureModel, LengthDist, uniform_path
from dynpath.oracle import exact_ett_dp, exact_pmf_dp
from dynpath.pgf import (
    GammaPair,
    LinkPgfPair,
    ett,
    f_pair,
    gamma_pair,
    gy,
    pgf_table,
    pmf,
)

ALL_LENGTHS = [
    LengthDist.cut(),
    LengthDist.soa(),
    LengthDist.constant(2),
    LengthDist.constant(3),
    LengthDist.from_pairs([(0, 0.5), (2, 0.5)]),
    LengthDist.from_pairs([(1, 0.25), (3, 0.75)]),
]
Z_GRID = np.linspace(-1.0, 1.0, 21)


class TestGy:
    def test_normalization(self):
        assert gy(EdgeDynamics(0.37, 0.2), 1.0) == pytest.approx(1.0)

    def test_waits_at_least_one_slot(self):
        assert gy(EdgeDynamics(0.37, 0.2), 0.0) == 0.0

    def test_geometric_series_value(self):
        assert gy(EdgeDynamics(0.25, 0.25), 0.5) == pytest.approx(0.2)

    def test_domain_guard(self):
        with pytest.raises(ValueError):
            gy(EdgeDynamics(0.5, 0.5), 1.5)


class TestFPair:
    def test_cant_start_unit_link(self):
        f0, f1 = f_pair(FailureModel.CANT_START, EdgeDynamics(0.5, 0.5), LengthDist.soa(), 0.5)
        assert f1 == pytest.approx(0.5)
        assert f0 == pytest.approx(1.0 / 6.0)

    @pytest.mark.parametrize(
        "model", [FailureModel.RETRANSMIT_IDENTICAL, FailureModel.RETRANSMIT_RESAMPLED]
    )
    @pytest.mark.parametrize("p,q", [(0.3, 0.2), (0.7, 0.9), (0.5, 1.0)])
    def test_retransmit_unit_link_reduces_to_z(self, model, p, q):
        dyn = EdgeDynamics(p, q)
        f0, f1 = f_pair(model, dyn, LengthDist.soa(), Z_GRID)
        np.testing.assert_allclose(f1, Z_GRID, atol=1e-12)
        expected_f0 = p * Z_GRID**2 / (1.0 - (1.0 - p) * Z_GRID)
        np.testing.assert_allclose(f0, expected_f0, atol=1e-12)

    @pytest.mark.parametrize(
        "model", [FailureModel.RETRANSMIT_IDENTICAL, FailureModel.RETRANSMIT_RESAMPLED]
    )
    def test_retransmit_zero_link_reduces_to_one(self, model):
        dyn = EdgeDynamics(0.4, 0.6)
        f0, f1 = f_pair(model, dyn, LengthDist.cut(), Z_GRID)
        np.testing.assert_allclose(f1, np.ones_like(Z_GRID), atol=1e-12)
        np.testing.assert_allclose(f0, gy(dyn, Z_GRID), atol=1e-12)

    def test_off_arrival_factorizes_through_wait(self):
        # F0 = G_Y * F1 across 200 random (model, p, q, length, z) tuples
        rng = np.random.default_rng(61524)
        models = list(FailureModel)
        for _ in range(200):
            model = models[rng.integers(len(models))]
            p = float(rng.uniform(0.05, 1.0))
            q = float(rng.uniform(0.0, 0.95))
            length = ALL_LENGTHS[rng.integers(len(ALL_LENGTHS))]
            z = float(rng.uniform(-1.0, 1.0))
            dyn = EdgeDynamics(p, q)
            f0, f1 = f_pair(model, dyn, length, z)
            assert abs(f0 - gy(dyn, z) * f1) <= 1e-12

    @pytest.mark.parametrize("model", list(FailureModel))
    @pytest.mark.parametrize("length", ALL_LENGTHS)
    def test_normalization_at_one(self, model, length):
        dyn = EdgeDynamics(0.35, 0.45)
        f0, f1 = f_pair(model, dyn, length, 1.0)
        assert f1 == pytest.approx(1.0, abs=1e-12)
        assert f0 == pytest.approx(1.0, abs=1e-12)

    def test_divergent_retransmit_rejected(self):
        dyn = EdgeDynamics(0.5, 1.0)
        for model in (FailureModel.RETRANSMIT_IDENTICAL, FailureModel.RETRANSMIT_RESAMPLED):
            with pytest.raises(InfiniteExpectation):
                f_pair(model, dyn, LengthDist.constant(2), 0.5)

    def test_case_collapse_for_constant_lengths(self):
        dyn = EdgeDynamics(0.4, 0.7)
        for d in (0, 1, 2, 3):
            fa = f_pair(FailureModel.RETRANSMIT_IDENTICAL, dyn, LengthDist.constant(d), Z_GRID)[1]
            fb = f_pair(FailureModel.RETRANSMIT_RESAMPLED, dyn, LengthDist.constant(d), Z_GRID)[1]
            np.testing.assert_allclose(fa, fb, atol=1e-12)

    def test_cases_differ_for_two_point_lengths(self):
        dyn = EdgeDynamics(0.4, 0.7)
        length = LengthDist.from_pairs([(1, 0.5), (3, 0.5)])
        fa = f_pair(FailureModel.RETRANSMIT_IDENTICAL, dyn, length, Z_GRID)[1]
        fb = f_pair(FailureModel.RETRANSMIT_RESAMPLED, dyn, length, Z_GRID)[1]
        assert np.max(np.abs(fa - fb)) > 1e-6

    def test_link_pgf_pair_wrapper(self):
        pair = LinkPgfPair(FailureModel.RESUME, EdgeDynamics(0.5, 0.5), LengthDist.constant(2))
        assert pair.eval_f1(1.0) == pytest.approx(1.0)
        assert pair.eval_f0(0.5) == pytest.approx(gy(pair.dyn, 0.5) * pair.eval_f1(0.5))
        assert pair.gammas() == gamma_pair(pair.model, pair.dyn, pair.length)


class TestGammaPair:
    def test_examples(self):
        d5 = EdgeDynamics(0.5, 0.5)
        assert gamma_pair(FailureModel.CANT_START, d5, LengthDist.constant(2)) == GammaPair(2.0, 4.0)
        g = gamma_pair(FailureModel.RESUME, d5, LengthDist.constant(2))
        assert g.gamma1 == pytest.approx(3.0)
        for model in (FailureModel.RETRANSMIT_IDENTICAL, FailureModel.RETRANSMIT_RESAMPLED):
            for dyn in (EdgeDynamics(0.3, 0.4), EdgeDynamics(0.9, 0.1)):
                assert gamma_pair(model, dyn, LengthDist.soa()).gamma1 == pytest.approx(1.0)

    @pytest.mark.parametrize("model", list(FailureModel))
    @pytest.mark.parametrize("p", [0.2, 0.5, 0.9])
    @pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
    def test_off_on_gap_is_inverse_p(self, model, p, q):
        dyn = EdgeDynamics(p, q)
        for length in ALL_LENGTHS:
            g = gamma_pair(model, dyn, length)
            assert g.gamma0 - g.gamma1 == pytest.approx(1.0 / p, abs=1e-9)
            assert g.gamma1 >= length.mean() - 1e-12

    @pytest.mark.parametrize("model", list(FailureModel))
    @pytest.mark.parametrize("length", ALL_LENGTHS)
    def test_matches_finite_difference(self, model, length):
        dyn = EdgeDynamics(0.45, 0.35)
        h = 1e-5
        up = f_pair(model, dyn, length, 1.0 + h)[1]
        down = f_pair(model, dyn, length, 1.0 - h)[1]
        fd = (up - down) / (2.0 * h)
        assert gamma_pair(model, dyn, length).gamma1 == pytest.approx(fd, abs=1e-5)

    def test_divergent_retransmit_rejected(self):
        with pytest.raises(InfiniteExpectation):
            gamma_pair(FailureModel.RETRANSMIT_IDENTICAL, EdgeDynamics(0.5, 1.0), LengthDist.constant(3))


class TestPgfTable:
    def test_single_on_cut_link(self):
        path = uniform_path((1,), LengthDist.cut(), EdgeDynamics(0.5, 0.5), FailureModel.CANT_START)
        table = pgf_table(path)
        assert table.values[1][0] == pytest.approx(1.0)

    def test_instant_first_hop(self):
        path = uniform_path((1, 0), LengthDist.cut(), EdgeDynamics(0.5, 0.5), FailureModel.CANT_START)
        table = pgf_table(path)
        # beta = 0 and link 1 is an on zero-length link, so T_1 = 0 surely
        assert table.values[1][1] == pytest.approx(1.0)

    def test_table_shape_and_bounds(self):
        path = uniform_path(
            (0, 1, 1, 0), LengthDist.constant(2), EdgeDynamics(0.3, 0.2), FailureModel.RESUME
        )
        table = pgf_table(path)
        n = path.n
        assert table.n == n
        for i, row in enumerate(table.values):
            assert len(row) == n - i + 1
            assert np.all(np.abs(row) <= 1.0 + 1e-9)
        assert np.all(table.values[0] == 1.0)
        # normalization column: G_i(beta^0) = G_i(1) = 1
        for row in table.values:
            assert row[0] == pytest.approx(1.0, abs=1e-12)


class TestEtt:
    def test_single_on_unit_link(self):
        for dyn in (EdgeDynamics(0.2, 0.9), EdgeDynamics(0.8, 0.1)):
            path = uniform_path((1,), LengthDist.soa(), dyn, FailureModel.CANT_START)
            assert ett(path)[0] == pytest.approx(1.0, abs=1e-12)

    def test_hand_worked_two_link_paths(self):
        path = uniform_path((1, 0), LengthDist.cut(), EdgeDynamics(0.5, 0.5), FailureModel.CANT_START)
        assert ett(path)[0] == pytest.approx(2.0, abs=1e-12)
        path = uniform_path((0, 0), LengthDist.cut(), EdgeDynamics(0.25, 0.25), FailureModel.CANT_START)
        assert ett(path)[0] == pytest.approx(6.4, abs=1e-12)

    def test_per_node_accumulates(self):
        path = uniform_path(
            (0, 1, 0), LengthDist.constant(2), EdgeDynamics(0.4, 0.3), FailureModel.RESUME
        )
        total, per_node = ett(path)
        assert per_node[0] == 0.0
        assert per_node[-1] == pytest.approx(total)
        assert np.all(np.diff(per_node) > 0)

    def test_matches_absorbing_chain_small_grid(self):
        for n in (1, 2, 3):
            for length in (LengthDist.cut(), LengthDist.constant(2)):
                for model in FailureModel:
                    dyn = EdgeDynamics(0.35, 0.55)
                    for x in itertools.product((0, 1), repeat=n):
                        path = uniform_path(x, length, dyn, model)
                        expected = exact_ett_dp(path)
                        assert ett(path)[0] == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_model_equivalence_for_unit_and_zero_lengths(self):
        # with every length in {0, 1} an interrupted crossing cannot exist
        lengths = (
            LengthDist.cut(),
            LengthDist.soa(),
            LengthDist.from_pairs([(0, 0.3), (1, 0.7)]),
        )
        dyn = EdgeDynamics(0.45, 0.65)
        from dynpath.model import PathSpec

        for x in itertools.product((0, 1), repeat=3):
            results = [
                ett(PathSpec(x, lengths, dyn, model))[0] for model in FailureModel
            ]
            assert max(results) - min(results) <= 1e-10

    def test_never_failing_links_reduce_to_max_of_geometrics(self):
        p = 0.3
        dyn = EdgeDynamics(p, 0.0)
        for n_hat in range(0, 11):
            bits = tuple([0] * n_hat + [1] * 2)
            path = uniform_path(bits, LengthDist.cut(), dyn, FailureModel.CANT_START)
            assert ett(path)[0] == pytest.approx(max_geom_ett(n_hat, p), abs=1e-9)

    def test_memoryless_average_reduces_to_bernoulli(self):
        p = 0.4
        dyn = EdgeDynamics(p, 1.0 - p)
        length = LengthDist.constant(2)
        n = 3
        avg = 0.0
        for x in itertools.product((0, 1), repeat=n):
            w = math.prod(p if b else 1.0 - p for b in x)
            avg += w * ett(uniform_path(x, length, dyn, FailureModel.CANT_START))[0]
        assert avg == pytest.approx(bernoulli_ett(p, [length] * n), abs=1e-9)

    def test_stationary_average_reduces_to_steady_state(self):
        dyn = EdgeDynamics(0.6, 0.2)
        length = LengthDist.soa()
        n = 3
        avg = 0.0
        for x in itertools.product((0, 1), repeat=n):
            w = math.prod(dyn.pi1 if b else dyn.pi0 for b in x)
            avg += w * ett(uniform_path(x, length, dyn, FailureModel.CANT_START))[0]
        assert avg == pytest.approx(steady_ett(dyn, [length] * n), abs=1e-9)

    def test_divergent_configuration_raises(self):
        path = uniform_path(
            (1,), LengthDist.constant(2), EdgeDynamics(0.5, 1.0), FailureModel.RETRANSMIT_RESAMPLED
        )
        with pytest.raises(InfiniteExpectation):
            ett(path)


class TestPmf:
    def test_instant_traversal(self):
        path = uniform_path((1,), LengthDist.cut(), EdgeDynamics(0.5, 0.5), FailureModel.CANT_START)
        result = pmf(path, 4)
        assert result.coeffs[0] == pytest.approx(1.0)
        assert np.all(result.coeffs[1:] == 0.0)
        assert result.tail_mass == pytest.approx(0.0)

    def test_single_off_link_is_geometric(self):
        path = uniform_path((0,), LengthDist.cut(), EdgeDynamics(0.5, 0.5), FailureModel.CANT_START)
        result = pmf(path, 10)
        assert result.coeffs[0] == 0.0
        np.testing.assert_allclose(result.coeffs[1:], 0.5 ** np.arange(1, 11), atol=1e-12)

    def test_mass_accounting(self):
        path = uniform_path(
            (0, 1), LengthDist.from_pairs([(0, 0.5), (2, 0.5)]), EdgeDynamics(0.3, 0.4), FailureModel.RESUME
        )
        result = pmf(path, 60)
        assert np.all(result.coeffs >= 0.0)
        assert np.all(result.coeffs <= 1.0 + 1e-12)
        assert math.fsum(result.coeffs.tolist()) + result.tail_mass == pytest.approx(1.0, abs=1e-9)
        assert -1e-9 <= result.tail_mass <= 1.0

    def test_truncated_mean_brackets_ett(self):
        path = uniform_path((0, 0), LengthDist.constant(2), EdgeDynamics(0.5, 0.3), FailureModel.RESUME)
        total, _ = ett(path)
        wide = pmf(path, 800)
        assert wide.tail_mass < 1e-12
        assert wide.truncated_mean() <= total + 1e-9
        assert wide.truncated_mean() == pytest.approx(total, abs=1e-6)

    def test_default_degree_follows_expectation(self):
        path = uniform_path((0,), LengthDist.cut(), EdgeDynamics(0.5, 0.5), FailureModel.CANT_START)
        result = pmf(path)
        total, _ = ett(path)
        assert result.k == math.ceil(20.0 * (total + 1.0))

    @pytest.mark.parametrize("model", list(FailureModel))
    def test_matches_forward_propagation(self, model):
        dyn = EdgeDynamics(0.3, 0.6)
        for length in (LengthDist.soa(), LengthDist.constant(3), LengthDist.from_pairs([(0, 0.5), (2, 0.5)])):
            for x in ((0, 1), (1, 1)):
                path = uniform_path(x, length, dyn, model)
                series = pmf(path, 40).coeffs
                exact = exact_pmf_dp(path, 40)
                np.testing.assert_allclose(series, exact, atol=1e-10)
