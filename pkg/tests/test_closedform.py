"""Closed-form special cases against independent oracles."""

import itertools
import math

import numpy as np
import pytest

from dynpath.closedform import (
    DeterministicPath,
    bernoulli_ett,
    bernoulli_pmf,
    det_model2_time,
    det_model2_time_batch,
    det_traversal_time,
    det_traversal_time_batch,
    max_geom_ett,
    steady_ett,
    steady_pmf_as_printed,
)
from dynpath.errors import ConfigurationError
from dynpath.model import EdgeDynamics, FailureModel, LengthDist, uniform_path
from dynpath.oracle import det_slot_time, exact_pmf_dp


class TestDeterministicSetting:
    def test_examples(self):
        assert det_traversal_time(DeterministicPath((1, 1), (0, 0))) == 0
        assert det_traversal_time(DeterministicPath((1, 0, 1), (0, 0, 0))) == 2
        assert det_traversal_time(DeterministicPath((1, 1), (1, 1))) == 3

    def test_model2_examples(self):
        assert det_model2_time(DeterministicPath((1,), (1,))) == 1
        assert det_model2_time(DeterministicPath((1,), (2,))) == 3
        assert det_model2_time(DeterministicPath((0,), (1,))) == 2

    def test_exhaustive_small_against_slot_simulator(self):
        for n in range(1, 5):
            for bits in itertools.product((0, 1), repeat=n):
                for lengths in itertools.product((0, 1, 2, 3), repeat=n):
                    path = DeterministicPath(bits, lengths)
                    assert det_traversal_time(path) == det_slot_time(
                        bits, lengths, FailureModel.CANT_START
                    )
                    if all(d >= 1 for d in lengths):
                        assert det_model2_time(path) == det_slot_time(
                            bits, lengths, FailureModel.RESUME
                        )

    def test_zero_length_edges_dropped_in_model2(self):
        with_zero = DeterministicPath((1, 0, 1), (1, 0, 2))
        without = DeterministicPath((1, 1), (1, 2))
        assert det_model2_time(with_zero) == det_model2_time(without)

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(20240917)
        for n in (2, 5, 8):
            bits = rng.integers(0, 2, size=(200, n))
            lens = rng.integers(0, 4, size=(200, n))
            batch = det_traversal_time_batch(bits, lens)
            for row in range(bits.shape[0]):
                path = DeterministicPath(tuple(bits[row].tolist()), tuple(lens[row].tolist()))
                assert batch[row] == det_traversal_time(path)
            lens2 = rng.integers(1, 4, size=(200, n))
            batch2 = det_model2_time_batch(bits, lens2)
            for row in range(bits.shape[0]):
                path = DeterministicPath(tuple(bits[row].tolist()), tuple(lens2[row].tolist()))
                assert batch2[row] == det_model2_time(path)

    def test_simplified_printed_forms_stay_wrong(self):
        # Regression locks for the known bad shortcuts: "2n - k + 1" for unit
        # lengths and "2D - k + 1" for the resume model both disagree with
        # direct simulation, so nothing in the package may adopt them.
        bits, lengths = (1, 1), (1, 1)
        n = 2
        k = abs(bits[0] - 1) + abs(bits[1] - bits[0])
        simulated = det_slot_time(bits, lengths, FailureModel.CANT_START)
        assert simulated == det_traversal_time(DeterministicPath(bits, lengths)) == 3
        assert 2 * n - k + 1 == 5 != simulated

        bits2, lengths2 = (1,), (1,)
        big_d = sum(lengths2)
        k2 = abs(bits2[0] - 1)
        simulated2 = det_slot_time(bits2, lengths2, FailureModel.RESUME)
        assert simulated2 == det_model2_time(DeterministicPath(bits2, lengths2)) == 1
        assert 2 * big_d - k2 + 1 == 3 != simulated2


class TestBernoulliModel:
    def test_ett_examples(self):
        assert bernoulli_ett(0.5, [LengthDist.soa()] * 4) == pytest.approx(8.0)
        assert bernoulli_ett(0.25, [LengthDist.cut()] * 3) == pytest.approx(9.0)
        lengths = [LengthDist.constant(2), LengthDist.from_pairs([(0, 0.5), (2, 0.5)])]
        assert bernoulli_ett(1.0, lengths) == pytest.approx(3.0)

    def test_pmf_examples(self):
        assert bernoulli_pmf(0.5, 2, 0, 0) == pytest.approx(0.25)
        assert bernoulli_pmf(0.5, 1, 0, 3) == pytest.approx(0.0625)
        assert bernoulli_pmf(0.7, 3, 4, 3) == 0.0

    @pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.9])
    @pytest.mark.parametrize("n,big_d", [(1, 0), (2, 3), (4, 4)])
    def test_pmf_normalizes(self, p, n, big_d):
        total = math.fsum(bernoulli_pmf(p, n, big_d, t) for t in range(big_d, big_d + 2001))
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_matches_steady_state_when_memoryless(self):
        lengths = [LengthDist.soa(), LengthDist.constant(2), LengthDist.cut()]
        for p in (0.2, 0.5, 0.9):
            dyn = EdgeDynamics(p, 1.0 - p)
            assert bernoulli_ett(p, lengths) == pytest.approx(steady_ett(dyn, lengths), abs=1e-12)


class TestSteadyState:
    def test_ett_examples(self):
        dyn = EdgeDynamics(0.5, 0.5)
        assert steady_ett(dyn, [LengthDist.soa()] * 3) == pytest.approx(6.0)
        assert steady_ett(dyn, [LengthDist.cut()] * 3) == pytest.approx(3.0)
        never_fails = EdgeDynamics(0.3, 0.0)
        lengths = [LengthDist.constant(2), LengthDist.soa()]
        assert steady_ett(never_fails, lengths) == pytest.approx(3.0)

    def test_printed_pmf_single_link(self):
        dyn = EdgeDynamics(0.5, 0.5)
        assert steady_pmf_as_printed(dyn, 1, 1, 2) == pytest.approx(0.25)

    def test_printed_pmf_below_minimum_latency(self):
        assert steady_pmf_as_printed(EdgeDynamics(0.4, 0.2), 3, 5, 4) == 0.0

    def test_printed_pmf_known_discrepancy(self):
        # The transcription gives 0.125 at (n=2, D=0, t=1); the exact forward
        # propagation gives a different value.  The gap is recorded behavior,
        # not a bug in either route.
        dyn = EdgeDynamics(0.5, 0.5)
        printed = steady_pmf_as_printed(dyn, 2, 0, 1)
        assert printed == pytest.approx(0.125)
        path = uniform_path((1, 1), LengthDist.cut(), dyn, FailureModel.CANT_START)
        exact = exact_pmf_dp(path, 1, initial="stationary")[1]
        assert abs(printed - exact) > 1e-3


class TestMaxGeometric:
    def test_examples(self):
        assert max_geom_ett(0, 0.4) == 0.0
        assert max_geom_ett(1, 0.5) == pytest.approx(2.0)
        assert max_geom_ett(2, 0.5) == pytest.approx(8.0 / 3.0)

    @pytest.mark.parametrize("p", [0.15, 0.4, 0.75, 1.0])
    def test_matches_tail_sum_oracle(self, p):
        # E[max] = sum_t (1 - F(t)^n) with F(t) = 1 - (1-p)^t
        for n_hat in range(1, 11):
            total = 0.0
            t = 0
            while True:
                term = 1.0 - (1.0 - (1.0 - p) ** t) ** n_hat
                total += term
                t += 1
                if term < 1e-16:
                    break
            assert max_geom_ett(n_hat, p) == pytest.approx(total, abs=1e-9)

    @pytest.mark.parametrize("p", [0.2, 0.6])
    def test_nondecreasing(self, p):
        values = [max_geom_ett(k, p) for k in range(0, 21)]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_precision_limit_enforced(self):
        with pytest.raises(ConfigurationError):
            max_geom_ett(61, 0.5)
