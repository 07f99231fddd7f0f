import math

import numpy as np
import pytest

from cbqs.amplify import (
    AAParams,
    BudgetSpec,
    ExactLimitExceeded,
    NoFeasibleStart,
    aa_success,
    cbqs_run,
    classical_success,
    exact_good_probability,
    greedy_incumbent,
    qsearch_expected_costs,
    qsearch_invocation_costs,
    simulate_qsearch,
    single_vs_both_constraints,
)
from cbqs.baselines import brute_force
from cbqs.costs import CostParams
from cbqs.instance import GeneratorParams, MfkpInstance, generate_instance, mfkp_constraints
from cbqs.sampler import BiasSpec, distribution, path_probability

INST3 = MfkpInstance((6, 10, 12), (1, 2, 3), 5, 1)


class TestClassicalSuccess:
    def test_half(self):
        assert classical_success(0.5, 1) == pytest.approx(0.5)

    def test_zero_draws(self):
        assert classical_success(0.3, 0) == 0.0

    def test_small_p_many_draws(self):
        assert classical_success(0.001, 1000) == pytest.approx(0.63230, abs=1e-5)


class TestAASuccess:
    def test_certain(self):
        assert aa_success(1.0, 4) == pytest.approx(1.0)

    def test_impossible(self):
        assert aa_success(0.0, 64) == 0.0

    def test_round_failure_matches_direct_sum(self):
        from cbqs.amplify import _round_failure

        theta = math.asin(math.sqrt(0.037))
        for k in range(8):
            direct = np.mean(
                [math.cos((2 * j + 1) * theta) ** 2 for j in range(2**k)]
            )
            assert _round_failure(theta, k) == pytest.approx(direct, abs=1e-12)

    def test_monotone_in_p_up_to_rotation_ripple(self):
        # strict monotonicity is false for the protocol itself: specific (p, T)
        # pairs over-rotate and lose ~1e-3 of success mass; the trend holds
        grid = np.linspace(0.001, 0.9, 40)
        for T in (4, 32, 256):
            vals = [aa_success(p, T) for p in grid]
            assert all(b >= a - 0.01 for a, b in zip(vals, vals[1:]))
            assert vals[-1] > vals[0]

    def test_matches_monte_carlo_spot(self):
        rng = np.random.default_rng(0)
        for p, T in ((0.01, 64), (0.1, 8)):
            hits = sum(simulate_qsearch(p, T, rng).found for _ in range(20000))
            assert abs(aa_success(p, T) - hits / 20000) < 0.02


class TestSimulateQSearch:
    def test_certain_first_round(self):
        res = simulate_qsearch(1.0, 8, np.random.default_rng(0))
        assert res.found and res.grover_iterations == 0 and res.measurements == 1

    def test_impossible_never_found(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            res = simulate_qsearch(0.0, 16, rng)
            assert not res.found

    def test_expected_iterations_scale(self):
        # total iterations over runs stay within a small factor of T
        rng = np.random.default_rng(2)
        T = 256
        totals = [simulate_qsearch(0.0, T, rng).grover_iterations for _ in range(3000)]
        assert 0.1 * T < np.mean(totals) < 2.0 * T

    def test_params_validation(self):
        with pytest.raises(ValueError):
            AAParams(1.2, 4)
        with pytest.raises(ValueError):
            AAParams(0.5, 0.5)


class TestExpectedCosts:
    def test_until_success_matches_simulation(self):
        rng = np.random.default_rng(3)
        for p, T in ((0.05, 8), (0.01, 16)):
            iters = []
            for _ in range(4000):
                total = 0
                while True:
                    r = simulate_qsearch(p, T, rng)
                    total += r.grover_iterations
                    if r.found:
                        break
                iters.append(total)
            expect, _ = qsearch_expected_costs(p, T)
            assert np.mean(iters) == pytest.approx(expect, rel=0.1)

    def test_invocation_success_equals_formula(self):
        for p, T in ((0.01, 10), (0.2, 4), (0.001, 64)):
            _, _, success = qsearch_invocation_costs(p, T)
            assert success == pytest.approx(aa_success(p, T), abs=1e-12)

    def test_certain_case(self):
        iters, meas = qsearch_expected_costs(1.0, 2)
        assert iters == 0.0 and meas == 1.0


class TestExactGoodProbability:
    def setup_method(self):
        self.cons = list(mfkp_constraints(INST3))
        self.bias = BiasSpec.for_instance(INST3, (0, 1, 1))

    def test_threshold_below_everything(self):
        table = distribution(self.cons, self.bias)
        feasible_mass = sum(
            table[i]
            for i in range(8)
            if INST3.is_feasible([(i >> k) & 1 for k in range(3)])
        )
        assert exact_good_probability(self.cons, self.bias, INST3.profits, 0) == (
            pytest.approx(feasible_mass)
        )

    def test_threshold_just_below_optimum(self):
        expected = path_probability(self.cons, self.bias, (0, 1, 1))
        assert exact_good_probability(self.cons, self.bias, INST3.profits, 21) == (
            pytest.approx(expected)
        )

    def test_threshold_at_optimum_certifies(self):
        assert exact_good_probability(self.cons, self.bias, INST3.profits, 22) == 0.0

    def test_size_cap(self):
        inst = generate_instance(26, 0)
        cons = list(mfkp_constraints(inst))
        with pytest.raises(ExactLimitExceeded):
            exact_good_probability(cons, BiasSpec.uniform(26), inst.profits, 0)


class TestGreedyIncumbent:
    def test_small_instance(self):
        bits = greedy_incumbent(MfkpInstance((10, 1), (3, 2), 5, 2))
        assert bits is not None
        inst = MfkpInstance((10, 1), (3, 2), 5, 2)
        assert inst.is_feasible(bits)

    def test_returns_none_when_band_unreachable(self):
        assert greedy_incumbent(MfkpInstance((1,), (10,), 5, 2)) is None


class TestCbqsRun:
    def test_reaches_optimum_small(self):
        bias = BiasSpec.for_instance(INST3, (0, 0, 0))
        for mode in ("sampling", "exact"):
            traj = cbqs_run(
                INST3,
                bias,
                BudgetSpec(max_oracle_calls=10_000),
                CostParams(),
                np.random.default_rng(0),
                mode=mode,
                known_optimum=22,
            )
            assert traj.final_value == 22
            traj.validate()

    def test_zero_wall_budget_initial_only(self):
        bias = BiasSpec.for_instance(INST3, (0, 0, 0))
        traj = cbqs_run(
            INST3,
            bias,
            BudgetSpec(max_wall_seconds=0.0, max_oracle_calls=10**6),
            CostParams(),
            np.random.default_rng(0),
        )
        assert len(traj) == 1

    def test_zero_oracle_budget_initial_only(self):
        bias = BiasSpec.for_instance(INST3, (0, 0, 0))
        traj = cbqs_run(
            INST3, bias, BudgetSpec(max_oracle_calls=0), CostParams(),
            np.random.default_rng(0),
        )
        assert len(traj) == 1
        assert traj.final_value == 22  # start already lands on the optimum here

    def test_no_feasible_start(self):
        inst = MfkpInstance((1,), (10,), 5, 2)  # band [3, 5] unreachable
        bias = BiasSpec.uniform(1)
        with pytest.raises(NoFeasibleStart):
            cbqs_run(
                inst,
                bias,
                BudgetSpec(max_oracle_calls=100),
                CostParams(),
                np.random.default_rng(0),
                start_draw_limit=200,
            )

    def test_modes_agree_on_final_value(self):
        inst = generate_instance(12, 21, GeneratorParams(weight_range=100, gap_fraction=0.05))
        opt = brute_force(inst).optimum
        bias = BiasSpec.for_instance(inst, (0,) * 12)
        for mode in ("sampling", "exact"):
            traj = cbqs_run(
                inst,
                bias,
                BudgetSpec(max_oracle_calls=200_000),
                CostParams(),
                np.random.default_rng(5),
                mode=mode,
                known_optimum=opt,
            )
            assert traj.final_value == opt

    def test_oracle_budget_respected(self):
        inst = generate_instance(12, 21, GeneratorParams(weight_range=100, gap_fraction=0.05))
        bias = BiasSpec.for_instance(inst, (0,) * 12)
        cap = 50
        traj = cbqs_run(
            inst, bias, BudgetSpec(max_oracle_calls=cap), CostParams(),
            np.random.default_rng(1),
        )
        assert traj.points[-1].oracle_calls <= cap


class TestSingleVsBoth:
    def test_trivial_gap_rates_close(self):
        inst = MfkpInstance((3, 4, 5, 6), (2, 3, 4, 5), 14, 14)
        res = single_vs_both_constraints(
            inst, BiasSpec.uniform(4), np.random.default_rng(0), samples=30_000
        )
        assert abs(res.p_feasible_single - res.p_feasible_both) < 0.02

    def test_both_wins_on_generated_instance(self):
        inst = generate_instance(40, 17, GeneratorParams(gap_fraction=0.02))
        res = single_vs_both_constraints(
            inst, BiasSpec.uniform(40), np.random.default_rng(0), samples=20_000
        )
        assert res.p_feasible_both > res.p_feasible_single

    def test_curve_shape(self):
        inst = generate_instance(30, 3, GeneratorParams(gap_fraction=0.05))
        res = single_vs_both_constraints(
            inst, BiasSpec.uniform(30), np.random.default_rng(2), samples=5_000
        )
        for T, single, both in res.curve:
            assert 0.0 <= single <= 1.0 and 0.0 <= both <= 1.0
        oracle_counts = [row[0] for row in res.curve]
        assert oracle_counts == sorted(oracle_counts)
