import itertools

import numpy as np
import pytest

from cbqs.baselines import (
    NoFeasibleSolution,
    SAConfig,
    brute_force,
    build_gw_qform,
    certified_upper_bound,
    gw_round,
    recommended_rank,
    simulated_annealing,
    slack_binarize,
    solve_sdp_lowrank,
)
from cbqs.instance import GeneratorParams, MfkpInstance, generate_instance

INST3 = MfkpInstance((6, 10, 12), (1, 2, 3), 5, 1)


def embed_pm1(inst, form, bits):
    """±1 assignment (with matching slack) for a feasible item selection."""
    y = inst.capacity - inst.weight_of(bits)
    assert 0 <= y <= inst.gap
    return np.array(
        [1]
        + [2 * b - 1 for b in bits]
        + [2 * ((y >> j) & 1) - 1 for j in range(form.slack_bits)],
        dtype=float,
    )


class TestBruteForce:
    def test_small_instance(self):
        res = brute_force(INST3)
        assert res.optimum == 22
        assert res.argmax == (0, 1, 1)
        assert res.feasible_count == 2

    def test_full_gap_reduces_to_plain_knapsack(self):
        inst = MfkpInstance((7, 2, 9, 5), (3, 1, 4, 2), 6, 6)
        res = brute_force(inst)
        best = max(
            sum(p * b for p, b in zip(inst.profits, bits))
            for bits in itertools.product((0, 1), repeat=4)
            if sum(w * b for w, b in zip(inst.weights, bits)) <= 6
        )
        assert res.optimum == best

    def test_empty_feasible_set(self):
        with pytest.raises(NoFeasibleSolution):
            brute_force(MfkpInstance((1,), (10,), 5, 2))

    def test_size_cap(self):
        with pytest.raises(ValueError):
            brute_force(generate_instance(29, 0))


class TestSimulatedAnnealing:
    def test_finds_small_optimum(self):
        traj = simulated_annealing(INST3, SAConfig(iters=20_000, seed=3))
        assert traj.final_value == 22

    def test_zero_iterations(self):
        traj = simulated_annealing(INST3, SAConfig(iters=0, seed=0))
        assert len(traj) == 0  # all-zeros start is outside the band

    def test_zero_iterations_feasible_start(self):
        inst = MfkpInstance((5,), (3,), 4, 4)
        traj = simulated_annealing(inst, SAConfig(iters=0, seed=0))
        assert len(traj) == 1 and traj.final_value == 0

    def test_deterministic_per_seed(self):
        a = simulated_annealing(INST3, SAConfig(iters=5000, seed=11))
        b = simulated_annealing(INST3, SAConfig(iters=5000, seed=11))
        assert [(p.incumbent_value, p.oracle_calls) for p in a] == [
            (p.incumbent_value, p.oracle_calls) for p in b
        ]

    def test_trajectory_invariants(self):
        traj = simulated_annealing(INST3, SAConfig(iters=10_000, seed=2))
        traj.validate()


class TestSlackBinarize:
    def test_zero_gap(self):
        enc = slack_binarize(MfkpInstance((1,), (2,), 2, 0))
        assert enc.num_bits == 0 and enc.coefficients == ()

    def test_gap_three(self):
        enc = slack_binarize(MfkpInstance((1,), (4,), 4, 3))
        assert enc.num_bits == 2 and enc.coefficients == (1, 2)

    def test_gap_four_overshoots(self):
        enc = slack_binarize(MfkpInstance((1,), (5,), 5, 4))
        assert enc.num_bits == 3
        assert sum(enc.coefficients) == 7  # values above the gap exist, dropped later


class TestQuadraticForm:
    def test_shape_and_symmetry(self):
        form = build_gw_qform(INST3)
        assert form.size == 1 + 3 + form.slack_bits
        assert np.allclose(form.matrix, form.matrix.T)

    def test_feasible_points_recover_profit(self):
        form = build_gw_qform(INST3)
        for bits in itertools.product((0, 1), repeat=3):
            if not INST3.is_feasible(bits):
                continue
            z = embed_pm1(INST3, form, bits)
            assert form.evaluate(z) == pytest.approx(INST3.profit_of(bits))
            assert form.decode(z) == bits

    def test_global_sign_irrelevant(self):
        form = build_gw_qform(INST3)
        z = embed_pm1(INST3, form, (0, 1, 1))
        assert form.evaluate(-z) == pytest.approx(form.evaluate(z))
        assert form.decode(-z) == (0, 1, 1)

    def test_pm1_argmax_matches_brute_force_exact_slack(self):
        # with gap = 2**s - 1 the slack encoding is exact (no overshoot), so
        # maximizing the form over ±1 assignments solves the original problem
        insts = [
            MfkpInstance((6, 10, 12), (1, 2, 3), 5, 1),
            MfkpInstance((5, 9, 4, 7), (4, 3, 5, 2), 9, 3),
            MfkpInstance((8, 3, 11, 6, 2), (5, 2, 7, 4, 1), 12, 7),
        ]
        for inst in insts:
            bf = brute_force(inst)
            form = build_gw_qform(inst)
            best = max(
                form.evaluate(np.array((1,) + z, dtype=float))
                for z in itertools.product((-1, 1), repeat=form.size - 1)
            )
            assert best == pytest.approx(bf.optimum)

    def test_pm1_argmax_dominates_optimum_in_general(self):
        # over-range slack can only enlarge the encoded feasible set
        for seed in (2, 7, 12):
            inst = generate_instance(7, seed, GeneratorParams(weight_range=30))
            bf = brute_force(inst)
            form = build_gw_qform(inst)
            best = max(
                form.evaluate(np.array((1,) + z, dtype=float))
                for z in itertools.product((-1, 1), repeat=form.size - 1)
            )
            assert best >= bf.optimum - 1e-9


class TestSdpSolver:
    def test_two_by_two_alignment(self):
        from cbqs.baselines import QuadraticForm

        toy = QuadraticForm(
            matrix=np.array([[0.0, 1.0], [1.0, 0.0]]),
            penalty_weight=1.0,
            constant=0.0,
            n_items=1,
            slack_bits=0,
        )
        factor = solve_sdp_lowrank(toy, rank=2, sweeps=50, seed=0)
        assert factor.objective == pytest.approx(2.0, abs=1e-9)

    def test_rank_validation(self):
        form = build_gw_qform(INST3)
        with pytest.raises(ValueError):
            solve_sdp_lowrank(form, rank=1)

    def test_ascent_never_below_warm_start(self):
        form = build_gw_qform(INST3)
        bf = brute_force(INST3)
        z = embed_pm1(INST3, form, bf.argmax)
        start = float(z @ form.matrix @ z)
        factor = solve_sdp_lowrank(form, rank=recommended_rank(form.size), sweeps=100, seed=0)
        # certified bound dominates any feasible point, including the argmax
        assert factor.upper_bound >= start - 1e-6

    def test_relaxation_dominance_random_instances(self):
        for seed in range(8):
            inst = generate_instance(8, 40 + seed, GeneratorParams(weight_range=60))
            bf = brute_force(inst)
            form = build_gw_qform(inst)
            factor = solve_sdp_lowrank(form, sweeps=150, seed=0)
            assert factor.upper_bound_valid
            assert factor.upper_bound + form.constant >= bf.optimum - 1e-6

    def test_certificate_tight_at_toy_optimum(self):
        from cbqs.baselines import QuadraticForm

        toy = QuadraticForm(
            matrix=np.array([[0.0, 1.0], [1.0, 0.0]]),
            penalty_weight=1.0,
            constant=0.0,
            n_items=1,
            slack_bits=0,
        )
        factor = solve_sdp_lowrank(toy, rank=2, sweeps=100, seed=1)
        assert certified_upper_bound(toy.matrix, factor.vectors) == pytest.approx(
            2.0, abs=1e-6
        )


class TestRounding:
    def test_rank_one_optimum_recovered_every_trial(self):
        form = build_gw_qform(INST3)
        bf = brute_force(INST3)
        z = embed_pm1(INST3, form, bf.argmax)
        from cbqs.baselines import GramFactor

        V = np.zeros((form.size, 2))
        V[:, 0] = z
        factor = GramFactor(
            vectors=V, objective=float(z @ form.matrix @ z), upper_bound=0.0,
            upper_bound_valid=False,
        )
        traj = gw_round(factor, INST3, trials=200, seed=4)
        assert traj.final_value == bf.optimum
        assert traj.points[0].oracle_calls == 1  # first trial already hits

    def test_soundness_and_bound(self):
        for seed in (1, 5):
            inst = generate_instance(8, seed, GeneratorParams(weight_range=40))
            bf = brute_force(inst)
            form = build_gw_qform(inst)
            factor = solve_sdp_lowrank(form, sweeps=100, seed=0)
            traj = gw_round(factor, inst, trials=3000, seed=0)
            for pt in traj:
                assert pt.feasible
                assert pt.incumbent_value <= bf.optimum
