import os

import pytest

from cbqs.bench import (
    ConfigError,
    RunConfig,
    SchemaError,
    TrajectoryRow,
    compare,
    config_from_text,
    config_to_text,
    curves_table,
    execute_run,
    instance_identifier,
    read_curves_csv,
    read_trajectory_csv,
    sweep,
    write_curves_csv,
    write_trajectory_csv,
)
from cbqs.instance import MfkpInstance, write_instance

INST3 = MfkpInstance((6, 10, 12), (1, 2, 3), 5, 1)


@pytest.fixture
def inst3_path(tmp_path):
    path = tmp_path / "inst3.txt"
    write_instance(INST3, path)
    return str(path)


class TestConfig:
    def test_round_trip(self):
        config = RunConfig(algorithm="sa", gen_n=12, seed=9, bias_f=0.25)
        again = config_from_text(config_to_text(config))
        assert again == config

    def test_defaults_round_trip(self):
        assert config_from_text(config_to_text(RunConfig())) == RunConfig()

    def test_requires_exactly_one_source(self):
        with pytest.raises(ConfigError, match="instance source"):
            RunConfig(algorithm="brute").validate()
        with pytest.raises(ConfigError, match="instance source"):
            RunConfig(algorithm="brute", instance_path="x", gen_n=4).validate()

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown key"):
            config_from_text("bogus 3\n")

    def test_bad_algorithm(self):
        with pytest.raises(ConfigError, match="algorithm"):
            RunConfig(algorithm="magic", gen_n=4).validate()

    def test_budget_positive(self):
        with pytest.raises(ConfigError, match="max_oracle_calls"):
            RunConfig(gen_n=4, max_oracle_calls=0).validate()


class TestTrajectoryCsv:
    def test_round_trip(self, tmp_path, inst3_path):
        out = tmp_path / "t.csv"
        config = RunConfig(algorithm="brute", instance_path=inst3_path, output=str(out))
        rows = execute_run(config)
        assert len(rows) == 1 and rows[0].incumbent_value == 22
        again = read_trajectory_csv(out)
        assert again == rows

    def test_rows_reproducible_modulo_wall_clock(self, inst3_path, tmp_path):
        config = RunConfig(
            algorithm="cbqs", instance_path=inst3_path, seed=3, max_oracle_calls=1000
        )
        a = execute_run(config)
        b = execute_run(config)
        strip = lambda rows: [
            (r.instance_id, r.algorithm, r.seed, r.incumbent_value, r.oracle_calls,
             r.cycles, r.modeled_seconds, r.feasible)
            for r in rows
        ]
        assert strip(a) == strip(b)

    def test_header_mismatch(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(SchemaError, match="header"):
            read_trajectory_csv(bad)

    def test_empty_file(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text("")
        with pytest.raises(SchemaError, match="empty"):
            read_trajectory_csv(bad)

    def test_infeasible_row_rejected(self, tmp_path):
        path = tmp_path / "inf.csv"
        rows = [TrajectoryRow("i", "sa", 0, 5, 1, 0, 0.0, 0.0, False)]
        write_trajectory_csv(path, rows)
        with pytest.raises(SchemaError, match="infeasible"):
            read_trajectory_csv(path)

    def test_non_monotone_rejected(self, tmp_path):
        path = tmp_path / "mono.csv"
        rows = [
            TrajectoryRow("i", "sa", 0, 5, 10, 0, 0.0, 0.0, True),
            TrajectoryRow("i", "sa", 0, 4, 12, 0, 0.0, 0.0, True),
        ]
        write_trajectory_csv(path, rows)
        with pytest.raises(SchemaError, match="incumbent_value"):
            read_trajectory_csv(path)

    def test_no_tmp_leftover(self, tmp_path):
        path = tmp_path / "out.csv"
        write_trajectory_csv(path, [])
        assert not os.path.exists(str(path) + ".tmp")


class TestInstanceIdentifier:
    def test_stable(self):
        assert instance_identifier(INST3) == instance_identifier(INST3)

    def test_distinguishes(self):
        other = MfkpInstance((6, 10, 12), (1, 2, 3), 5, 2)
        assert instance_identifier(INST3) != instance_identifier(other)


class TestRunDispatch:
    def test_all_algorithms_produce_valid_rows(self, inst3_path):
        for algorithm in ("brute", "sa", "gw", "cbqs"):
            config = RunConfig(
                algorithm=algorithm,
                instance_path=inst3_path,
                seed=1,
                sa_iters=5000,
                gw_trials=500,
                gw_sweeps=30,
                max_oracle_calls=2000,
            )
            rows = execute_run(config)
            assert rows, algorithm
            values = [r.incumbent_value for r in rows]
            assert values == sorted(values)
            assert rows[-1].incumbent_value <= 22

    def test_ordering_applied(self, inst3_path):
        config = RunConfig(
            algorithm="brute", instance_path=inst3_path, ordering="ratio_asc"
        )
        rows = execute_run(config)
        assert rows[-1].incumbent_value == 22  # objective invariant under reorder

    def test_exact_mode(self, inst3_path):
        config = RunConfig(
            algorithm="cbqs", instance_path=inst3_path, mode="exact",
            max_oracle_calls=5000, seed=2,
        )
        rows = execute_run(config)
        assert rows[-1].incumbent_value == 22


class TestSweep:
    def test_tiny_sweep(self, inst3_path, tmp_path):
        base = RunConfig(
            algorithm="cbqs", instance_path=inst3_path, max_oracle_calls=500, seed=0
        )
        out_dir = tmp_path / "sweep"
        summary = sweep(base, f_values=[0.0, 0.5], depths=[0, 1], orderings=["none"],
                        out_dir=str(out_dir), jobs=1)
        assert os.path.exists(summary)
        cells = [p for p in os.listdir(out_dir) if p != "summary.csv"]
        assert len(cells) == 4
        with open(summary) as fh:
            lines = fh.read().strip().splitlines()
        assert len(lines) == 5  # header + 4 cells
        for cell in cells:
            read_trajectory_csv(os.path.join(out_dir, cell))


class TestCurves:
    def test_table_and_csv(self, tmp_path):
        rows = curves_table([0.01], [2.0, 8.0, 64.0], mc_trials=4000, seed=1)
        path = tmp_path / "curves.csv"
        write_curves_csv(path, rows)
        again = read_curves_csv(path)
        assert len(again) == 3
        for p, T, classical, aa, mc in again:
            assert 0 <= classical <= 1 and 0 <= aa <= 1
            assert abs(aa - mc) < 0.05
        classicals = [r[2] for r in again]
        assert classicals == sorted(classicals)

    def test_curves_schema_guard(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("p,T,nope\n1,2,3\n")
        with pytest.raises(SchemaError):
            read_curves_csv(path)


class TestCompare:
    def test_merge_keeps_instance_ids(self, tmp_path, inst3_path):
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        execute_run(RunConfig(algorithm="brute", instance_path=inst3_path, output=str(out_a)))
        execute_run(
            RunConfig(algorithm="sa", instance_path=inst3_path, seed=4, sa_iters=5000,
                      output=str(out_b))
        )
        merged_path = tmp_path / "merged.csv"
        merged = compare([str(out_a), str(out_b)], str(merged_path))
        assert len(merged) >= 2
        algorithms = {r.algorithm for r in merged}
        assert algorithms == {"brute", "sa"}
        again = read_trajectory_csv(merged_path)
        assert again == merged
