"""
Tests for the experiment workflow, its check tables and the command line
"""

import json
import os

import pandas as pd
import pytest

import lab_cli
from labs.errors import ConfigError
from labs.orchestrator import (
    CHECK_COLUMNS,
    EXIT_CHECK_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    CommandRouter,
    ExperimentWorkflow,
    default_config,
    selftest_plan,
    validate_config,
)
from labs.orchestrator.reporting import check_row, encode_inputs, failure_report_path

SMALL_DISCRETE = {"random_forms": 10, "n_states": 4, "perturbations": 5}

AFFINE_CONFIG = {
    "scale": {"family": "affine_slope", "parameters": {"slope": 0.5}},
    "profile": {"kind": "bump", "p": 0.05, "q": 0.45},
    "grid_n": 16384,
}


def read_table(path):
    return pd.read_csv(path)


class TestRouter:

    def test_every_command_resolves(self):
        router = CommandRouter()
        for command in CommandRouter.commands():
            assert callable(router.route(command)["runner"])

    def test_unknown_command(self):
        with pytest.raises(ConfigError):
            CommandRouter().route("plot")


class TestSchemas:

    @pytest.mark.parametrize("command", ["verify-energy", "exit-stats", "levy", "discrete", "coupling"])
    def test_defaults_are_valid(self, command):
        validate_config(command, default_config(command))

    @pytest.mark.parametrize("quick", [False, True])
    def test_selftest_plan_is_valid(self, quick):
        for command, config in selftest_plan(quick):
            validate_config(command, config)

    def test_unknown_key_is_rejected(self):
        with pytest.raises(ConfigError):
            validate_config("discrete", {**SMALL_DISCRETE, "colour": "red"})

    def test_bad_scale_family(self):
        config = default_config("verify-energy")
        config["scale"] = {"family": "devil_staircase"}
        with pytest.raises(ConfigError):
            validate_config("verify-energy", config)


class TestReporting:

    def test_inputs_are_canonical(self):
        assert encode_inputs({"b": 1, "a": [0.5, 2]}) == '{"a":[0.5,2],"b":1}'

    def test_check_row_layout(self):
        row = check_row("levy", "plancherel", {"n": 8}, 1.0, 1.0, 0.0, 1e-3, True)
        assert list(row) == CHECK_COLUMNS
        assert row["error_bar"] is None
        assert row["exact"] is False

    def test_failure_report_sits_next_to_the_table(self):
        assert failure_report_path("results/levy.csv") == "results/levy.csv.failures.json"


class TestWorkflow:

    @pytest.mark.asyncio
    async def test_discrete_run_passes(self, out_dir):
        output = os.path.join(out_dir, "discrete.csv")
        result = await ExperimentWorkflow().run("discrete", dict(SMALL_DISCRETE), seed=5, output=output)
        assert result.exit_code == EXIT_OK
        table = read_table(output)
        assert list(table.columns) == CHECK_COLUMNS
        assert table["passed"].all()
        assert not os.path.exists(failure_report_path(output))

    @pytest.mark.asyncio
    async def test_unknown_command_is_a_usage_error(self, out_dir):
        result = await ExperimentWorkflow().run("plot", {}, output=os.path.join(out_dir, "plot.csv"))
        assert result.exit_code == EXIT_USAGE
        assert result.rows == []

    @pytest.mark.asyncio
    async def test_schema_violation_writes_a_failure_report(self, out_dir):
        output = os.path.join(out_dir, "bad.csv")
        result = await ExperimentWorkflow().run("discrete", {**SMALL_DISCRETE, "output": output,
                                                             "n_states": 1})
        assert result.exit_code == EXIT_USAGE
        assert result.output is None
        assert not os.path.exists(output)

    @pytest.mark.asyncio
    async def test_unknown_tolerance_key(self, out_dir):
        config = {**SMALL_DISCRETE, "tolerances": {"discrete_relative": 0.1}}
        output = os.path.join(out_dir, "discrete.csv")
        result = await ExperimentWorkflow().run("discrete", config, output=output)
        assert result.exit_code == EXIT_USAGE
        with open(failure_report_path(output), encoding="utf-8") as handle:
            report = json.load(handle)
        assert report["error"]["type"] == "ConfigError"

    @pytest.mark.asyncio
    async def test_sweep_needs_a_schedule(self, out_dir):
        result = await ExperimentWorkflow().run("discrete", dict(SMALL_DISCRETE), sweep=True,
                                                output=os.path.join(out_dir, "discrete.csv"))
        assert result.exit_code == EXIT_USAGE

    @pytest.mark.asyncio
    async def test_affine_scale_fails_the_identity(self, out_dir):
        output = os.path.join(out_dir, "affine.csv")
        result = await ExperimentWorkflow().run("verify-energy", dict(AFFINE_CONFIG), output=output)
        assert result.exit_code == EXIT_CHECK_FAILED
        table = read_table(output)
        ratio = table.loc[table["check"] == "energy_ratio", "estimate"].iloc[0]
        assert ratio == pytest.approx(2.0, abs=1e-6)
        with open(result.failure_report, encoding="utf-8") as handle:
            report = json.load(handle)
        assert report["failed"] == result.failed
        assert {row["check"] for row in report["failures"]} >= {"energy_ratio"}

    @pytest.mark.asyncio
    async def test_documented_counterexample_passes(self, out_dir):
        config = {**AFFINE_CONFIG, "expect_ratio": 2.0}
        result = await ExperimentWorkflow().run("verify-energy", config,
                                                output=os.path.join(out_dir, "affine.csv"))
        assert result.exit_code == EXIT_OK
        assert [row["check"] for row in result.rows] == ["energy_ratio"]

    @pytest.mark.asyncio
    async def test_passing_run_clears_a_stale_report(self, out_dir):
        output = os.path.join(out_dir, "discrete.csv")
        os.makedirs(out_dir, exist_ok=True)
        with open(failure_report_path(output), "w", encoding="utf-8") as handle:
            handle.write("{}\n")
        result = await ExperimentWorkflow().run("discrete", dict(SMALL_DISCRETE), output=output)
        assert result.exit_code == EXIT_OK
        assert not os.path.exists(failure_report_path(output))

    @pytest.mark.asyncio
    async def test_quick_selftest_is_deterministic(self, out_dir):
        config = {"quick": True, "skip": ["exit-stats", "coupling", "levy"]}
        first = os.path.join(out_dir, "first.csv")
        second = os.path.join(out_dir, "second.csv")
        workflow = ExperimentWorkflow()
        assert (await workflow.run("selftest", dict(config), seed=3, output=first)).exit_code == EXIT_OK
        assert (await workflow.run("selftest", dict(config), seed=3, output=second)).exit_code == EXIT_OK
        with open(first, "rb") as a, open(second, "rb") as b:
            assert a.read() == b.read()
        commands = set(read_table(first)["command"])
        assert commands == {"discrete", "verify-energy"}


class TestCommandLine:

    def test_parser_rejects_unknown_command(self):
        with pytest.raises(SystemExit):
            lab_cli.build_parser().parse_args(["plot"])

    def test_missing_config_file(self, tmp_path):
        assert lab_cli.main(["discrete", "--config", str(tmp_path / "absent.json")]) == EXIT_USAGE

    def test_config_that_is_not_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        assert lab_cli.main(["discrete", "--config", str(path)]) == EXIT_USAGE

    def test_discrete_from_a_config_file(self, tmp_path):
        path = tmp_path / "discrete.json"
        path.write_text(json.dumps(SMALL_DISCRETE), encoding="utf-8")
        output = tmp_path / "out" / "discrete.csv"
        code = lab_cli.main(["discrete", "--config", str(path), "--seed", "9", "--out", str(output)])
        assert code == EXIT_OK
        assert list(read_table(output).columns) == CHECK_COLUMNS
