"""Experiment-description grammar, validation, and command-line driver.

The grammar tests pin the exact diagnostics (message text, source label,
line number) so a broken run file always points at the offending line.
The driver tests call ``main`` in-process and assert on the exit-code
contract -- 0 all checks pass, 1 configuration problem, 2 numerical
failure or failed check -- and on the artifact files it writes.
"""

from __future__ import annotations

import json
import math
import os
import warnings

import numpy as np
import pytest

from sqglab.cli import main
from sqglab.config import (
    EXPERIMENT_KINDS,
    Experiment,
    load_config_file,
    load_experiment,
    parse_config_file,
    parse_config_text,
)
from sqglab.critical import DEFAULT_SWEEP_ALPHAS
from sqglab.errors import CflWarning, ConfigError
from sqglab.spectral import Basis


def cfg(*lines: str) -> str:
    """Join config lines so the test can reason about 1-based line numbers."""
    return "\n".join(lines) + "\n"


def parse(text: str):
    return parse_config_text(text, source="<test>")


def load(text: str) -> Experiment:
    return load_experiment(parse(text))


def load_error(text: str, match: str, line: int | None = None) -> ConfigError:
    with pytest.raises(ConfigError) as info:
        load(text)
    assert match in str(info.value)
    if line is not None:
        assert info.value.line == line
    return info.value


SIMULATE_LINES = (
    "[experiment]",  # 1
    "kind = simulate",  # 2
    "[domain]",  # 3
    "n = 16",  # 4
    "[params]",  # 5
    "kappa = 0.5",  # 6
    "alpha = 0.75",  # 7
    "[stepper]",  # 8
    "dt = 0.01",  # 9
    "t_end = 0.05",  # 10
    "[init]",  # 11
    "type = random",  # 12
    "amplitude = 0.1",  # 13
)
SIMULATE = cfg(*SIMULATE_LINES)


def simulate_with(key: str, replacement: str) -> str:
    """The base simulate config with one ``key = value`` line swapped out."""
    lines = [
        replacement if line.startswith(f"{key} ") else line
        for line in SIMULATE_LINES
    ]
    return cfg(*lines)


class TestGrammar:
    def test_values_parse_into_python_types(self):
        parsed = parse(
            cfg(
                "# leading comment",
                "[init]",
                'type = "random"',
                "seed = 3",
                "decay = 2.5",
                "",
                "; other comment style",
                "[monitors]",
                "lq = [2, 4, inf]",
                "damped_energy = false",
                "sobolev = []",
            )
        )
        assert parsed.entry("init", "type").value == "random"
        assert parsed.entry("init", "seed").value == 3
        assert parsed.entry("init", "decay").value == 2.5
        assert parsed.entry("monitors", "lq").value == (2, 4, math.inf)
        assert parsed.entry("monitors", "damped_energy").value is False
        assert parsed.entry("monitors", "sobolev").value == ()

    def test_entries_carry_their_line_numbers(self):
        parsed = parse(cfg("[init]", "type = random", "", "seed = 7"))
        assert parsed.section_line("init") == 1
        assert parsed.entry("init", "type").line == 2
        assert parsed.entry("init", "seed").line == 4

    def test_error_string_cites_source_and_line(self):
        err = ConfigError("boom", source="run.cfg", line=7)
        assert str(err) == "config error (run.cfg, line 7): boom"
        assert err.source == "run.cfg"
        assert err.line == 7

    def test_unknown_section(self):
        with pytest.raises(ConfigError) as info:
            parse(cfg("[experiment]", "kind = simulate", "[warp]"))
        assert "unknown section [warp]" in str(info.value)
        assert info.value.line == 3
        assert info.value.source == "<test>"

    def test_duplicate_section_cites_first_occurrence(self):
        with pytest.raises(ConfigError) as info:
            parse(cfg("[init]", "type = random", "[init]"))
        assert "duplicate section [init] (first at line 1)" in str(info.value)
        assert info.value.line == 3

    def test_line_without_equals(self):
        with pytest.raises(ConfigError) as info:
            parse(cfg("[init]", "just some words"))
        assert "expected 'key = value' or '[section]'" in str(info.value)
        assert info.value.line == 2

    def test_invalid_key_name(self):
        with pytest.raises(ConfigError, match="invalid key '9lives'"):
            parse(cfg("[init]", "9lives = 1"))

    def test_key_before_any_section(self):
        with pytest.raises(ConfigError) as info:
            parse(cfg("type = random"))
        assert "key 'type' appears before any [section] header" in str(info.value)
        assert info.value.line == 1

    def test_unknown_key_lists_known_keys(self):
        with pytest.raises(ConfigError) as info:
            parse(cfg("[domain]", "sidelength = 3"))
        message = str(info.value)
        assert "unknown key 'sidelength' in section [domain]" in message
        assert "'box'" in message and "'n'" in message and "'basis'" in message

    def test_duplicate_key_cites_first_occurrence(self):
        with pytest.raises(ConfigError) as info:
            parse(cfg("[domain]", "n = 16", "n = 32"))
        assert "duplicate key 'n' in section [domain] (first at line 2)" in str(
            info.value
        )
        assert info.value.line == 3

    def test_empty_value(self):
        with pytest.raises(ConfigError, match="empty value"):
            parse(cfg("[domain]", "n ="))

    def test_unterminated_array(self):
        with pytest.raises(ConfigError, match="unterminated array"):
            parse(cfg("[monitors]", "lq = [2, 4"))

    def test_empty_array_element(self):
        with pytest.raises(ConfigError, match="empty element in array"):
            parse(cfg("[monitors]", "lq = [2, , 4]"))

    def test_unparseable_value(self):
        with pytest.raises(ConfigError, match="cannot parse value '2,5'"):
            parse(cfg("[domain]", "box = 2,5"))

    def test_parse_config_file_uses_path_as_source(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text(cfg("[domain]", "n = 16", "n = 32"), encoding="utf-8")
        with pytest.raises(ConfigError) as info:
            parse_config_file(path)
        assert info.value.source == str(path)
        assert info.value.line == 3


class TestTypedGetters:
    def test_missing_key_cites_section_header_line(self):
        text = cfg(*(line for line in SIMULATE_LINES if not line.startswith("t_end")))
        err = load_error(text, "missing required key 't_end' in section [stepper]")
        assert err.line == 8  # the [stepper] header

    def test_missing_section_cites_end_of_file(self):
        text = cfg(
            "[experiment]",
            "kind = simulate",
            "[domain]",
            "n = 16",
        )
        err = load_error(text, "missing required key 'kappa' in section [params]")
        assert err.line == 4  # EOF: the section is absent entirely

    def test_number_expected(self):
        load_error(simulate_with("kappa", "kappa = true"), "kappa must be a number")

    def test_number_must_be_finite(self):
        load_error(simulate_with("kappa", "kappa = nan"), "kappa must be finite")

    def test_integer_expected(self):
        load_error(simulate_with("n", "n = 16.5"), "n must be an integer", line=4)

    def test_string_expected(self):
        load_error(simulate_with("kind", "kind = true"), "kind must be a string")

    def test_choice_rejected(self):
        text = cfg(*SIMULATE_LINES[:10], "scheme = rk4", *SIMULATE_LINES[10:])
        err = load_error(text, "scheme must be one of ['etd1', 'etd2rk'], got 'rk4'")
        assert err.line == 11

    def test_bool_expected(self):
        text = cfg(*SIMULATE_LINES, "[monitors]", "damped_energy = 1")
        load_error(text, "damped_energy must be true or false")

    def test_array_expected(self):
        text = cfg(*SIMULATE_LINES, "[monitors]", "lq = 2")
        load_error(text, "lq must be an array like [1, 2, 3]")

    def test_integer_array_expected(self):
        text = cfg(
            *SIMULATE_LINES, "[forcing]", "type = cosine", "mode = [1, 2.5]"
        )
        load_error(text, "mode must be an array of integers")


class TestLoadExperiment:
    def test_minimal_simulate_defaults(self):
        exp = load(SIMULATE)
        assert exp.kind == "simulate"
        assert exp.domain.n == 16
        assert exp.domain.box == pytest.approx(2 * math.pi)
        assert exp.domain.basis is Basis.TORUS
        assert exp.params.alpha == 0.75
        assert exp.lam == 0.0
        assert exp.forcing is None
        assert exp.dt == 0.01
        assert exp.t_end == 0.05
        assert exp.scheme.value == "etd2rk"
        assert exp.sample_every == 1
        assert exp.init_kind == "random"
        assert exp.init_seed == 0
        assert exp.monitor_lq == ()
        assert exp.monitor_tail_cutoff is None
        assert exp.out_dir is None

    def test_missing_kind_cites_end_of_file(self):
        err = load_error(
            cfg("[domain]", "n = 16"),
            "missing required key 'kind' in section [experiment]",
        )
        assert err.line == 2

    def test_unknown_kind(self):
        text = simulate_with("kind", "kind = warp")
        err = load_error(text, "kind must be one of")
        assert err.line == 2
        for kind in EXPERIMENT_KINDS:
            assert f"'{kind}'" in str(err)

    def test_section_not_used_by_kind(self):
        text = cfg(
            "[experiment]",
            "kind = operator-tests",
            "[domain]",
            "n = 16",
        )
        err = load_error(
            text, "section [domain] is not used by experiment kind 'operator-tests'"
        )
        assert err.line == 3

    def test_bad_grid_size_cites_the_n_line(self):
        err = load_error(
            simulate_with("n", "n = 100"), "n must be a power of two >= 16, got 100"
        )
        assert err.line == 4

    def test_critical_alpha_rejected_for_time_evolution(self):
        err = load_error(
            simulate_with("alpha", "alpha = 0.5"), "alpha must exceed 1/2"
        )
        assert err.line == 7

    def test_alpha_forbidden_in_sweep_kinds(self):
        text = cfg(
            "[experiment]",
            "kind = sweep-alpha",
            "[domain]",
            "n = 16",
            "[params]",
            "kappa = 0.2",
            "alpha = 0.75",
            "[stepper]",
            "t_end = 0.1",
            "[init]",
            "type = random",
        )
        err = load_error(
            text, "alpha is fixed per sweep member; set [sweep] alphas instead"
        )
        assert err.line == 7

    def test_alpha_required_for_fixed_kinds(self):
        text = cfg(*(line for line in SIMULATE_LINES if not line.startswith("alpha")))
        err = load_error(
            text, "missing required key 'alpha' in section [params] for kind 'simulate'"
        )
        assert err.line == 5  # the [params] header

    def test_stepper_validation(self):
        load_error(simulate_with("t_end", "t_end = 0"), "t_end must be positive")
        load_error(simulate_with("dt", "dt = 0.2"), "dt must lie in (0, t_end]")
        load_error(
            cfg(*SIMULATE_LINES[:10], "sample_every = 0", *SIMULATE_LINES[10:]),
            "sample_every must be a positive integer",
        )

    def test_forcing_basis_must_match_type(self):
        torus_sine = cfg(*SIMULATE_LINES, "[forcing]", "type = sine")
        load_error(torus_sine, "sine forcing requires the dirichlet basis")
        dirichlet = cfg(
            "[experiment]",
            "kind = simulate",
            "[domain]",
            "n = 16",
            "basis = dirichlet",
            "[params]",
            "kappa = 0.5",
            "alpha = 0.75",
            "[stepper]",
            "t_end = 0.05",
            "[init]",
            "type = random",
            "[forcing]",
            "type = cosine",
        )
        load_error(dirichlet, "cosine forcing requires the torus basis")

    def test_forcing_mode_needs_two_components(self):
        text = cfg(
            *SIMULATE_LINES, "[forcing]", "type = cosine", "mode = [1, 0, 0]"
        )
        load_error(text, "forcing mode must have two components")

    def test_forcing_built_when_requested(self):
        text = cfg(
            *SIMULATE_LINES,
            "[forcing]",
            "type = cosine",
            "mode = [1, 0]",
            "amplitude = 0.25",
        )
        exp = load(text)
        assert exp.forcing is not None
        assert exp.forcing.domain == exp.domain

    def test_init_validation(self):
        load_error(
            cfg(*SIMULATE_LINES[:11], "type = shear", "mode = 0"),
            "mode must lie in [1, n/2)",
        )
        load_error(
            cfg(*SIMULATE_LINES[:11], "type = bump"),
            "bump initial data requires a width",
        )
        load_error(
            cfg(*SIMULATE_LINES[:11], "type = bump", "width = 100"),
            "width must lie in (0, box/4]",
        )
        load_error(
            cfg(*SIMULATE_LINES, "decay = 1"),
            "decay must exceed 1 for a smooth field",
        )
        load_error(
            simulate_with("amplitude", "amplitude = 0"),
            "amplitude must be positive",
        )

    def test_shear_requires_torus_basis(self):
        text = cfg(
            "[experiment]",
            "kind = simulate",
            "[domain]",
            "n = 16",
            "basis = dirichlet",
            "[params]",
            "kappa = 0.5",
            "alpha = 0.75",
            "[stepper]",
            "t_end = 0.05",
            "[init]",
            "type = shear",
        )
        load_error(text, "shear initial data requires the torus basis")

    def test_monitor_validation(self):
        load_error(
            cfg(*SIMULATE_LINES, "[monitors]", "lq = [1.5]"),
            "lq orders must be >= 2",
        )
        load_error(
            cfg(*SIMULATE_LINES, "[monitors]", "sobolev = [0]"),
            "sobolev orders must be positive",
        )
        load_error(
            cfg(*SIMULATE_LINES, "[monitors]", "damped_energy = true"),
            "damped_energy monitoring requires lambda > 0",
        )
        load_error(
            cfg(*SIMULATE_LINES, "[monitors]", "tail_cutoff = 10"),
            "tail_cutoff must satisfy 0 < 4*cutoff <= box",
        )

    def test_monitor_lq_accepts_infinity(self):
        exp = load(cfg(*SIMULATE_LINES, "[monitors]", "lq = [2, inf]"))
        assert exp.monitor_lq == (2.0, math.inf)

    def _sweep_text(self, *extra: str) -> str:
        return cfg(
            "[experiment]",
            "kind = sweep-alpha",
            "[domain]",
            "n = 16",
            "[params]",
            "kappa = 0.2",
            "[stepper]",
            "t_end = 0.1",
            "[init]",
            "type = random",
            "amplitude = 0.05",
            "[sweep]",
            *extra,
        )

    def test_sweep_validation(self):
        load_error(
            self._sweep_text("alphas = [0.6, 0.75]"),
            "alphas must be strictly decreasing",
        )
        load_error(
            self._sweep_text("alphas = [0.75, 0.502]"),
            "the final alpha must stay at or above 0.505",
        )
        load_error(
            self._sweep_text("alphas = [0.75, 0.3]"),
            "sweep alphas must lie in (1/2, 1]",
        )
        load_error(
            self._sweep_text("alphas = []"),
            "alphas must contain at least one dissipation order",
        )
        load_error(
            self._sweep_text("epsilon = 0.6"), "epsilon must lie in (0, 1/2)"
        )
        load_error(self._sweep_text("c3 = 0"), "c3 must be positive")

    def test_sweep_defaults(self):
        exp = load(self._sweep_text())
        assert exp.sweep_alphas == DEFAULT_SWEEP_ALPHAS
        assert exp.sweep_epsilon == 0.25
        assert exp.sweep_c3 is None
        assert exp.params is None
        assert exp.kappa == 0.2

    def test_dirichlet_sweep_basis(self):
        base = (
            "[experiment]",
            "kind = dirichlet-sweep",
            "[domain]",
            "n = 16",
            "[params]",
            "kappa = 0.2",
            "[stepper]",
            "t_end = 0.1",
            "[init]",
            "type = random",
        )
        exp = load(cfg(*base))
        assert exp.domain.basis is Basis.DIRICHLET
        bad = cfg(*base[:4], "basis = torus", *base[4:])
        load_error(bad, "dirichlet-sweep requires basis = dirichlet", line=5)

    def test_operator_tests_defaults_and_validation(self):
        exp = load(cfg("[experiment]", "kind = operator-tests"))
        assert (exp.operator_size, exp.operator_seed) == (16, 0)
        assert (exp.operator_trials, exp.operator_laplacian_n) == (200, 32)
        assert exp.domain is None and exp.params is None
        err = load_error(
            cfg("[experiment]", "kind = operator-tests", "[operator]", "size = 1"),
            "size must be at least 2, got 1",
        )
        assert err.line == 4


class TestExperimentMethods:
    def test_initial_field_is_deterministic_and_seed_overridable(self):
        exp = load(SIMULATE)
        first = exp.initial_field()
        again = exp.initial_field()
        assert np.array_equal(first.coeffs, again.coeffs)
        other = exp.initial_field(99)
        assert not np.array_equal(first.coeffs, other.coeffs)

    def test_initial_field_unavailable_for_operator_kind(self):
        exp = load(cfg("[experiment]", "kind = operator-tests"))
        with pytest.raises(ValueError, match="has no initial field"):
            exp.initial_field()

    def test_stepper_dt_defaults_from_advective_scale_and_caps_at_t_end(self):
        explicit = load(SIMULATE)
        assert explicit.stepper_for(explicit.initial_field()).dt == 0.01
        text = cfg(*(line for line in SIMULATE_LINES if not line.startswith("dt")))
        derived = load(text)
        stepper = derived.stepper_for(derived.initial_field())
        assert 0 < stepper.dt <= derived.t_end

    def test_sweep_config_only_for_sweep_kinds(self):
        exp = load(SIMULATE)
        with pytest.raises(ValueError, match="is not a sweep"):
            exp.sweep_config(exp.initial_field())

    def test_load_config_file_round_trip(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(SIMULATE, encoding="utf-8")
        exp = load_config_file(path)
        assert exp.kind == "simulate"
        assert exp.domain.n == 16


SIM_CLI = cfg(
    "[experiment]",
    "kind = simulate",
    "[domain]",
    "n = 16",
    "[params]",
    "kappa = 0.5",
    "alpha = 0.75",
    "[stepper]",
    "dt = 0.01",
    "t_end = 0.05",
    "[init]",
    "type = random",
    "amplitude = 0.1",
    "[monitors]",
    "lq = [2, 4]",
    "sobolev = [1]",
)

BLOWUP_CLI = cfg(
    "[experiment]",
    "kind = simulate",
    "[domain]",
    "n = 16",
    "[params]",
    "kappa = 1e-06",
    "alpha = 0.75",
    "[stepper]",
    "dt = 50",
    "t_end = 500",
    "[init]",
    "type = random",
    "seed = 5",
    "amplitude = 50",
)

SWEEP_CLI_LINES = (
    "[experiment]",
    "kind = sweep-alpha",
    "[domain]",
    "n = 16",
    "[params]",
    "kappa = 0.2",
    "[stepper]",
    "dt = 0.05",
    "t_end = 0.2",
    "[init]",
    "type = random",
    "amplitude = 0.05",
    "seed = 3",
    "[sweep]",
    "alphas = [0.75, 0.6]",
)

OPERATOR_CLI = cfg(
    "[experiment]",
    "kind = operator-tests",
    "[operator]",
    "size = 6",
    "seed = 1",
    "trials = 5",
    "laplacian_n = 8",
)

ARTIFACTS = ("series.csv", "summary.json", "checks.json", "run.log")


@pytest.fixture(autouse=True)
def _no_out_dir_env(monkeypatch):
    monkeypatch.delenv("SQGLAB_OUT", raising=False)


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestCliExitCodes:
    def test_simulate_all_checks_pass(self, tmp_path, capsys):
        config = write_config(tmp_path, SIM_CLI)
        out = tmp_path / "out"
        assert main(["simulate", "--config", config, "--out", str(out)]) == 0
        stdout = capsys.readouterr().out
        assert f"simulate: artifacts in {out} (ok)" in stdout
        for name in ARTIFACTS:
            assert (out / name).is_file()

    def test_unreadable_config_file(self, tmp_path, capsys):
        missing = str(tmp_path / "nope.cfg")
        assert main(["simulate", "--config", missing]) == 1
        assert "config error: cannot read" in capsys.readouterr().err

    def test_grammar_error_maps_to_exit_one(self, tmp_path, capsys):
        config = write_config(tmp_path, cfg("[domain]", "n = 16", "n = 32"))
        assert main(["simulate", "--config", config]) == 1
        err = capsys.readouterr().err
        assert f"config error ({config}, line 3)" in err
        assert "duplicate key 'n'" in err

    def test_kind_subcommand_mismatch(self, tmp_path, capsys):
        config = write_config(tmp_path, SIM_CLI)
        assert main(["sweep-alpha", "--config", config]) == 1
        err = capsys.readouterr().err
        assert "describes kind 'simulate'" in err
        assert "asked for 'sweep-alpha'" in err

    def test_bad_flags_map_to_exit_one(self, tmp_path, capsys):
        config = write_config(tmp_path, SIM_CLI)
        assert main(["simulate", "--config", config, "--bogus"]) == 1
        assert "config error (<command line>, line 0)" in capsys.readouterr().err
        assert main(["simulate"]) == 1
        assert "--config" in capsys.readouterr().err
        assert main(["teleport", "--config", config]) == 1
        capsys.readouterr()
        assert main([]) == 1
        capsys.readouterr()

    def test_thread_count_must_be_positive(self, tmp_path, capsys):
        config = write_config(tmp_path, SIM_CLI)
        assert (
            main(["simulate", "--config", config, "--threads", "0"]) == 1
        )
        assert "--threads must be at least 1" in capsys.readouterr().err

    # The diverging state overflows the norm monitors right before the
    # stepper aborts; that numpy warning is part of the failure being tested.
    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_blow_up_maps_to_exit_two(self, tmp_path, capsys):
        config = write_config(tmp_path, BLOWUP_CLI)
        out = tmp_path / "out"
        with pytest.warns(CflWarning):
            rc = main(["simulate", "--config", config, "--out", str(out)])
        assert rc == 2
        assert "numerical failure: blow-up or instability" in capsys.readouterr().err
        log = (out / "run.log").read_text(encoding="utf-8")
        assert "status numerical failure: blow-up" in log
        assert not (out / "checks.json").exists()

    def test_failed_check_maps_to_exit_two(self, tmp_path, capsys):
        config = write_config(tmp_path, cfg(*SWEEP_CLI_LINES, "c3 = 1e-12"))
        out = tmp_path / "out"
        assert main(["sweep-alpha", "--config", config, "--out", str(out)]) == 2
        assert "(1 checks failed)" in capsys.readouterr().out
        checks = json.loads((out / "checks.json").read_text(encoding="utf-8"))
        assert checks["all_passed"] is False
        assert checks["n_failed"] == 1
        failed = [c for c in checks["checks"] if not c["passed"]]
        assert failed[0]["name"].startswith("linear-rate-bound")
        log = (out / "run.log").read_text(encoding="utf-8")
        assert "status 1 checks failed" in log

    def test_strict_escalates_cfl_warning_to_exit_two(self, tmp_path, capsys):
        config = write_config(tmp_path, BLOWUP_CLI)
        out = tmp_path / "out"
        saved = warnings.filters[:]
        with warnings.catch_warnings(record=True) as recorded:
            warnings.simplefilter("always")
            rc = main(
                ["simulate", "--config", config, "--out", str(out), "--strict"]
            )
        assert rc == 2
        err = capsys.readouterr().err
        assert "numerical failure: advective CFL" in err
        assert "exceeds 0.5 at t=0" in err
        # The escalated warning was raised, not emitted, and the filter
        # change did not leak out of the call.
        assert not any(w.category is CflWarning for w in recorded)
        assert warnings.filters == saved

    def test_strict_leaves_clean_runs_untouched(self, tmp_path, capsys):
        config = write_config(tmp_path, SIM_CLI)
        out = tmp_path / "out"
        rc = main(["simulate", "--config", config, "--out", str(out), "--strict"])
        assert rc == 0
        capsys.readouterr()


class TestCliArtifacts:
    def run_ok(self, tmp_path, capsys, text, command, out="out", extra=()):
        config = write_config(tmp_path, text, name=f"{command}.cfg")
        out_dir = tmp_path / out
        rc = main([command, "--config", config, "--out", str(out_dir), *extra])
        capsys.readouterr()
        assert rc == 0
        return out_dir

    def test_summary_and_checks_shape(self, tmp_path, capsys):
        out = self.run_ok(tmp_path, capsys, SIM_CLI, "simulate")
        summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
        assert summary["kind"] == "simulate"
        assert summary["basis"] == "torus"
        assert summary["n"] == 16
        assert summary["alpha"] == 0.75
        assert summary["seed"] == 0
        assert summary["dt"] == 0.01
        assert summary["final_t"] == pytest.approx(0.05)
        assert summary["n_samples"] == 6  # t=0 plus five steps
        assert summary["n_steps"] == 5
        assert summary["final_l2"] > 0
        assert summary["final_linf"] > 0
        checks = json.loads((out / "checks.json").read_text(encoding="utf-8"))
        assert checks["all_passed"] is True
        assert checks["n_failed"] == 0
        assert checks["n_checks"] == len(checks["checks"]) > 0
        names = {c["name"] for c in checks["checks"]}
        assert {"lq-monotone-q2", "lq-monotone-q4", "linf-envelope"} <= names
        for record in checks["checks"]:
            assert {"name", "t", "lhs", "rhs", "slack", "passed"} <= set(record)

    def test_series_csv_layout(self, tmp_path, capsys):
        out = self.run_ok(tmp_path, capsys, SIM_CLI, "simulate")
        lines = (out / "series.csv").read_text(encoding="utf-8").splitlines()
        meta = [line for line in lines if line.startswith("# ")]
        keys = [line.split(" = ")[0][2:] for line in meta]
        assert keys == sorted(keys)
        header = lines[len(meta)]
        assert header.startswith("t,")
        columns = header.split(",")
        for name in ("cfl", "l2", "linf", "lq2", "lq4", "h1",
                     "slack_lq2", "slack_lq4", "slack_linf"):
            assert name in columns
        assert len(lines) == len(meta) + 1 + 6  # header plus six samples

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        first = self.run_ok(tmp_path, capsys, SIM_CLI, "simulate", out="one")
        second = self.run_ok(tmp_path, capsys, SIM_CLI, "simulate", out="two")
        for name in ("series.csv", "summary.json", "checks.json"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_seed_flag_overrides_config(self, tmp_path, capsys):
        out = self.run_ok(
            tmp_path, capsys, SIM_CLI, "simulate", extra=("--seed", "123")
        )
        summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
        assert summary["seed"] == 123

    def test_out_dir_precedence(self, tmp_path, capsys, monkeypatch):
        cfg_dir = tmp_path / "from-config"
        text = cfg(*SIMULATE_LINES, "[output]", f'dir = "{cfg_dir}"')
        config = write_config(tmp_path, text)

        env_dir = tmp_path / "from-env"
        monkeypatch.setenv("SQGLAB_OUT", str(env_dir))
        flag_dir = tmp_path / "from-flag"
        assert main(["simulate", "--config", config, "--out", str(flag_dir)]) == 0
        assert (flag_dir / "summary.json").is_file()
        assert not env_dir.exists() and not cfg_dir.exists()

        assert main(["simulate", "--config", config]) == 0
        assert (env_dir / "summary.json").is_file()
        assert not cfg_dir.exists()

        monkeypatch.delenv("SQGLAB_OUT")
        assert main(["simulate", "--config", config]) == 0
        assert (cfg_dir / "summary.json").is_file()
        capsys.readouterr()

    def test_default_out_dir(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = write_config(tmp_path, OPERATOR_CLI)
        assert main(["operator-tests", "--config", config]) == 0
        assert (tmp_path / "sqglab-out" / "summary.json").is_file()
        capsys.readouterr()

    def test_run_log_contents(self, tmp_path, capsys):
        out = self.run_ok(tmp_path, capsys, SIM_CLI, "simulate")
        lines = (out / "run.log").read_text(encoding="utf-8").splitlines()
        prefixes = [line.split(" ", 1)[0] for line in lines]
        assert prefixes == [
            "started", "finished", "elapsed_seconds", "numpy", "scipy", "status",
        ]
        assert lines[-1] == "status ok"

    def test_operator_tests_artifacts(self, tmp_path, capsys):
        out = self.run_ok(tmp_path, capsys, OPERATOR_CLI, "operator-tests")
        lines = (out / "series.csv").read_text(encoding="utf-8").splitlines()
        assert lines[-1] == "t"  # header-only series: nothing is time-sampled
        summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
        assert summary["size"] == 6
        assert summary["trials"] == 5
        ladder = summary["lemma_limit_errors"]
        assert len(ladder) == 7
        assert [a for a, _ in ladder] == sorted((a for a, _ in ladder), reverse=True)
        assert all(e >= 0 for _, e in ladder)
        decay = summary["identity_decay"]
        assert len(decay) == 5
        checks = json.loads((out / "checks.json").read_text(encoding="utf-8"))
        assert checks["all_passed"] is True

    def test_sweep_artifacts(self, tmp_path, capsys):
        out = self.run_ok(
            tmp_path, capsys, cfg(*SWEEP_CLI_LINES), "sweep-alpha"
        )
        summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
        assert summary["alphas"] == "0.75,0.6"
        report = summary["report"]
        assert report["alphas"] == [0.75, 0.6]
        assert len(report["times"]) == 5  # t=0 plus four shared steps
        assert report["smallness_coeff"] < 0
        lines = (out / "series.csv").read_text(encoding="utf-8").splitlines()
        header_at = next(
            i for i, line in enumerate(lines) if not line.startswith("# ")
        )
        assert lines[header_at] == "alpha_i,alpha_j,t,h_minus_half"
        assert len(lines) - header_at - 1 == 5  # one pair sampled five times
        checks = json.loads((out / "checks.json").read_text(encoding="utf-8"))
        assert checks["all_passed"] is True
        names = {c["name"] for c in checks["checks"]}
        assert "smallness-coefficient" in names
        assert "interp-upgrade-0.75-0.6" in names
        assert "l43-interpolation" in names

    def test_dirichlet_sweep_runs(self, tmp_path, capsys):
        text = cfg(
            "[experiment]",
            "kind = dirichlet-sweep",
            "[domain]",
            "n = 16",
            "[params]",
            "kappa = 0.2",
            "[stepper]",
            "dt = 0.05",
            "t_end = 0.1",
            "[sweep]",
            "alphas = [0.75, 0.6]",
            "[init]",
            "type = random",
            "amplitude = 0.05",
            "seed = 2",
        )
        out = self.run_ok(tmp_path, capsys, text, "dirichlet-sweep")
        summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
        assert summary["basis"] == "dirichlet"

    def test_estimates_report_runs_full_battery(self, tmp_path, capsys):
        text = cfg(
            *SIMULATE_LINES[:1],
            "kind = estimates-report",
            *SIMULATE_LINES[2:],
            "[monitors]",
            "lq = [2]",
            "sobolev = [1]",
            "tail_cutoff = 1.5",
        )
        out = self.run_ok(tmp_path, capsys, text, "estimates-report")
        checks = json.loads((out / "checks.json").read_text(encoding="utf-8"))
        assert checks["all_passed"] is True
        names = {c["name"] for c in checks["checks"]}
        assert {"cordoba-min-slack", "positivity-q2",
                "sobolev-ineq-l1", "tail-mass-decrease"} <= names
        lines = (out / "series.csv").read_text(encoding="utf-8").splitlines()
        header = next(line for line in lines if not line.startswith("# "))
        assert "tail_mass" in header.split(",")
