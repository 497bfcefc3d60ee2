"""End-to-end tests of the command-line interface and its exit codes."""
import json

import numpy as np
import pytest

from mweights.cli import main, main_entry, parse_eps, parse_exponents, ConfigError


# ------------------------------------------------------------------- parsing
def test_parse_eps_dyadic_range():
    vals = parse_eps("2^-2..2^-5")
    assert vals == (0.25, 0.125, 0.0625, 0.03125)
    # reversed endpoints give the same set
    assert sorted(parse_eps("2^-5..2^-2")) == sorted(vals)


def test_parse_eps_comma_list_and_tokens():
    assert parse_eps("0.25,2^-3") == (0.25, 0.125)
    with pytest.raises(ConfigError):
        parse_eps("1.5")
    with pytest.raises(ConfigError):
        parse_eps("nope")
    with pytest.raises(ConfigError):
        parse_eps("")


def test_parse_exponents_validation():
    et = parse_exponents("2,2")
    assert et.p == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        parse_exponents("1,2")  # endpoint exponent outside (1, inf)
    with pytest.raises(ConfigError):
        parse_exponents("abc")


# ------------------------------------------------------------------- apconst
def test_apconst_reports_json(capsys):
    code = main(
        ["apconst", "--m", "2", "--p", "2,2", "--w", "power:0.75,const", "--L", "6"]
    )
    assert code == 0
    blob = json.loads(capsys.readouterr().out)
    assert set(blob) == {"constant", "argmax", "scanned", "family"}
    assert blob["constant"] > 1.0
    assert blob["scanned"] > 0


def test_apconst_constant_weights_give_unit_constant(capsys):
    code = main(["apconst", "--p", "2,2", "--w", "const,const", "--L", "5"])
    assert code == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob["constant"] == pytest.approx(1.0, rel=1e-12)


def test_apconst_slot_count_mismatch_is_config_error(capsys):
    code = main(["apconst", "--m", "3", "--p", "2,2", "--w", "const,const", "--L", "5"])
    assert code == 2
    assert "disagrees" in capsys.readouterr().err


def test_apconst_weight_spec_count_mismatch(capsys):
    code = main(["apconst", "--p", "2,2", "--w", "const", "--L", "5"])
    assert code == 2


def test_apconst_nonintegrable_power_weight(capsys):
    code = main(["apconst", "--p", "2,2", "--w", "power:-1.5,const", "--L", "5"])
    assert code == 2
    assert "integrable" in capsys.readouterr().err


def test_unknown_flag_prints_usage_and_exits_2(capsys):
    code = main(["apconst", "--p", "2,2", "--w", "const,const", "--bogus", "1"])
    assert code == 2
    assert "usage" in capsys.readouterr().err.lower()


def test_unknown_subcommand_exits_2():
    assert main(["transmogrify"]) == 2


def test_help_exits_zero():
    with pytest.raises(SystemExit):
        main_entry()  # no argv: argparse sees pytest's args and errors out


# ------------------------------------------------------------------- maximal
def test_maximal_subcommand_bracket(tmp_path, capsys):
    out = tmp_path / "mx"
    code = main(
        ["maximal", "--f", "power:-0.5,const", "--L", "5", "--out", str(out)]
    )
    assert code == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob["max_lower"] > 0
    assert blob["max_upper"] >= blob["max_lower"]
    assert blob["max_bracket_ratio"] <= 6.0**2 * 2.0 + 1e-9
    assert (tmp_path / "mx-lower.grid").exists()
    assert (tmp_path / "mx.json").exists()


# -------------------------------------------------------------------- sparse
def test_sparse_subcommand_families(tmp_path, capsys):
    code = main(["sparse", "--f", "power:-0.5@pos,power:-0.25@pos", "--L", "6"])
    assert code == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob["a"] == pytest.approx(16.0)  # default 2^(mn+2) for m=2, n=1
    assert blob["count"] >= 1
    assert blob["count"] == len(blob["cubes"])
    assert blob["lambda0"] > 0


def test_sparse_ratio_too_small_is_config_error(capsys):
    code = main(
        ["sparse", "--f", "power:-0.5@pos,const:0", "--L", "5", "--a", "2"]
    )
    assert code == 2
    assert "exceed" in capsys.readouterr().err


def test_sparse_uncoverable_support_is_config_error(capsys):
    # constant 1 on the whole box: no in-box grid cube contains it
    code = main(["sparse", "--f", "const,const", "--L", "5"])
    assert code == 2
    assert "cube" in capsys.readouterr().err


# -------------------------------------------------------------------- sweeps
def test_mw_sweep_writes_csv_fit_and_gnuplot(tmp_path, capsys):
    prefix = tmp_path / "sweep"
    code = main(
        [
            "mw-sweep",
            "--p",
            "2,2",
            "--eps",
            "2^-2..2^-5",
            "--L",
            "6",
            "--out",
            str(prefix),
        ]
    )
    assert code == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "eps,ap_const,lhs_norm,rhs_norm_product,ratio,L,ms"
    assert len(lines) == 5
    fit = json.loads((tmp_path / "sweep-fit.json").read_text())
    assert set(fit) == {"slope", "intercept", "residual", "eps_min", "eps_max"}
    gp = (tmp_path / "sweep.gp").read_text()
    assert "logscale" in gp and "sweep.csv" in gp
    blob = json.loads(capsys.readouterr().out)
    assert blob["rows"] == 4
    assert blob["fit"]["slope"] == pytest.approx(fit["slope"])


def test_mw_sweep_env_thread_count_does_not_change_bytes(tmp_path, monkeypatch, capsys):
    args = ["mw-sweep", "--p", "2,2", "--eps", "2^-2..2^-5", "--L", "5"]
    monkeypatch.setenv("MWEIGHTS_THREADS", "1")
    assert main(args + ["--out", str(tmp_path / "one")]) == 0
    monkeypatch.setenv("MWEIGHTS_THREADS", "4")
    assert main(args + ["--out", str(tmp_path / "four")]) == 0
    capsys.readouterr()
    assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "four.csv").read_bytes()


def test_riesz_sweep_direct_and_regime_error(tmp_path, capsys):
    code = main(
        [
            "riesz-sweep",
            "--p",
            "2,2",
            "--eps",
            "2^-2..2^-5",
            "--L",
            "6",
            "--out",
            str(tmp_path / "rz"),
        ]
    )
    assert code == 0
    capsys.readouterr()
    # exponents in the adjoint regime are rejected for the direct variant
    code = main(
        [
            "riesz-sweep",
            "--p",
            "4,4",
            "--eps",
            "2^-2..2^-5",
            "--L",
            "6",
            "--out",
            str(tmp_path / "rz2"),
        ]
    )
    assert code == 2
    assert "adjoint" in capsys.readouterr().err


def test_riesz_sweep_adjoint_variant(tmp_path, capsys):
    code = main(
        [
            "riesz-sweep",
            "--p",
            "4,4",
            "--variant",
            "adjoint_slot1",
            "--eps",
            "2^-2..2^-5",
            "--L",
            "6",
            "--out",
            str(tmp_path / "adj"),
        ]
    )
    assert code == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob["fit"]["slope"] > 0


# --------------------------------------------------------------------- audit
def test_audit_subcommand_json(capsys):
    code = main(
        [
            "audit",
            "--p",
            "2,2",
            "--operator",
            "sparse",
            "--L",
            "5",
            "--trials",
            "3",
            "--seed",
            "7",
        ]
    )
    assert code == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob["operator"] == "sparse"
    assert blob["trials"] == 3
    assert blob["max_quotient"] > 0
    assert len(blob["quotients"]) + blob["skipped"] == 3


def test_audit_bad_operator_rejected_by_parser(capsys):
    assert main(["audit", "--p", "2,2", "--operator", "fourier"]) == 2


def test_audit_needs_positive_trials(capsys):
    code = main(["audit", "--p", "2,2", "--trials", "0", "--L", "5"])
    assert code == 2


# -------------------------------------------------------------------- config
def test_config_file_overrides_flags(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"L": 5, "w": ["power:0.5", "const"]}))
    code = main(
        [
            "apconst",
            "--p",
            "2,2",
            "--w",
            "const,const",
            "--L",
            "7",
            "--config",
            str(cfg),
        ]
    )
    assert code == 0
    blob = json.loads(capsys.readouterr().out)
    assert "L5" in blob["family"]
    assert blob["constant"] > 1.0  # the override swapped in a power weight


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"banana": 1}))
    code = main(["apconst", "--p", "2,2", "--w", "const,const", "--config", str(cfg)])
    assert code == 2
    assert "banana" in capsys.readouterr().err


def test_config_file_bad_json(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text("{nope")
    assert (
        main(["apconst", "--p", "2,2", "--w", "const,const", "--config", str(cfg)])
        == 2
    )


# ------------------------------------------------------------------ selftest
def test_selftest_passes_clean_tree(capsys):
    code = main(["selftest"])
    out = capsys.readouterr().out
    assert code == 0, out
    assert "all" in out and "passed" in out
    assert "FAIL" not in out
