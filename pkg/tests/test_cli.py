"""
Tests for the piquad command line.
"""
import csv

import pytest
import yaml

from modules.cli import (
    EXIT_INVALID,
    EXIT_OK,
    EXIT_USAGE,
    parse_run_config,
    run,
)
from modules.errors import UsageError
from modules.rules_io import read_rule


def test_bounds(capsys):
    assert run(["bounds", "--domain", "tri", "--degree", "8"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "tri q=8" in out
    assert "16" in out


def test_bounds_with_node_count(capsys):
    assert run(["bounds", "--domain", "tet", "--degree", "2", "--nodes", "4"]) == EXIT_OK
    assert "1.0000" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["bounds", "--domain", "tri", "--degree", "0"],
    ["bounds", "--domain", "tri", "--degree", "85"],
    ["bounds", "--domain", "tet", "--degree", "41"],
    ["bounds", "--domain", "hex", "--degree", "3"],
    ["bounds", "--domain", "tri"],
    ["bounds", "--domain", "tri", "--degree", "8", "--bogus"],
    ["bounds", "--domain", "tri", "--degree", "8", "--nodes", "0"],
    ["bounds", "--domain", "tet", "--degree", "3", "--nodes", "-4"],
    ["frobnicate"],
    [],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE
    assert capsys.readouterr().err


def test_help_exits_cleanly(capsys):
    assert run(["--help"]) == EXIT_OK
    assert "derive" in capsys.readouterr().out


def test_derive_then_validate(tmp_path):
    out = tmp_path / "tri_q02.txt"
    assert run(["derive", "--domain", "tri", "--degree", "2", "--out", str(out)]) == EXIT_OK
    parsed = read_rule(out)
    assert parsed.status == "converged"
    assert parsed.rule.num_nodes == 3
    assert run(["validate", "--in", str(out)]) == EXIT_OK


def test_derive_is_deterministic(tmp_path):
    first, second = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (first, second):
        assert run(["derive", "--domain", "tet", "--degree", "3", "--out", str(path)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_derive_to_stdout(capsys):
    assert run(["derive", "--domain", "tri", "--degree", "1"]) == EXIT_OK
    assert "# domain: tri" in capsys.readouterr().out


def test_derive_dumps_the_initial_guess(tmp_path):
    dump = tmp_path / "guess.txt"
    assert run(["derive", "--domain", "tri", "--degree", "4", "--out", str(tmp_path / "rule.txt"),
                "--dump-initial", str(dump)]) == EXIT_OK
    assert read_rule(dump).status == "initial"


def test_validate_failure(rules_dir):
    assert run(["validate", "--in", str(rules_dir / "tri_q01.txt"), "--degree", "2"]) == EXIT_INVALID


def test_validate_missing_and_malformed_files(tmp_path):
    assert run(["validate", "--in", str(tmp_path / "none.txt")]) == EXIT_USAGE
    broken = tmp_path / "broken.txt"
    broken.write_text("# domain: tri\n# degree: 1\nS99 1.0\n")
    assert run(["validate", "--in", str(broken)]) == EXIT_USAGE


def test_config_file_supplies_options(tmp_path, capsys):
    config = tmp_path / "bounds.yaml"
    config.write_text(yaml.safe_dump({"domain": "tri", "degree": 8}))
    assert run(["bounds", "--config", str(config)]) == EXIT_OK
    assert "tri q=8" in capsys.readouterr().out

    assert run(["bounds", "--config", str(config), "--degree", "2"]) == EXIT_OK
    assert "tri q=2" in capsys.readouterr().out


def test_config_aliases_and_types(tmp_path, rules_dir):
    config = tmp_path / "validate.yaml"
    config.write_text(yaml.safe_dump({"in": str(rules_dir / "tet_q02.txt"), "tol": 1e-13}))
    parsed = parse_run_config(["validate", "--config", str(config), "-v"])
    assert parsed.command == "validate"
    assert parsed.verbosity == 1
    assert parsed.get("in_file").name == "tet_q02.txt"
    assert run(["validate", "--config", str(config)]) == EXIT_OK


def test_config_errors(tmp_path):
    unknown = tmp_path / "unknown.yaml"
    unknown.write_text("domain: tri\ncolour: blue\n")
    assert run(["bounds", "--config", str(unknown), "--degree", "3"]) == EXIT_USAGE

    listed = tmp_path / "list.yaml"
    listed.write_text("- tri\n- 3\n")
    assert run(["bounds", "--config", str(listed)]) == EXIT_USAGE

    assert run(["bounds", "--config", str(tmp_path / "absent.yaml")]) == EXIT_USAGE


def test_required_option_names_the_flag():
    config = parse_run_config(["export"])
    with pytest.raises(UsageError, match="--in is required"):
        config.require("in_file")


def test_verbose_and_quiet_are_exclusive():
    assert run(["bounds", "--domain", "tri", "--degree", "3", "-v", "-q"]) == EXIT_USAGE


def test_export_and_import(tmp_path, rules_dir, capsys):
    source = rules_dir / "tri_q08_dunavant.txt"
    points = tmp_path / "points.txt"
    assert run(["export", "--in", str(source), "--pointset", str(points)]) == EXIT_OK
    assert len(points.read_text().splitlines()) == 16

    out = tmp_path / "imported.txt"
    assert run(["import", "--pointset", str(points), "--domain", "tri", "--degree", "8",
                "--out", str(out)]) == EXIT_OK
    imported = read_rule(out)
    assert imported.status == "imported"
    assert imported.rule.num_nodes == 16

    capsys.readouterr()
    assert run(["export", "--in", str(rules_dir / "tri_q02.txt")]) == EXIT_OK
    assert len(capsys.readouterr().out.splitlines()) == 3


def test_import_of_missing_point_set(tmp_path):
    assert run(["import", "--pointset", str(tmp_path / "none.txt"), "--domain", "tri",
                "--degree", "2"]) == EXIT_USAGE


def test_eliminate_rule_at_the_bound(tmp_path, rules_dir):
    log = tmp_path / "log.yaml"
    out = tmp_path / "out.txt"
    assert run(["eliminate", "--in", str(rules_dir / "tri_q02.txt"), "--criterion", "facet",
                "--log", str(log), "--out", str(out)]) == EXIT_OK
    assert yaml.safe_load(log.read_text()) == []
    assert read_rule(out).status == "eliminated"


def test_eliminate_rejects_unknown_criterion(rules_dir):
    assert run(["eliminate", "--in", str(rules_dir / "tri_q02.txt"), "--criterion", "dice"]) == EXIT_USAGE


def test_integrate(rules_dir, capsys):
    rule = str(rules_dir / "tri_q02.txt")
    assert run(["integrate", "--rule", rule, "--case", "J3", "--n", "2"]) == EXIT_USAGE
    assert run(["integrate", "--rule", rule, "--case", "I2", "--n", "2"]) == EXIT_OK
    assert "I2" in capsys.readouterr().out


def test_convergence_csv(tmp_path, rules_dir):
    out = tmp_path / "rates.csv"
    assert run(["convergence", "--rule", str(rules_dir / "tet_q02.txt"), "--n", "2,4",
                "--csv", str(out)]) == EXIT_OK
    rows = list(csv.reader(out.open()))
    assert [row[0] for row in rows] == ["n", "2", "4"]
    assert run(["convergence", "--rule", str(rules_dir / "tet_q02.txt"), "--n", "4,x"]) == EXIT_USAGE


def test_efficiency(tmp_path, rules_dir, capsys):
    out = tmp_path / "eff.csv"
    assert run(["efficiency", "--dir", str(rules_dir), "--reference", "--csv", str(out)]) == EXIT_OK
    rows = list(csv.reader(out.open()))
    assert len(rows) == 5
    assert "new" in rows[0]
    assert run(["efficiency", "--dir", str(tmp_path / "nowhere")]) == EXIT_USAGE


def test_derive_batch(tmp_path, capsys):
    rules = tmp_path / "rules"
    assert run(["derive-batch", "--domain", "tri", "--degrees", "1..3", "--dir", str(rules)]) == EXIT_OK
    assert sorted(p.name for p in rules.iterdir()) == ["tri_q01.txt", "tri_q02.txt", "tri_q03.txt"]


def test_derive_batch_rejects_bad_spans(tmp_path):
    assert run(["derive-batch", "--domain", "tet", "--degrees", "1..41", "--dir", str(tmp_path)]) == EXIT_USAGE
    assert run(["derive-batch", "--domain", "tet", "--degrees", "1..2", "--jobs", "0",
                "--dir", str(tmp_path)]) == EXIT_USAGE
