"""
Tests for the RuleStore class.
"""
import tempfile
from pathlib import Path

import pytest

from modules.rule_store import RuleStore
from modules.rules_io import parse_rule


def test_store_initialization():
    store = RuleStore("some/where")
    assert store.rules_dir == Path("some/where")
    assert store.rule_path("tri", 8) == Path("some/where/tri_q08.txt")
    assert store.rule_path("tet", 40).name == "tet_q40.txt"


def test_save_and_load(rule_text):
    rule = parse_rule(rule_text("tri_q02.txt"))
    with tempfile.TemporaryDirectory() as temp_dir:
        store = RuleStore(Path(temp_dir) / "rules")
        assert store.list_rules() == []

        path = store.save(rule, status="eliminated")
        assert path.name == "tri_q02.txt"
        assert store.rule_exists("tri", 2)
        assert not store.rule_exists("tri", 3)

        loaded = store.load_file("tri", 2)
        assert loaded.status == "eliminated"
        assert loaded.rule == rule.sorted()


def test_list_rules_ignores_other_files(rules_dir):
    listed = RuleStore(rules_dir).list_rules()
    assert [(domain, q) for domain, q, _ in listed] == [("tet", 1), ("tet", 2), ("tri", 1), ("tri", 2)]
    assert all(path.exists() for _, _, path in listed)


def test_missing_rule(tmp_path):
    with pytest.raises(FileNotFoundError, match="degree 5"):
        RuleStore(tmp_path).load("tet", 5)


def test_save_replaces_previous_file(tmp_path, rule_text):
    store = RuleStore(tmp_path)
    store.save(parse_rule(rule_text("tri_q01.txt")), status="converged")
    store.save(parse_rule(rule_text("tri_q01.txt")), status="eliminated")
    assert len(store.list_rules()) == 1
    assert store.load_file("tri", 1).status == "eliminated"
