"""
Tests for the Catalog class.
"""
import logging
from pathlib import Path

import pytest
import yaml

from modules.bounds import efficiency, lower_bound
from modules.catalog import Catalog


def test_default_catalog_loads_both_domains():
    catalog = Catalog()
    assert catalog.published_count("tri", 8) == 16
    assert catalog.published_count("tet", 2) == 4
    assert catalog.published_count("tri", 84) == 1261
    assert catalog.published_count("tet", 40) == 3815
    assert catalog.degrees("tri") == list(range(1, 85))


def test_unknown_entries_are_none():
    catalog = Catalog()
    assert catalog.published_count("tri", 85) is None
    assert catalog.published_count("hex", 2) is None
    assert catalog.published_count("tet", 2, source="nobody") is None
    assert catalog.sources("hex") == []


def test_sources_list_new_first():
    sources = Catalog().sources("tet")
    assert sources[0] == "new"
    assert sources[1:] == sorted(sources[1:])
    assert "jaskowiec_sukumar" in sources


def test_missing_directory_warns(tmp_path, caplog):
    with caplog.at_level(logging.WARNING, logger="modules.catalog"):
        catalog = Catalog(tmp_path / "absent")
    assert catalog.counts == {}
    assert "does not exist" in caplog.text


def test_files_are_merged(tmp_path):
    (tmp_path / "a.yaml").write_text(yaml.safe_dump({"tri": {"mine": {3: 6}}}))
    (tmp_path / "b.yaml").write_text(yaml.safe_dump({"tri": {"mine": {4: 7}}, "tet": {"mine": {1: 1}}}))
    catalog = Catalog(tmp_path)
    assert catalog.degrees("tri", "mine") == [3, 4]
    assert catalog.published_count("tet", 1, "mine") == 1


def test_broken_file_is_skipped(tmp_path, caplog):
    (tmp_path / "bad.yaml").write_text("tri: [unclosed\n")
    (tmp_path / "good.yaml").write_text("tri:\n  mine:\n    2: 3\n")
    with caplog.at_level(logging.WARNING, logger="modules.catalog"):
        catalog = Catalog(Path(tmp_path))
    assert catalog.published_count("tri", 2, "mine") == 3
    assert "bad.yaml" in caplog.text


@pytest.mark.parametrize("domain, q", [
    ("tri", 1), ("tri", 2), ("tri", 4), ("tri", 5), ("tri", 6), ("tri", 8), ("tri", 10), ("tri", 12),
    ("tri", 84), ("tet", 1), ("tet", 2), ("tet", 4), ("tet", 5), ("tet", 6), ("tet", 12), ("tet", 20),
    ("tet", 40),
])
def test_published_counts_respect_the_bound(domain, q):
    n_q = Catalog().published_count(domain, q)
    assert 0.0 < efficiency(n_q, lower_bound(domain, q)) <= 1.0
