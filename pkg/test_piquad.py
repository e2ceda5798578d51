"""
Smoke test for the piquad entry script
"""
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent


def test_entry_script_runs():
    """The script answers a bounds query and exits 0"""
    result = subprocess.run(
        [sys.executable, "piquad.py", "bounds", "--domain", "tri", "--degree", "8"],
        cwd=ROOT, capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr
    assert "16" in result.stdout


def test_entry_script_reports_usage_errors():
    """A bad degree is a usage error, exit 3"""
    result = subprocess.run(
        [sys.executable, "piquad.py", "bounds", "--domain", "tri", "--degree", "0"],
        cwd=ROOT, capture_output=True, text=True,
    )
    assert result.returncode == 3
    assert "degree" in result.stderr
