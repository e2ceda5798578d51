"""
Rule Store Module

Keeps a directory of rule files named ``{domain}_q{degree:02d}.txt``.
"""
import logging
import re
from pathlib import Path
from typing import List, Optional, Tuple, Union

from .geometry import QuadRule
from .rules_io import RuleFile, read_rule, write_rule

logger = logging.getLogger(__name__)

_RULE_NAME = re.compile(r"^(tri|tet)_q(\d+)\.txt$")


class RuleStore:
    """Directory-backed collection of rule files."""

    def __init__(self, rules_dir: Union[str, Path] = "rules"):
        """Initialize the store.

        Args:
            rules_dir: Directory holding the rule files; created on first save
        """
        self.rules_dir = Path(rules_dir)

    def rule_path(self, domain: str, q: int) -> Path:
        return self.rules_dir / f"{domain}_q{q:02d}.txt"

    def list_rules(self) -> List[Tuple[str, int, Path]]:
        """All rule files in the directory.

        Returns:
            ``(domain, degree, path)`` tuples sorted by domain, then degree
        """
        if not self.rules_dir.exists():
            return []
        found = []
        for path in self.rules_dir.glob("*.txt"):
            match = _RULE_NAME.match(path.name)
            if match:
                found.append((match.group(1), int(match.group(2)), path))
        return sorted(found, key=lambda item: (item[0], item[1]))

    def rule_exists(self, domain: str, q: int) -> bool:
        return self.rule_path(domain, q).exists()

    def save(self, rule: QuadRule, status: str = "converged", residual: Optional[float] = None) -> Path:
        """Write a rule under its canonical name, replacing any previous file.

        Returns:
            Path of the written file
        """
        self.rules_dir.mkdir(parents=True, exist_ok=True)
        path = write_rule(self.rule_path(rule.domain, rule.degree), rule, status, residual)
        logger.info("saved %s degree %d rule (%d nodes) to %s",
                    rule.domain, rule.degree, rule.num_nodes, path)
        return path

    def load_file(self, domain: str, q: int) -> RuleFile:
        path = self.rule_path(domain, q)
        if not path.exists():
            raise FileNotFoundError(f"No {domain} rule of degree {q} in {self.rules_dir}")
        return read_rule(path)

    def load(self, domain: str, q: int) -> QuadRule:
        return self.load_file(domain, q).rule
