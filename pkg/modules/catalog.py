"""
Catalog - Published node counts of symmetric PI rules, loaded from YAML files.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import yaml

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent.parent / "data" / "reference"


class Catalog:
    def __init__(self, data_dir: Union[str, Path] = DATA_DIR):
        """Initialize the catalog with the directory containing node-count YAML files."""
        self.data_dir = Path(data_dir)
        self.counts: Dict[str, Dict[str, Dict[int, int]]] = {}
        self._load_counts()

    def _load_counts(self) -> None:
        """Load every ``*.yaml`` file, merging domains and sources."""
        if not self.data_dir.exists():
            logger.warning("reference data directory %s does not exist", self.data_dir)
            return

        for yaml_file in sorted(self.data_dir.glob("*.yaml")):
            try:
                with open(yaml_file, "r", encoding="utf-8") as f:
                    tables = yaml.safe_load(f) or {}
            except (OSError, yaml.YAMLError) as e:
                logger.warning("could not load node counts from %s: %s", yaml_file, e)
                continue
            for domain, sources in tables.items():
                for source, table in (sources or {}).items():
                    merged = self.counts.setdefault(domain, {}).setdefault(source, {})
                    merged.update({int(q): int(n) for q, n in table.items()})

    def published_count(self, domain: str, q: int, source: str = "new") -> Optional[int]:
        """Node count of the published degree-``q`` rule, or None if there is none."""
        return self.counts.get(domain, {}).get(source, {}).get(q)

    def degrees(self, domain: str, source: str = "new") -> List[int]:
        return sorted(self.counts.get(domain, {}).get(source, {}))

    def sources(self, domain: str) -> List[str]:
        """Source names for a domain, ``new`` first."""
        names = list(self.counts.get(domain, {}))
        return sorted(names, key=lambda name: (name != "new", name))
