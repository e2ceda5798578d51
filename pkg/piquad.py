"""
piquad - Main Entry Point
Symmetric positive-interior quadrature rules on triangles and tetrahedra
"""

import sys

from rich.console import Console

from modules.cli import run

console = Console(stderr=True)


if __name__ == "__main__":
    try:
        sys.exit(run(sys.argv[1:]))
    except KeyboardInterrupt:
        console.print("\nInterrupted.", style="bold yellow")
        sys.exit(130)
