"""Command-line entry point for the debris-triage pipeline."""
from __future__ import annotations

from debris_triage.cli import main


if __name__ == "__main__":
    main()
