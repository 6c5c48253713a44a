"""Write the deterministic synthetic fixture corpus for every configured region."""

from __future__ import annotations

import argparse
import logging
from datetime import date
from pathlib import Path
from typing import Sequence

from ceres.cli._helpers import add_common_args, configure_logging, iso_date, load_cli_config
from ceres.ingestion.corpus import CorpusSpec, write_corpus
from ceres.ingestion.spatial import load_regions

LOGGER = logging.getLogger("make_fixture_corpus")

DEFAULT_END = date(2026, 3, 2)


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    add_common_args(parser)
    parser.add_argument("--end", type=iso_date, default=DEFAULT_END, help="Last pipeline week covered")
    parser.add_argument("--history-weeks", type=int, default=30, help="Weeks of history before --end")
    parser.add_argument("--outcome-weeks", type=int, default=20, help="Weeks of IPC outcomes after --end")
    parser.add_argument("--seed", type=int, default=7, help="Corpus seed")
    parser.add_argument("--out", default=None, help="Corpus root (default: paths.fixture_root)")
    args = parser.parse_args(argv)

    configure_logging(args.verbose)
    config = load_cli_config(args.config)
    root = Path(args.out) if args.out else config.paths.fixture_root
    boundaries = load_regions(config.paths.regions_path)
    summary = write_corpus(
        root,
        {iso3: boundaries[iso3] for iso3 in config.regions},
        CorpusSpec(
            end=args.end,
            history_weeks=args.history_weeks,
            seed=args.seed,
            outcome_weeks=args.outcome_weeks,
        ),
    )
    LOGGER.info("Corpus ready: %d files under %s", len(summary.files), summary.root)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
