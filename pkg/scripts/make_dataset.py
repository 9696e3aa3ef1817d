#!/usr/bin/env python3
"""Generate a synthetic multimodal piano dataset for demos and load tests.

Example:
    python scripts/make_dataset.py --root ./demo-data --sessions 109
    pianoviewer scan --root ./demo-data
    pianoviewer serve --root ./demo-data --port 8000
"""

import argparse
from pathlib import Path

from pianoviewer import datagen


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", type=Path, required=True,
                        help="dataset root to create (sessions/ goes under it)")
    parser.add_argument("--sessions", type=int, default=109)
    parser.add_argument("--seed", type=int, default=20250109)
    parser.add_argument("--notes", type=int, default=80,
                        help="approximate note count per session")
    parser.add_argument("--unaligned", type=int, default=None,
                        help="sessions with a disjoint video span")
    parser.add_argument("--incomplete", type=int, default=None,
                        help="sessions with missing or broken assets")
    args = parser.parse_args()

    plans = datagen.make_dataset(
        args.root,
        n_sessions=args.sessions,
        seed=args.seed,
        n_unaligned=args.unaligned,
        n_incomplete=args.incomplete,
        n_notes=args.notes,
    )
    by_target = {}
    for plan in plans:
        by_target[plan.target] = by_target.get(plan.target, 0) + 1
    summary = ", ".join(f"{n} {t}" for t, n in sorted(by_target.items()))
    print(f"wrote {len(plans)} sessions under {args.root / 'sessions'} ({summary})")


if __name__ == "__main__":
    main()
