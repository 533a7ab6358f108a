"""Command-line benchmark runner.

    repad2 --data AirQualityUCI.csv --column "PT08.S1(CO)" --cell lstm --out results/s1
    repad2 --synthetic "sine,length=3000,noise=10,points=500,collectives=1200-1210"
"""

from __future__ import annotations

import argparse
import logging
import sys

from .bench import RunConfig, acceptance_checks, run_benchmark
from .cells import CellKind
from .errors import Repad2Error


def _window_w(text: str) -> int | None:
    if text == "auto":
        return None
    value = int(text)
    if value < 3:
        raise argparse.ArgumentTypeError("window W must be >= 3 or 'auto'")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="repad2", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="path to AirQualityUCI.csv")
    src.add_argument("--synthetic", metavar="SPEC", help="synthetic stream, e.g. 'sine,length=2000,points=500'")
    p.add_argument("--column", default="PT08.S1(CO)", help="series column name (default: %(default)s)")
    p.add_argument("--cell", choices=[k.value for k in CellKind], default="lstm")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.005)
    p.add_argument("--hidden", type=int, default=10)
    p.add_argument("--seed", type=int, default=140)
    p.add_argument("--lookback", type=int, default=3)
    p.add_argument("--window-w", type=_window_w, default=None, metavar="N|auto",
                   help="AARE history bound W; 'auto' uses the series length (default)")
    p.add_argument("--sigma", type=float, default=3.0, help="threshold sigma multiplier")
    p.add_argument("--k", type=int, default=3, help="K-window tolerance")
    p.add_argument("--out", default="results", help="output directory (default: %(default)s)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--expected-rows", type=int, default=9357,
                   help="required data row count for --data; 0 disables the check")
    p.add_argument("--assert", dest="assert_", action="store_true",
                   help="exit nonzero if any acceptance threshold is missed")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig(
            data=args.data, column=args.column, synthetic=args.synthetic, cell=args.cell,
            epochs=args.epochs, lr=args.lr, hidden=args.hidden, seed=args.seed, lookback=args.lookback,
            window_w=args.window_w, sigma_multiplier=args.sigma, k=args.k, out=args.out, format=args.format,
            expected_rows=args.expected_rows or None,
        )
        report = run_benchmark(cfg)
    except (Repad2Error, OSError) as exc:
        print(f"repad2: error: {exc}", file=sys.stderr)
        return 2

    c, t = report.counts, report.timing
    print(f"{report.metadata['series']['name']} [{cfg.cell.value}] "
          f"tp={c.tp} fp={c.fp} fn={c.fn} P={report.precision:.3f} R={report.recall:.3f} F1={report.f1:.3f}")
    train = f"{t.dt_train_mean:.4f}s" if t.dt_train_mean is not None else "n/a"
    notrain = f"{t.dt_notrain_mean:.4f}s" if t.dt_notrain_mean is not None else "n/a"
    print(f"retrain_ratio={t.retrain_ratio:.4f} DT-Train={train} DT-noTrain={notrain}")
    for lab in report.missed_labels:
        print(f"missed {lab.kind.value} [{lab.start}, {lab.end}]")
    print(f"wrote {cfg.out}")

    if args.assert_:
        checks = acceptance_checks(report)
        for name, ok in checks.items():
            print(f"{'PASS' if ok else 'FAIL'} {name}")
        if not all(checks.values()):
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
