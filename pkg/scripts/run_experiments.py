"""Run experiment suites and write CSV/SVG outputs under ``<out>/<suite>/``.

    python scripts/run_experiments.py                 # every suite, desk scale
    python scripts/run_experiments.py heatmap --full  # one suite, full scale
"""

import argparse
import json
import time

from chunglu import experiments


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("suites", nargs="*", choices=experiments.SUITES, default=list(experiments.SUITES))
    parser.add_argument("--full", action="store_true")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="results")
    args = parser.parse_args()

    for suite in args.suites:
        cfg = experiments.default_config(suite, full=args.full, seed=args.seed, out_dir=args.out)
        start = time.perf_counter()
        result = experiments.run(cfg)
        # one directory per suite so each keeps its own config.json
        paths = experiments.write_outputs(result, f"{args.out}/{suite}")
        print(f"{suite}: {time.perf_counter() - start:.1f}s -> {', '.join(str(p) for p in paths)}")
        print(json.dumps(experiments.summarize(result), indent=2))


if __name__ == "__main__":
    main()
