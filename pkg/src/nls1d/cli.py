"""Command-line entry point: run / validate / suite.

    nls1d run <config-file> [--out DIR] [--seed U64]
    nls1d validate <config-file>
    nls1d suite <matrix-file> [--out DIR] [--workers N] [--seed U64]

A matrix file lists config paths (one per line, relative to the matrix
file; ``#`` comments allowed).  Every experiment writes into its own
subdirectory of the output root (``--out``, the NLS1D_OUT environment
variable, or ``./out``).  Exit code 0 means every audit passed.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .harness import ExperimentConfig, default_output_root, load_config, parse_config, run_experiment


def _out_root(args) -> Path:
    return Path(args.out) if args.out else default_output_root()


def _run_one(path: str, out_root: str, seed: int | None) -> tuple[str, bool, str]:
    try:
        ec = load_config(path)
        out_dir = Path(out_root) / (ec.output or Path(path).stem)
        result = run_experiment(ec, out_dir=out_dir, seed_override=seed)
        return path, result.passed, str(result.out_dir)
    except Exception as exc:
        return path, False, f"error: {exc}"


def cmd_run(args) -> int:
    ec = load_config(args.config)
    out_dir = _out_root(args) / (ec.output or Path(args.config).stem)
    result = run_experiment(ec, out_dir=out_dir, seed_override=args.seed)
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} {ec.experiment} -> {result.out_dir}")
    return 0 if result.passed else 1


def cmd_validate(args) -> int:
    try:
        text = Path(args.config).read_text()
        ExperimentConfig.from_dict(parse_config(text))
    except (OSError, ValueError) as exc:
        print(f"INVALID {args.config}: {exc}")
        return 1
    print(f"OK {args.config}")
    return 0


def cmd_suite(args) -> int:
    matrix = Path(args.matrix)
    paths = []
    for line in matrix.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            paths.append(str((matrix.parent / line).resolve()))
    if not paths:
        print("empty suite")
        return 1
    out_root = str(_out_root(args))
    results = []
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            futures = [pool.submit(_run_one, p, out_root, args.seed) for p in paths]
            results = [f.result() for f in futures]
    else:
        results = [_run_one(p, out_root, args.seed) for p in paths]
    ok = True
    for path, passed, detail in results:
        status = "PASS" if passed else "FAIL"
        ok &= passed
        print(f"{status} {Path(path).name}: {detail}")
    print(f"suite: {sum(p for _, p, _ in results)}/{len(results)} passed")
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="nls1d", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output root directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="validate a config without running")
    p_val.add_argument("config")
    p_val.set_defaults(func=cmd_validate)

    p_suite = sub.add_parser("suite", help="run a matrix of configs")
    p_suite.add_argument("matrix")
    p_suite.add_argument("--out", default=None)
    p_suite.add_argument("--workers", type=int, default=1)
    p_suite.add_argument("--seed", type=int, default=None)
    p_suite.set_defaults(func=cmd_suite)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
