"""Command-line entry point: ``gmthresh-bench``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import (
    ALL_ALGORITHMS,
    BenchConfig,
    load_synth_specfile,
    run_benchmark,
    synth_corpus,
    write_synth_corpus,
)
from .errors import GmthreshError
from .mixture import ObjectiveConfig
from .optim import ABCParams, DEParams, PSOParams


def _algos(text: str) -> tuple:
    algos = tuple(a.strip().upper() for a in text.split(",") if a.strip())
    bad = [a for a in algos if a not in ALL_ALGORITHMS]
    if bad or not algos:
        raise argparse.ArgumentTypeError(f"choose from {','.join(a.lower() for a in ALL_ALGORITHMS)}")
    return algos


def _bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gmthresh-bench",
        description="Benchmark Gaussian-mixture multilevel thresholding with DE, PSO, ABC and Otsu.",
    )
    p.add_argument("--config", type=Path, help="key=value file; command-line flags override it")
    p.add_argument("--corpus", type=Path, help="directory of 8-bit grayscale .pgm/.png images")
    p.add_argument("--ground-truth", type=Path, help="directory of masks paired by file stem")
    p.add_argument("--synth", type=Path, help="JSON mixture spec; generates the corpus under OUT/synth")
    p.add_argument("--algos", type=_algos, default=ALL_ALGORITHMS, help="comma list of de,pso,abc,otsu")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--pop", type=int, default=90)
    p.add_argument("--stop-eps", type=float, default=None, help="stop once best fitness <= E")
    p.add_argument("--penalty", type=float, default=3.0)
    p.add_argument("--sigma-min", type=float, default=1e-2)
    p.add_argument("--de-f", type=float, default=0.25)
    p.add_argument("--de-cr", type=float, default=0.8)
    p.add_argument("--pso-omega0", type=float, default=3.0)
    p.add_argument("--pso-rho", type=float, default=4.6)
    p.add_argument("--pso-c1", type=float, default=2.0)
    p.add_argument("--pso-c2", type=float, default=2.0)
    p.add_argument("--pso-vfrac", type=float, default=0.25)
    p.add_argument("--abc-limit", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("bench-out"))
    p.add_argument("--plot", action="store_true", help="write SVG histogram/mixture overlays")
    p.add_argument("--traces", action="store_true", help="write per-iteration trace CSVs for trial 0")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def read_config_file(path: Path, parser: argparse.ArgumentParser) -> dict:
    """Parse ``key=value`` lines (``#`` comments) into parser defaults.

    Keys are flag names without the leading dashes, e.g. ``max-iter=100``.
    """
    actions = {a.dest: a for a in parser._actions}
    defaults = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        dest = key.lstrip("-").replace("-", "_")
        action = actions.get(dest)
        if action is None or dest == "config":
            raise SystemExit(f"{path}:{lineno}: unknown key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[dest] = _bool(value)
        elif action.type is not None:
            defaults[dest] = action.type(value)
        else:
            defaults[dest] = value
    return defaults


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    pre, _ = parser.parse_known_args(argv)
    if pre.config is not None:
        parser.set_defaults(**read_config_file(pre.config, parser))
    return parser.parse_args(argv)


def config_from_args(args: argparse.Namespace) -> BenchConfig:
    corpus, ground_truth = args.corpus, args.ground_truth
    if args.synth is not None:
        spec = load_synth_specfile(args.synth)
        images = synth_corpus(spec["specs"], spec["size"], spec["seed"])
        corpus, ground_truth = args.out / "synth" / "images", args.out / "synth" / "masks"
        write_synth_corpus(images, corpus, ground_truth)
    if corpus is None:
        raise SystemExit("one of --corpus or --synth is required")
    return BenchConfig(
        corpus_dir=corpus, output_dir=args.out, ground_truth_dir=ground_truth,
        algorithms=args.algos, trials_per_image=args.trials, base_seed=args.seed,
        classes=args.classes, population_size=args.pop, max_iterations=args.max_iter,
        distance_stop=args.stop_eps,
        de=DEParams(args.de_f, args.de_cr),
        pso=PSOParams(args.pso_omega0, args.pso_rho, args.pso_c1, args.pso_c2, args.pso_vfrac),
        abc=ABCParams(abandonment_limit=args.abc_limit),
        objective=ObjectiveConfig(args.penalty, args.sigma_min),
        workers=args.workers, plot=args.plot, traces=args.traces,
    )


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        _, reports = run_benchmark(cfg)
    except GmthreshError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    failed = sum(1 for r in reports if r.error)
    print(f"{len(reports)} trials ({failed} failed); results in {cfg.output_dir}")
    print((Path(cfg.output_dir) / "stats.md").read_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
