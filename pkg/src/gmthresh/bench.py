"""Seeded multi-trial benchmark of DE/PSO/ABC/Otsu over an image corpus."""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (
    EmptyCorpusError,
    EmptyGroupError,
    EmptyMaskError,
    GmthreshError,
    InvalidSpecError,
    MaskPairingError,
)
from .histogram import GrayImage, Histogram, compute_histogram, load_gray_image, write_pgm
from .metrics import BinaryMask, class_mask, hausdorff_distance, load_mask
from .mixture import (
    MixtureCandidate,
    MixtureObjective,
    ObjectiveConfig,
    default_bounds,
    effective_bounds,
    mixture_pdf,
)
from .optim import ABCParams, DEParams, OptimizerConfig, PSOParams, run
from .thresholding import apply_thresholds, derive_thresholds, otsu_two_thresholds

log = logging.getLogger(__name__)

ALL_ALGORITHMS = ("DE", "PSO", "ABC", "OTSU")
IMAGE_SUFFIXES = (".pgm", ".png")

REPORT_COLUMNS = (
    "image", "algorithm", "trial", "seed", "hellinger", "fitness", "iterations",
    "evaluations", "wall_seconds", "thresholds", "hausdorff", "error",
)
NUMERIC_FIELDS = ("hellinger", "fitness", "iterations", "evaluations", "wall_seconds", "hausdorff")
TIMING_COLUMNS = ("wall_seconds",)


@dataclass
class BenchConfig:
    corpus_dir: Path
    output_dir: Path
    ground_truth_dir: Optional[Path] = None
    algorithms: tuple = ("DE", "PSO", "ABC", "OTSU")
    trials_per_image: int = 10
    base_seed: int = 0
    classes: int = 3
    population_size: int = 90
    max_iterations: int = 200
    distance_stop: Optional[float] = None
    de: DEParams = field(default_factory=DEParams)
    pso: PSOParams = field(default_factory=PSOParams)
    abc: ABCParams = field(default_factory=ABCParams)
    objective: ObjectiveConfig = field(default_factory=ObjectiveConfig)
    workers: int = 1
    plot: bool = False
    traces: bool = False

    def __post_init__(self):
        if self.trials_per_image < 1:
            raise ValueError("trials_per_image must be >= 1")
        self.algorithms = tuple(a.upper() for a in self.algorithms)
        bad = set(self.algorithms) - set(ALL_ALGORITHMS)
        if bad:
            raise ValueError(f"unknown algorithms: {sorted(bad)}")


@dataclass
class TrialReport:
    image: str
    algorithm: str
    trial: int
    seed: int
    hellinger: Optional[float] = None
    fitness: Optional[float] = None
    iterations: Optional[int] = None
    evaluations: Optional[int] = None
    wall_seconds: Optional[float] = None
    thresholds: tuple = ()
    hausdorff: Optional[float] = None
    error: str = ""

    def to_row(self) -> dict:
        row = {}
        for name in REPORT_COLUMNS:
            v = getattr(self, name)
            if name == "thresholds":
                row[name] = ";".join(repr(float(t)) for t in v)
            elif v is None:
                row[name] = ""
            elif isinstance(v, float):
                row[name] = repr(float(v))
            else:
                row[name] = str(v)
        return row

    @classmethod
    def from_row(cls, row: dict) -> "TrialReport":
        def num(key, kind):
            return kind(row[key]) if row.get(key, "") != "" else None

        return cls(
            image=row["image"], algorithm=row["algorithm"], trial=int(row["trial"]),
            seed=int(row["seed"]), hellinger=num("hellinger", float), fitness=num("fitness", float),
            iterations=num("iterations", int), evaluations=num("evaluations", int),
            wall_seconds=num("wall_seconds", float),
            thresholds=tuple(float(t) for t in row["thresholds"].split(";") if t),
            hausdorff=num("hausdorff", float), error=row.get("error", ""),
        )


# -- seeding -----------------------------------------------------------------

def trial_seed(base_seed: int, image_id: str, algorithm: str, trial: int) -> int:
    """base_seed XOR a 64-bit BLAKE2b digest of (image, algorithm, trial)."""
    digest = hashlib.blake2b(f"{image_id}\x00{algorithm}\x00{trial}".encode(), digest_size=8).digest()
    return (base_seed ^ int.from_bytes(digest, "little")) & (2 ** 64 - 1)


# -- synthetic corpus --------------------------------------------------------

@dataclass(frozen=True)
class SynthImage:
    name: str
    image: GrayImage
    classes: np.ndarray  # generating class per pixel, components in the given order
    mixture: MixtureCandidate

    def mask(self, class_index: int) -> BinaryMask:
        return BinaryMask(self.classes == class_index)

    def darkest_mask(self) -> BinaryMask:
        return self.mask(int(np.argmin(self.mixture.means)))


def _validate_spec(priors, means, sigmas) -> None:
    if not (len(priors) == len(means) == len(sigmas)) or len(priors) == 0:
        raise InvalidSpecError("priors, means and sigmas must be non-empty and equal length")
    if any(p < 0 for p in priors) or abs(sum(priors) - 1.0) > 1e-9:
        raise InvalidSpecError(f"priors must be nonnegative and sum to 1: {priors}")
    if any(not 0 <= m <= 255 for m in means):
        raise InvalidSpecError(f"means must lie in [0, 255]: {means}")
    if any(s <= 0 for s in sigmas):
        raise InvalidSpecError(f"sigmas must be positive: {sigmas}")


def synth_corpus(specs: Sequence[tuple], size: tuple = (256, 256), seed: int = 0,
                 prefix: str = "synth") -> list[SynthImage]:
    """One image per (priors, means, sigmas) spec.

    Each pixel draws its class independently from the priors, then a gray
    level from that class's Gaussian, rounded and clipped to [0, 255].
    """
    height, width = size
    out = []
    for n, (priors, means, sigmas) in enumerate(specs):
        _validate_spec(priors, means, sigmas)
        rng = np.random.default_rng([seed, n])
        cls = rng.choice(len(priors), size=(height, width), p=np.asarray(priors, dtype=np.float64))
        noise = rng.standard_normal((height, width))
        vals = np.asarray(means, dtype=np.float64)[cls] + np.asarray(sigmas, dtype=np.float64)[cls] * noise
        px = np.clip(np.rint(vals), 0, 255).astype(np.uint8)
        out.append(SynthImage(f"{prefix}{n:03d}", GrayImage(px), cls, MixtureCandidate(priors, means, sigmas)))
    return out


def random_mixture_specs(count: int, seed: int = 0, k: int = 3, sigma_range=(6.0, 14.0),
                         gap_sigmas: float = 4.0, prior_range=(0.25, 0.45)) -> list[tuple]:
    """Well separated k-component specs: adjacent means differ by at least
    ``gap_sigmas`` times the larger deviation and sit 3 sigma inside [0, 255]."""
    rng = np.random.default_rng(seed)
    specs = []
    while len(specs) < count:
        sig = rng.uniform(*sigma_range, size=k)
        pri = rng.uniform(*prior_range, size=k)
        pri = pri / pri.sum()
        if pri.max() > 0.5:
            continue
        lo, hi = 3 * sig[0], 255 - 3 * sig[-1]
        mus = np.sort(rng.uniform(lo, hi, size=k))
        gaps_ok = all(mus[i + 1] - mus[i] >= gap_sigmas * max(sig[i], sig[i + 1]) for i in range(k - 1))
        if not gaps_ok:
            continue
        specs.append((tuple(pri.tolist()), tuple(mus.tolist()), tuple(sig.tolist())))
    return specs


def write_synth_corpus(images: Sequence[SynthImage], corpus_dir, ground_truth_dir) -> None:
    """Images as PGM plus darkest-class ground-truth masks (255 = foreground)."""
    corpus_dir, ground_truth_dir = Path(corpus_dir), Path(ground_truth_dir)
    corpus_dir.mkdir(parents=True, exist_ok=True)
    ground_truth_dir.mkdir(parents=True, exist_ok=True)
    for s in images:
        write_pgm(s.image.pixels, corpus_dir / f"{s.name}.pgm")
        write_pgm(s.darkest_mask().foreground.astype(np.uint8) * 255, ground_truth_dir / f"{s.name}.pgm")


def load_synth_specfile(path) -> dict:
    """JSON: {"size": [h, w], "seed": int, "mixtures": [{"priors", "means", "sigmas"}, ...]}."""
    data = json.loads(Path(path).read_text())
    try:
        specs = [(tuple(m["priors"]), tuple(m["means"]), tuple(m["sigmas"])) for m in data["mixtures"]]
    except (KeyError, TypeError) as exc:
        raise InvalidSpecError(f"malformed synth spec file: {exc}") from exc
    return {"specs": specs, "size": tuple(data.get("size", (256, 256))), "seed": int(data.get("seed", 0))}


# -- per-trial pipeline ------------------------------------------------------

@dataclass(frozen=True)
class _Job:
    image_id: str
    image_path: Path
    mask_path: Optional[Path]
    algorithm: str
    trial: int
    seed: int


def _optimizer_params(cfg: BenchConfig, algorithm: str):
    return {"DE": cfg.de, "PSO": cfg.pso, "ABC": cfg.abc}[algorithm]


def _segment(cfg: BenchConfig, job: _Job, image: GrayImage, hist: Histogram):
    """Run one trial; returns the report plus the artifacts trial 0 writes out."""
    rep = TrialReport(job.image_id, job.algorithm, job.trial, job.seed)
    fitted = None
    result = None
    if job.algorithm == "OTSU":
        t0 = time.perf_counter()
        ts, count = otsu_two_thresholds(hist)
        rep.wall_seconds = time.perf_counter() - t0
        rep.evaluations = count
    else:
        objective = MixtureObjective(hist, cfg.classes, cfg.objective)
        bounds = effective_bounds(default_bounds(cfg.classes, hist.levels), cfg.objective)
        ocfg = OptimizerConfig(cfg.population_size, cfg.max_iterations, cfg.distance_stop, job.seed)
        result = run(job.algorithm, objective, bounds, ocfg, _optimizer_params(cfg, job.algorithm))
        fitted = MixtureCandidate.from_vector(result.best_position)
        rep.wall_seconds = result.wall_time
        rep.fitness = result.best_fitness
        rep.hellinger = float(objective.distance(result.best_position)[0])
        rep.iterations = result.iterations_used
        rep.evaluations = result.evaluations_used
        ts = derive_thresholds(fitted)
    rep.thresholds = ts.thresholds
    labels = apply_thresholds(image, ts)
    if job.mask_path is not None:
        # darkest class is label 0 once components are sorted by mean
        gt = load_mask(job.mask_path)
        try:
            rep.hausdorff = hausdorff_distance(class_mask(labels, 0), gt)
        except EmptyMaskError as exc:
            # the fit itself is still reported; only the quality number is missing
            rep.error = f"{type(exc).__name__}: {exc}"
    return rep, labels, fitted, result


def _run_job(cfg: BenchConfig, job: _Job):
    try:
        image = load_gray_image(job.image_path)
        hist = compute_histogram(image)
        rep, labels, fitted, result = _segment(cfg, job, image, hist)
    except (GmthreshError, ValueError, OSError) as exc:
        log.warning("trial %s/%s/%d failed: %s", job.image_id, job.algorithm, job.trial, exc)
        return TrialReport(job.image_id, job.algorithm, job.trial, job.seed,
                           error=f"{type(exc).__name__}: {exc}"), None
    if rep.error:
        log.warning("trial %s/%s/%d failed: %s", job.image_id, job.algorithm, job.trial, rep.error)
    artifacts = None
    if job.trial == 0:
        artifacts = (labels, fitted, hist, result)
    return rep, artifacts


def _run_job_packed(args):
    return _run_job(*args)


# -- corpus discovery --------------------------------------------------------

def discover_corpus(corpus_dir, ground_truth_dir=None) -> list[tuple[str, Path, Optional[Path]]]:
    corpus_dir = Path(corpus_dir)
    images = sorted(p for p in corpus_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not images:
        raise EmptyCorpusError(f"no .pgm/.png images in {corpus_dir}")
    out = []
    for p in images:
        mask = None
        if ground_truth_dir is not None:
            cands = [Path(ground_truth_dir) / (p.stem + s) for s in IMAGE_SUFFIXES]
            found = [c for c in cands if c.is_file()]
            if not found:
                raise MaskPairingError(f"no ground-truth mask for {p.name} in {ground_truth_dir}")
            mask = found[0]
        out.append((p.stem, p, mask))
    return out


# -- aggregation -------------------------------------------------------------

@dataclass(frozen=True)
class Summary:
    mean: Optional[float]
    std: Optional[float]
    n: int


def summarize(values) -> Summary:
    vals = [float(v) for v in values if v is not None]
    if not vals:
        return Summary(None, None, 0)
    arr = np.asarray(vals)
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return Summary(float(arr.mean()), std, arr.size)


def aggregate(reports: Sequence[TrialReport]) -> dict:
    """Mean and sample deviation (n-1) per algorithm and numeric field.

    Failed trials (nonempty ``error``) are excluded.  Fields that are never
    populated for an algorithm (e.g. Otsu's Hellinger distance) summarize to
    ``Summary(None, None, 0)``, rendered as NA.
    """
    if not reports:
        raise EmptyGroupError("no reports to aggregate")
    groups: dict[str, list[TrialReport]] = {}
    for r in reports:
        groups.setdefault(r.algorithm, []).append(r)
    stats = {}
    for alg, reps in groups.items():
        ok = [r for r in reps if not r.error]
        if not ok:
            raise EmptyGroupError(f"every {alg} trial failed")
        stats[alg] = {name: summarize(getattr(r, name) for r in ok) for name in NUMERIC_FIELDS}
    return stats


# -- output ------------------------------------------------------------------

def write_reports_csv(reports: Sequence[TrialReport], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        w.writeheader()
        for r in reports:
            w.writerow(r.to_row())


def read_reports_csv(path) -> list[TrialReport]:
    with open(path, newline="") as fh:
        return [TrialReport.from_row(row) for row in csv.DictReader(fh)]


def _fmt(v: Optional[float], digits: int = 4) -> str:
    if v is None:
        return "NA"
    if float(v).is_integer() and abs(v) >= 100:
        return str(int(v))
    return f"{v:.{digits}f}"


def stats_markdown(stats: dict, order: Sequence[str] = ALL_ALGORITHMS) -> str:
    algs = [a for a in order if a in stats] + [a for a in stats if a not in order]
    cols = [("hellinger", "Hellinger distance"), ("iterations", "Iterations"),
            ("evaluations", "Objective function evaluations"), ("wall_seconds", "Execution time (s)")]
    lines = ["## Optimization statistics", ""]
    lines.append("| Technique | " + " | ".join(f"{title} μ | {title} σ" for _, title in cols) + " |")
    lines.append("|---" * (1 + 2 * len(cols)) + "|")
    for a in algs:
        cells = []
        for key, _ in cols:
            s = stats[a][key]
            cells += [_fmt(s.mean), _fmt(s.std)]
        lines.append(f"| {a} | " + " | ".join(cells) + " |")
    lines += ["", "## Quality statistics", "", "| Technique | Hausdorff distance μ | Hausdorff distance σ |",
              "|---|---|---|"]
    for a in algs:
        s = stats[a]["hausdorff"]
        lines.append(f"| {a} | {_fmt(s.mean)} | {_fmt(s.std)} |")
    return "\n".join(lines) + "\n"


def overlay_svg(hist: Histogram, fitted: Optional[MixtureCandidate], thresholds: Sequence[float],
                title: str = "", width: int = 640, height: int = 360) -> str:
    """Histogram bars, fitted mixture curve and vertical threshold lines."""
    pad = 40
    g = np.arange(hist.levels)
    curve = mixture_pdf(fitted, g.astype(float)) if fitted is not None else np.zeros(hist.levels)
    top = max(float(hist.bins.max()), float(curve.max()), 1e-12) * 1.05
    sx = (width - 2 * pad) / (hist.levels - 1)
    sy = (height - 2 * pad) / top

    def px(x, y):
        return pad + x * sx, height - pad - y * sy

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{pad}" y="{pad / 2:.0f}" font-family="sans-serif" font-size="13">{title}</text>']
    bw = max(sx, 1.0)
    for x, h in zip(g, hist.bins):
        if h > 0:
            x0, y0 = px(x, h)
            parts.append(f'<rect x="{x0 - bw / 2:.2f}" y="{y0:.2f}" width="{bw:.2f}" '
                         f'height="{h * sy:.2f}" fill="#9bb7d4"/>')
    if fitted is not None:
        pts = " ".join("%.2f,%.2f" % px(x, y) for x, y in zip(g, curve))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#c0392b" stroke-width="1.5"/>')
    for t in thresholds:
        x0, _ = px(t, 0)
        parts.append(f'<line x1="{x0:.2f}" y1="{pad}" x2="{x0:.2f}" y2="{height - pad}" '
                     f'stroke="#222" stroke-dasharray="4 3"/>')
    x0, y0 = px(0, 0)
    x1, _ = px(hist.levels - 1, 0)
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# -- driver ------------------------------------------------------------------

def build_jobs(cfg: BenchConfig) -> list[_Job]:
    corpus = discover_corpus(cfg.corpus_dir, cfg.ground_truth_dir)
    jobs = []
    for image_id, path, mask in corpus:
        for alg in cfg.algorithms:
            for t in range(cfg.trials_per_image):
                jobs.append(_Job(image_id, path, mask, alg, t, trial_seed(cfg.base_seed, image_id, alg, t)))
    return jobs


def run_benchmark(cfg: BenchConfig) -> tuple[dict, list[TrialReport]]:
    """Run every (image, algorithm, trial) and write reports.csv, stats.md,
    trial-0 segmentations and (with ``cfg.plot``) SVG overlays."""
    jobs = build_jobs(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_job_packed, [(cfg, j) for j in jobs], chunksize=4))
    else:
        results = [_run_job(cfg, j) for j in jobs]

    alg_rank = {a: i for i, a in enumerate(cfg.algorithms)}
    paired = sorted(zip(jobs, results), key=lambda jr: (jr[0].image_id, alg_rank[jr[0].algorithm], jr[0].trial))
    reports = [rep for _, (rep, _) in paired]

    for job, (rep, artifacts) in paired:
        if artifacts is None:
            continue
        labels, fitted, hist, result = artifacts
        stem = f"{job.image_id}_{job.algorithm.lower()}"
        labels.write_pgm(out / f"{stem}.pgm")
        if cfg.plot:
            svg = overlay_svg(hist, fitted, rep.thresholds, title=f"{job.image_id} {job.algorithm}")
            (out / f"{stem}.svg").write_text(svg)
        if cfg.traces and result is not None:
            result.write_trace_csv(out / f"{stem}_trace.csv")

    write_reports_csv(reports, out / "reports.csv")
    stats = aggregate(reports)
    (out / "stats.md").write_text(stats_markdown(stats, cfg.algorithms))
    return stats, reports


def reports_equal_ignoring_timing(a: Sequence[TrialReport], b: Sequence[TrialReport]) -> bool:
    if len(a) != len(b):
        return False
    keep = [f.name for f in fields(TrialReport) if f.name not in TIMING_COLUMNS]
    return all(
        all(_same(getattr(x, k), getattr(y, k)) for k in keep) for x, y in zip(a, b)
    )


def _same(u, v) -> bool:
    if isinstance(u, float) and isinstance(v, float) and math.isnan(u) and math.isnan(v):
        return True
    return u == v
