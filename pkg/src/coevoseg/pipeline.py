"""End-to-end run: windows -> fit -> boundary detection -> optional scoring."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .detect import PeakConfig, boundary_scores, find_peaks, map_to_time
from .ingest import SeriesMatrix, WindowConfig, make_windows, normalize
from .metrics import adjusted_rand_index, boundary_f1, segment_labels
from .synth import label_boundaries, window_labels
from .train import TERMS, Hyperparams, TrainReport, fit

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    window: WindowConfig = field(default_factory=WindowConfig)
    hyper: Hyperparams = field(default_factory=Hyperparams)
    peak_k: float = 2.0
    peak_min_distance: int | None = None  # None: one window length, in windows
    tolerance: int = 2

    def peak_config(self) -> PeakConfig:
        md = self.peak_min_distance
        if md is None:
            md = max(1, math.ceil(self.window.window_len / self.window.stride))
        return PeakConfig(min_distance=md, threshold_k=self.peak_k)

    def to_dict(self) -> dict:
        hyper = asdict(self.hyper)
        hyper["hidden"] = list(hyper["hidden"])
        return {
            "window": asdict(self.window),
            "hyper": hyper,
            "peak_k": self.peak_k,
            "peak_min_distance": self.peak_config().min_distance,
            "tolerance": self.tolerance,
        }


@dataclass
class RunResult:
    boundaries_window: list[int]
    boundaries_time: list[int]
    scores: list[float]
    window_starts: list[int]
    window_len: int
    loss_history: list[dict]
    final_losses: dict
    config: dict
    seed: int
    converged: bool
    metrics: dict | None = None
    schema_version: int = SCHEMA_VERSION
    version: str = __version__

    @property
    def n_windows(self) -> int:
        return len(self.window_starts)

    def to_json(self) -> str:
        d = asdict(self)
        if d["metrics"] is None:
            del d["metrics"]
        return json.dumps(d, sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunResult":
        d = json.loads(text)
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        d.setdefault("metrics", None)
        try:
            r = cls(**d)
        except TypeError as exc:
            raise ValueError(f"malformed run result: {exc}") from None
        if len(r.scores) != r.n_windows - 1:
            raise ValueError("scores length does not match window count")
        return r


def score_against_truth(boundaries, window_starts, window_len, concept_labels, tolerance=2) -> dict:
    """Boundary F1 and ARI in window coordinates against per-time-step concept labels."""
    labels = np.asarray(concept_labels)
    if window_starts[-1] + window_len > labels.size:
        raise ValueError("truth labels are shorter than the windowed series")
    truth_lab = window_labels(labels, window_starts, window_len)
    truth_b = label_boundaries(truth_lab)
    p, r, f1 = boundary_f1(boundaries, truth_b, tolerance)
    pred_lab = segment_labels(boundaries, len(window_starts))
    return {
        "precision": p,
        "recall": r,
        "f1": f1,
        "ari": adjusted_rand_index(pred_lab, truth_lab),
        "truth_boundaries_window": truth_b,
        "tolerance": tolerance,
    }


def run(series: SeriesMatrix, cfg: RunConfig = RunConfig(), concept_labels=None) -> tuple[RunResult, TrainReport]:
    windows = make_windows(normalize(series, cfg.window.normalize), cfg.window)
    report = fit(windows, cfg.hyper)
    y = boundary_scores(report.theta)
    seg = map_to_time(find_peaks(y, cfg.peak_config()), windows.window_starts, windows.window_len)
    history = [{k: h[k] for k in ("phase", "total", *TERMS)} for h in report.loss_history]
    result = RunResult(
        boundaries_window=seg.boundaries,
        boundaries_time=seg.time_boundaries,
        scores=[float(v) for v in y],
        window_starts=list(windows.window_starts),
        window_len=windows.window_len,
        loss_history=history,
        final_losses={k: report.final_losses[k] for k in TERMS},
        config=cfg.to_dict(),
        seed=cfg.hyper.seed,
        converged=report.converged,
    )
    if concept_labels is not None:
        result.metrics = score_against_truth(
            seg.boundaries, windows.window_starts, windows.window_len, concept_labels, cfg.tolerance
        )
    return result, report
