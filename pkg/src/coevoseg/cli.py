"""Command line: ``segment``, ``synth`` and ``eval``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .ingest import IngestError, WindowConfig, load_csv
from .pipeline import SCHEMA_VERSION, RunConfig, RunResult, run, score_against_truth
from .synth import SynthSpec, generate
from .train import Hyperparams, TrainingDiverged

log = logging.getLogger("coevoseg")

EXIT_OK, EXIT_INPUT, EXIT_DIVERGED = 0, 1, 2


def _hidden(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--hidden expects comma-separated integers, got {text!r}")


def _write_csv(path, rows, header=None) -> None:
    rows = np.atleast_2d(rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _read_truth(path) -> dict:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    if d.get("schema_version") != SCHEMA_VERSION or "concept_labels" not in d:
        raise ValueError(f"{path}: not a truth file (schema_version {SCHEMA_VERSION} with concept_labels)")
    return d


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coevoseg", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    hp, wc = Hyperparams(), WindowConfig()
    s = sub.add_parser("segment", help="fit the model on a CSV series and report concept boundaries")
    s.add_argument("--input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--no-header", action="store_true", help="treat the first row as data")
    s.add_argument("--window", type=int, default=wc.window_len)
    s.add_argument("--stride", type=int, default=None, help="default: window // 4")
    s.add_argument("--normalize", choices=["zscore_per_channel", "none"], default=wc.normalize)
    s.add_argument("--latent", type=int, default=hp.latent_dim)
    s.add_argument("--hidden", type=_hidden, default=hp.hidden, help="comma-separated widths")
    s.add_argument("--activation", choices=["tanh", "relu"], default=hp.activation)
    s.add_argument("--unit-latent", action="store_true", help="rescale latent codes to unit norm")
    s.add_argument("--lambda1", type=float, default=hp.lambda1)
    s.add_argument("--lambda2", type=float, default=hp.lambda2)
    s.add_argument("--lambda3", type=float, default=hp.lambda3)
    s.add_argument("--epsilon", type=float, default=hp.epsilon)
    s.add_argument("--free-diagonal", action="store_true", help="do not force diag(theta) = 0")
    s.add_argument("--lr", type=float, default=hp.learning_rate)
    s.add_argument("--epochs", type=int, default=hp.epochs)
    s.add_argument("--pretrain-epochs", type=int, default=hp.pretrain_epochs)
    s.add_argument("--seed", type=int, default=hp.seed)
    s.add_argument("--peak-k", type=float, default=2.0)
    s.add_argument("--peak-min-distance", type=int, default=None, help="default: window / stride")
    s.add_argument("--tolerance", type=int, default=2, help="boundary match tolerance in windows")
    s.add_argument("--truth", help="truth JSON from `synth`; adds metrics to the output")
    s.add_argument("--dump-theta")
    s.add_argument("--dump-scores")
    s.set_defaults(func=cmd_segment)

    g = sub.add_parser("synth", help="generate a series with planted concept regimes")
    spec = SynthSpec()
    g.add_argument("--concepts", type=int, default=spec.num_concepts)
    g.add_argument("--segments", type=int, default=spec.num_segments)
    g.add_argument("--seg-min", type=int, default=spec.segment_len_range[0])
    g.add_argument("--seg-max", type=int, default=spec.segment_len_range[1])
    g.add_argument("--channels", type=int, default=spec.d)
    g.add_argument("--sines", type=int, default=spec.sines_per_concept)
    g.add_argument("--freq-min", type=float, default=spec.freq_range[0])
    g.add_argument("--freq-max", type=float, default=spec.freq_range[1])
    g.add_argument("--noise", type=float, default=spec.noise_std)
    g.add_argument("--seed", type=int, default=spec.seed)
    g.add_argument("--out", default="synth.csv")
    g.add_argument("--truth-out", help="default: <out>.truth.json")
    g.set_defaults(func=cmd_synth)

    e = sub.add_parser("eval", help="score a segment result against a synth truth file")
    e.add_argument("--pred", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--tolerance", type=int, default=2)
    e.set_defaults(func=cmd_eval)
    return p


def cmd_segment(args) -> int:
    try:
        cfg = RunConfig(
            window=WindowConfig(args.window, args.stride, args.normalize),
            hyper=Hyperparams(
                lambda1=args.lambda1,
                lambda2=args.lambda2,
                lambda3=args.lambda3,
                learning_rate=args.lr,
                epochs=args.epochs,
                pretrain_epochs=args.pretrain_epochs,
                seed=args.seed,
                latent_dim=args.latent,
                hidden=args.hidden,
                activation=args.activation,
                epsilon=args.epsilon,
                zero_diagonal=not args.free_diagonal,
                unit_latent=args.unit_latent,
            ),
            peak_k=args.peak_k,
            peak_min_distance=args.peak_min_distance,
            tolerance=args.tolerance,
        )
        cfg.peak_config()
        series = load_csv(args.input, has_header=False if args.no_header else None)
        labels = _read_truth(args.truth)["concept_labels"] if args.truth else None
    except (IngestError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT

    try:
        result, report = run(series, cfg, labels)
    except TrainingDiverged as exc:
        log.error("training diverged: %s", exc)
        return EXIT_DIVERGED
    except (IngestError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT

    try:
        Path(args.out).write_text(result.to_json(), encoding="utf-8")
        if args.dump_theta:
            _write_csv(args.dump_theta, report.theta.theta)
        if args.dump_scores:
            _write_csv(args.dump_scores, np.asarray(result.scores)[:, None], ["score"])
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_INPUT
    log.info("%d boundaries: %s", len(result.boundaries_time), result.boundaries_time)
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = SynthSpec(
        num_concepts=args.concepts,
        num_segments=args.segments,
        segment_len_range=(args.seg_min, args.seg_max),
        d=args.channels,
        sines_per_concept=args.sines,
        freq_range=(args.freq_min, args.freq_max),
        noise_std=args.noise,
        seed=args.seed,
    )
    try:
        res = generate(spec)
    except ValueError as exc:
        log.error("invalid synth spec: %s", exc)
        return EXIT_INPUT
    out = Path(args.out)
    truth_out = Path(args.truth_out) if args.truth_out else out.with_suffix(".truth.json")
    truth = {
        "schema_version": SCHEMA_VERSION,
        "T": res.series.T,
        "d": res.series.d,
        "true_boundaries": res.true_boundaries,
        "concept_sequence": res.concept_sequence,
        "concept_labels": res.concept_labels.tolist(),
        "spec": {**spec.__dict__, "segment_len_range": list(spec.segment_len_range), "freq_range": list(spec.freq_range)},
    }
    try:
        _write_csv(out, res.series.values, res.series.channel_names)
        truth_out.write_text(json.dumps(truth, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_INPUT
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        pred = RunResult.from_json(Path(args.pred).read_text(encoding="utf-8"))
        truth = _read_truth(args.truth)
        metrics = score_against_truth(
            pred.boundaries_window, pred.window_starts, pred.window_len, truth["concept_labels"], args.tolerance
        )
    except (OSError, ValueError, KeyError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    out = {k: metrics[k] for k in ("precision", "recall", "f1", "ari", "tolerance")}
    sys.stdout.write(json.dumps(out, sort_keys=True) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
