"""Command-line interface: ``cqm <command> [options]``.

Errors are reported as a single ``CODE: message`` line on stderr with exit
status 1. Set ``CQM_LOG`` (e.g. ``CQM_LOG=debug``) for progress logging.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import io
from .calibration import SplitPlan, extract_features, make_splits, train_weights
from .errors import CqmError, FormatError, IONotFound, UnknownModel
from .evaluation import (
    CqmPredictor,
    ScorePredictor,
    WindowModelPredictor,
    anova_oneway,
    bench_per_segment,
    bench_prefix_model,
    evaluate_model,
    pcc,
    quantile_groups,
    rmse,
)
from .predictor import FEATURE_NAMES, DEFAULT_WEIGHTS, predict_curve, scores_from_features
from .synth import DEFAULT_LENGTHS, GeneratorSpec, generate_labeled_dataset, generate_trace
from .trace import QualityScale, SessionTrace
from .window import STAT_NAMES, MultiKTracker
from .wqm import MODELS, make_wqm

log = logging.getLogger("cqm")

ANALYSIS_WINDOWS_S = (10, 20, 30, 40, 50, 60)


# ------------------------------------------------------------------ options

def _parse_value(v: str):
    if "," in v:
        return [float(x) for x in v.split(",") if x.strip()]
    for conv in (int, float):
        try:
            return conv(v)
        except ValueError:
            pass
    return v


def _wqm_from_args(args, scale):
    params = {}
    name = "mean"
    if args.config:
        cfg = _load_json(args.config)
        wcfg = dict(cfg.get("wqm", {}))
        wcfg.update({k[4:]: v for k, v in cfg.items() if k.startswith("wqm.")})
        name = wcfg.pop("name", name)
        params.update(wcfg)
    if args.wqm:
        name = args.wqm
    for kv in args.wqm_param or []:
        if "=" not in kv:
            raise UnknownModel(f"--wqm-param expects key=value, got {kv!r}")
        k, v = kv.split("=", 1)
        params[k.strip()] = _parse_value(v.strip())
    return make_wqm(name, scale=scale, **params)


def _load_json(path):
    if not Path(path).is_file():
        raise IONotFound(f"no such file: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def _scale(args) -> QualityScale:
    lo, hi = (float(x) for x in args.scale.split(","))
    return QualityScale(lo, hi)


def _plan(args) -> SplitPlan:
    return SplitPlan(args.seed, args.repeats, Fraction(args.train_fraction))


def _weights(args):
    return io.read_weights(args.weights) if args.weights else None


def _out(args) -> Path:
    p = Path(args.out_dir)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _single_input(args):
    if not args.input:
        raise IONotFound("--input is required")
    return args.input[0]


# ----------------------------------------------------------------- commands

def cmd_predict(args):
    scale = _scale(args)
    wqm = _wqm_from_args(args, scale)
    weights = _weights(args) or DEFAULT_WEIGHTS
    out = _out(args)
    if not args.input:
        raise IONotFound("--input is required")
    for path in sorted(args.input):
        trace = io.read_trace_csv(path, scale)
        curve = predict_curve(trace, weights, wqm)
        if args.minutes_only:
            curve = curve.minutes()
        dest = out / f"{Path(path).stem}.curve.csv"
        io.write_curve_csv(curve, dest)
        log.info("wrote %s", dest)


def cmd_features(args):
    ds = io.read_manifest(_single_input(args))
    wqm = _wqm_from_args(args, ds.scale)
    samples = extract_features(ds, wqm)
    rows = [(str(i), it.source, it.length_s, it.mos, *fv.as_array())
            for i, (it, (fv, _)) in enumerate(zip(ds, samples))]
    io.write_csv(_out(args) / "features.csv",
                 ("item", "trace", "length_s", "mos") + FEATURE_NAMES, rows)


def cmd_train(args):
    ds = io.read_manifest(_single_input(args))
    wqm = _wqm_from_args(args, ds.scale)
    best, fits = train_weights(ds, wqm, _plan(args), nonneg=args.nonneg)
    out = _out(args)
    io.write_weights(best, out / "weights.json")
    io.write_csv(out / "train_splits.csv",
                 ("split", "train_rmse", "test_rmse", "test_pcc", "w1", "w2", "w3", "w4"),
                 ((f.split, f.train_rmse, f.test_rmse, f.test_pcc, *f.weights.as_array())
                  for f in fits))
    print(json.dumps(best.to_dict()))


def _read_external(path, n):
    rows = io.read_csv(path)
    scores = np.full(n, np.nan)
    try:
        for r in rows:
            scores[int(r["item"])] = float(r["score"])
    except (KeyError, ValueError, IndexError) as exc:
        raise FormatError(f"{path}: expected columns item,score ({exc})") from None
    if np.isnan(scores).any():
        raise FormatError(f"{path}: missing scores for some items")
    return scores


def cmd_eval(args):
    ds = io.read_manifest(_single_input(args))
    wqm = _wqm_from_args(args, ds.scale)
    splits = make_splits(len(ds), _plan(args))
    weights = _weights(args)
    longest = max((it.trace for it in ds), key=len)

    models = []
    if not args.no_baselines:
        for name in sorted(MODELS):
            models.append((WindowModelPredictor(ds, make_wqm(name, scale=ds.scale)), args.align))
    for spec in args.external or []:
        if "=" not in spec:
            raise FormatError(f"--external expects NAME=PATH, got {spec!r}")
        name, path = spec.split("=", 1)
        models.append((ScorePredictor(_read_external(path, len(ds)), name), args.align))
    cqm = CqmPredictor(ds, wqm, weights, nonneg=args.nonneg, name=f"CQM+{wqm.name}")
    models.append((cqm, False))

    out = _out(args)
    summary, split_rows = [], []
    for pred, align in models:
        rep = evaluate_model(ds, pred, splits, align=align)
        ms = None
        if args.bench and len(longest) >= 100:
            if isinstance(pred, CqmPredictor):
                ms = bench_per_segment(longest, weights or DEFAULT_WEIGHTS, wqm, warmup=60)
            elif isinstance(pred, WindowModelPredictor):
                ms = bench_prefix_model(longest, pred.wqm, warmup=60)
        summary.append((rep.name, rep.slope, rep.intercept, rep.pcc, rep.rmse, ms))
        split_rows += [(rep.name, r["split"], r["pcc"], r["rmse"], r["slope"], r["intercept"])
                       for r in rep.per_split]
        if args.by_length:
            io.write_csv(out / f"by_length_{rep.name}.csv", ("length_s", "pcc", "rmse", "n"),
                         ((k, *v) for k, v in sorted(rep.by_length.items())))
    header = ("model", "slope", "intercept", "pcc", "rmse", "ms_per_segment")
    io.write_csv(out / "summary.csv", header, summary)
    io.write_csv(out / "eval_splits.csv",
                 ("model", "split", "pcc", "rmse", "slope", "intercept"), split_rows)
    text = _table(header, summary)
    (out / "summary.txt").write_text(text, encoding="utf-8")
    print(text, end="")


def _table(header, rows):
    def cell(v, i):
        if v is None:
            return "-"
        if isinstance(v, str):
            return v
        return f"{v:.3f}" if i == 5 else f"{v:.2f}"
    cells = [list(header)] + [[cell(v, i) for i, v in enumerate(r)] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths)))
             for r in cells]
    return "\n".join(lines) + "\n"


def cmd_bench(args):
    scale = _scale(args)
    wqm = _wqm_from_args(args, scale)
    if args.input:
        trace = io.read_trace_csv(args.input[0], scale)
    else:
        trace = generate_trace(GeneratorSpec(seed=args.seed, n_sessions=1, length_s=args.segments,
                                             scale=scale))
    weights = _weights(args) or DEFAULT_WEIGHTS
    ms = bench_per_segment(trace, weights, wqm, warmup=args.warmup, incremental=args.incremental)
    print(f"ms_per_segment={ms:.3f} segments={len(trace)} wqm={wqm.name}")
    if args.out_dir:
        io.write_csv(_out(args) / "bench.csv", ("wqm", "segments", "warmup", "ms_per_segment"),
                     [(wqm.name, len(trace), args.warmup, round(ms, 3))])


def cmd_gen(args):
    scale = _scale(args)
    wqm = _wqm_from_args(args, scale)
    spec = GeneratorSpec(seed=args.seed, n_sessions=args.sessions, length_s=args.length,
                         stickiness=args.stickiness, jump=args.jump, scale=scale)
    lengths = [int(x) for x in args.lengths.split(",")] if args.lengths else DEFAULT_LENGTHS
    ds = generate_labeled_dataset(spec, _weights(args) or DEFAULT_WEIGHTS, wqm,
                                  noise_sigma=args.noise, lengths_s=lengths)
    out = _out(args)
    io.write_manifest(ds, out / "manifest.json")
    print(out / "manifest.json")


def cmd_report(args):
    ds = io.read_manifest(_single_input(args))
    wqm = _wqm_from_args(args, ds.scale)
    weights = _weights(args) or DEFAULT_WEIGHTS
    out = _out(args)

    # cumulative curves with MOS markers, one block per distinct trace
    labels = {}
    for it in ds:
        labels.setdefault(it.source, {})[round(it.length_s, 6)] = it.mos
    traces = {}
    for it in ds:
        traces.setdefault(it.source, it.trace)
    rows = []
    for src in sorted(traces):
        curve = predict_curve(traces[src], weights, wqm)
        if args.minutes_only:
            curve = curve.minutes()
        for t, v in curve.points:
            rows.append((src, t, v, labels[src].get(round(t, 6))))
    io.write_csv(out / "curves.csv", ("trace", "t_s", "cqm", "mos"), rows)

    samples = extract_features(ds, wqm)
    X = np.array([fv.as_array() for fv, _ in samples])
    mos = np.asarray(ds.mos)
    pred = scores_from_features(X, weights, ds.scale, ds.lengths)
    lengths = np.asarray(ds.lengths)
    by_len = []
    for L in np.unique(lengths):
        m = lengths == L
        try:
            r = pcc(pred[m], mos[m])
        except CqmError:
            r = float("nan")
        by_len.append((float(L), r, rmse(pred[m], mos[m]), int(m.sum())))
    io.write_csv(out / "by_length.csv", ("length_s", "pcc", "rmse", "n"), by_len)

    # window statistics per item and their quartile-grouped ANOVA against MOS
    stats_rows = []
    table = {(name, k): [] for name in STAT_NAMES for k in ANALYSIS_WINDOWS_S}
    for i, it in enumerate(ds):
        seq = it.sequence()
        tr = MultiKTracker([k for k in ANALYSIS_WINDOWS_S], wqm, seq.uniform_duration_s, seq.scale)
        tr.extend(seq.qualities)
        for k in ANALYSIS_WINDOWS_S:
            snap = tr.snapshot(k)
            vals = snap.stats() if snap else (None,) * 5
            stats_rows.append((str(i), it.source, it.length_s, k, *vals))
            for name, v in zip(STAT_NAMES, vals):
                table[(name, k)].append(v)
    io.write_csv(out / "window_stats.csv",
                 ("item", "trace", "length_s", "K_s") + STAT_NAMES, stats_rows)
    anova_rows = []
    for (name, k), vals in table.items():
        ok = [j for j, v in enumerate(vals) if v is not None]
        try:
            groups = quantile_groups([vals[j] for j in ok], mos[ok], args.quantiles)
            a = anova_oneway(groups)
            anova_rows.append((name, k, a.F, a.df_between, a.df_within, a.p, a.eta_p2))
        except CqmError as exc:
            log.info("anova skipped for %s/%s: %s", name, k, exc)
            anova_rows.append((name, k, None, None, None, None, None))
    io.write_csv(out / "anova.csv",
                 ("statistic", "K_s", "F", "df_between", "df_within", "p", "eta_p2"), anova_rows)


COMMANDS = {
    "predict": cmd_predict,
    "features": cmd_features,
    "train": cmd_train,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "gen": cmd_gen,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", nargs="+", help="trace CSV(s) or dataset manifest")
    common.add_argument("--out-dir", default=".")
    common.add_argument("--weights", help="weights JSON")
    common.add_argument("--wqm", choices=sorted(MODELS), help="window quality model (default mean)")
    common.add_argument("--wqm-param", action="append", metavar="K=V",
                        help="window model parameter, e.g. alpha=0.5 or value_weights=1,2,3,4")
    common.add_argument("--config", help="JSON config with wqm.* keys")
    common.add_argument("--scale", default="1,5", help="quality scale lo,hi for bare traces")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--repeats", type=int, default=50)
    common.add_argument("--train-fraction", default="0.5")
    common.add_argument("--align", action="store_true")
    common.add_argument("--nonneg", action="store_true")
    common.add_argument("--by-length", action="store_true")
    common.add_argument("--minutes-only", action="store_true")

    p = argparse.ArgumentParser(prog="cqm", description="Cumulative quality estimation toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("predict", "features", "train", "report"):
        sp = sub.add_parser(name, parents=[common])
        if name == "report":
            sp.add_argument("--quantiles", type=int, default=4)
    sp = sub.add_parser("eval", parents=[common])
    sp.add_argument("--external", action="append", metavar="NAME=PATH",
                    help="external model scores CSV with columns item,score")
    sp.add_argument("--bench", action="store_true", help="fill the ms_per_segment column")
    sp.add_argument("--no-baselines", action="store_true")
    sp = sub.add_parser("bench", parents=[common])
    sp.add_argument("--segments", type=int, default=3600)
    sp.add_argument("--warmup", type=int, default=100)
    sp.add_argument("--incremental", action="store_true")
    sp.set_defaults(out_dir=None)
    sp = sub.add_parser("gen", parents=[common])
    sp.add_argument("--sessions", type=int, default=12)
    sp.add_argument("--length", type=int, default=360)
    sp.add_argument("--lengths", help="comma-separated rated prefix lengths in seconds")
    sp.add_argument("--stickiness", type=float, default=0.7)
    sp.add_argument("--jump", type=float, default=0.0)
    sp.add_argument("--noise", type=float, default=0.0)
    return p


def main(argv=None) -> int:
    level = os.environ.get("CQM_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except CqmError as exc:
        msg = " ".join(str(exc).split())
        print(f"{exc.code}: {msg}", file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError) as exc:
        msg = " ".join(str(exc).split())
        print(f"E_INVALID_ARGUMENT: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
