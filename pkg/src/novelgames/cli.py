"""Command-line front end.

    novelgames catalog generate --out catalog.json
    novelgames evaluate --catalog catalog.json --model subgoal-partial --k 20 --seed 7 --out results.csv
    novelgames features --catalog catalog.json --seed 7 --out features.csv
    novelgames fit-fun --features features.csv --ratings ratings.csv --out model.json
    novelgames simulate --spec "board 3x3; win 3" --first random --second random --games 1000
    novelgames report --results results.csv --external human.csv --out report.csv --plot report.svg

Exit status is 0 on success, 1 for data errors and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from .agents import POLICY_NAMES, policy_from_name
from .catalog import Catalog, CatalogError, generate_catalog, load_catalog, save_catalog, validate_catalog
from .core import GameSpec, SpecError, check_spec, replay, spec_from_json
from .dsl import DslSyntaxError, parse_spec
from .estimator import (
    DEFAULT_K,
    EstimatorConfig,
    Mode,
    OutcomeDistribution,
    advantage_vs_random,
    derive_rng,
    effective_board_size,
    estimate_outcomes,
    expected_length,
    expected_payoff,
    outcome_entropy,
    p_first_given_not_draw,
    simulate_game,
)
from .funmodel import (
    FeatureError,
    build_features,
    fit_ols,
    pearson_r,
    predict_fun,
    read_feature_rows,
    read_scores,
)

MODELS = {
    "subgoal-partial": ("subgoal", Mode.PARTIAL),
    "subgoal-full": ("subgoal", Mode.FULL),
    "random-partial": ("random", Mode.PARTIAL),
    "random-full": ("random", Mode.FULL),
    "lookahead5-full": ("lookahead5", Mode.FULL),
    "mcs-full": ("mcs", Mode.FULL),
}

RESULT_COLUMNS = ["game_id", "category", "first_wins", "second_wins", "draws", "k", "payoff",
                  "p_first_given_not_draw", "entropy_bits", "mean_length"]


class DataError(Exception):
    pass


def _tool_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(float(x))  # shortest text that reads back to the same double
    return str(x)


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def _write_manifest(out, args, started: float, catalog: Catalog | None = None, **config) -> None:
    manifest = {
        "command": sys.argv[1:] if args.argv is None else args.argv,
        "config": config,
        "seed": getattr(args, "seed", None),
        "catalog_sha256": catalog.digest() if catalog is not None else None,
        "tool_version": _tool_version(),
        "wall_clock_seconds": round(time.time() - started, 3),
    }
    _write(f"{out}.manifest.json", json.dumps(manifest, indent=2, default=str) + "\n")


def _load_catalog(path) -> Catalog:
    try:
        return load_catalog(path)
    except OSError as exc:
        raise DataError(f"cannot read catalog {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from None
    except CatalogError as exc:
        raise DataError(f"{path}: invalid catalog:\n" + "\n".join(exc.problems)) from None


def _load_spec(text: str) -> GameSpec:
    path = Path(text)
    try:
        is_file = path.is_file()
    except OSError:
        is_file = False
    game_id = "custom"
    if is_file:
        game_id = path.stem
        text = path.read_text(encoding="utf-8")
        if text.lstrip().startswith("{"):
            return check_spec(spec_from_json(json.loads(text)))
    return check_spec(parse_spec(text, game_id))


# -- catalog ----------------------------------------------------------------------

def cmd_catalog(args) -> int:
    if args.action == "generate":
        if not args.out:
            raise DataError("catalog generate needs --out")
        catalog = generate_catalog(args.seed)
        save_catalog(catalog, args.out)
        print(f"wrote {len(catalog)} games to {args.out}")
        return 0
    path = args.catalog or args.out
    if not path:
        raise DataError("catalog validate needs --catalog")
    catalog = _load_catalog(path)
    problems = validate_catalog(catalog)
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        return 1
    for category, n in catalog.counts.items():
        print(f"{n:4d}  {category}")
    print(f"ok: {len(catalog)} games")
    return 0


# -- evaluate ---------------------------------------------------------------------

def _evaluate_one(job):
    spec, category, model, k, seed = job
    policy_name, mode = MODELS[model]
    policy = policy_from_name(policy_name)
    dist, records = estimate_outcomes(spec, EstimatorConfig(policy, policy, k, mode, seed))
    mean_length = sum(r.length for r in records) / len(records)
    row = [spec.id, category, dist.first_wins, dist.second_wins, dist.draws, dist.k,
           expected_payoff(dist), p_first_given_not_draw(dist), outcome_entropy(dist), mean_length]
    return row, records


def _map(fn, jobs, workers: int):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(fn, jobs))


def cmd_evaluate(args) -> int:
    started = time.time()
    catalog = _load_catalog(args.catalog)
    jobs = [(e.spec, e.category, args.model, args.k, args.seed) for e in catalog]
    results = _map(_evaluate_one, jobs, args.workers)
    _write(args.out, _csv_text(RESULT_COLUMNS, [row for row, _ in results]))
    if args.trace:
        lines = [json.dumps(r.to_json()) for _, recs in results for r in recs]
        _write(f"{args.out}.trace.jsonl", "".join(line + "\n" for line in lines))
    _write_manifest(args.out, args, started, catalog, model=args.model, k=args.k)
    print(f"wrote {len(results)} rows to {args.out}")
    return 0


# -- features -------------------------------------------------------------------

def _features_one(job):
    spec, k, seed = job
    dist, _ = estimate_outcomes(spec, EstimatorConfig(num_simulations=k, master_seed=seed))
    return [spec.id, outcome_entropy(dist), advantage_vs_random(spec, k, seed),
            expected_length(spec, k, seed)]


def cmd_features(args) -> int:
    started = time.time()
    catalog = _load_catalog(args.catalog)
    external = None
    if args.external:
        external = _read_scores(args.external)
        ids = {e.id for e in catalog}
        unmatched = sorted(ids ^ set(external))
        if unmatched:
            raise DataError(f"external scores do not match catalog ids: {', '.join(unmatched)}")
    rows = _map(_features_one, [(e.spec, args.k, args.seed) for e in catalog], args.workers)
    header = ["game_id", "entropy_bits", "advantage", "expected_length"]
    if external is not None:
        header.append("external")
        rows = [row + [external[row[0]]] for row in rows]
    _write(args.out, _csv_text(header, rows))
    _write_manifest(args.out, args, started, catalog, k=args.k, external=args.external)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _read_scores(path, column=None, aggregate="mean"):
    try:
        return read_scores(path, column, aggregate)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None


# -- fit-fun ---------------------------------------------------------------------

def cmd_fit_fun(args) -> int:
    started = time.time()
    try:
        rows = read_feature_rows(args.features)
    except OSError as exc:
        raise DataError(f"cannot read {args.features}: {exc}") from None
    ratings = _read_scores(args.ratings, args.rating_column, args.aggregate)
    missing = [g for g in rows if g not in ratings]
    if missing:
        raise DataError(f"ratings missing for games: {', '.join(missing)}")
    columns = args.columns.split(",") if args.columns else None
    features = build_features(rows, columns)
    model = fit_ols(features, ratings)
    model.metadata = {"rating_aggregation": args.aggregate, "n_games": len(features.game_ids),
                      "features_file": str(args.features), "ratings_file": str(args.ratings)}
    model.save(args.out)
    pred_rows = []
    for gid in features.game_ids:
        pred_rows.append([gid, ratings[gid], predict_fun(model, rows[gid])])
    stem = str(args.out)[:-5] if str(args.out).endswith(".json") else str(args.out)
    _write(f"{stem}.predictions.csv", _csv_text(["game_id", "actual", "predicted"], pred_rows))
    _write_manifest(args.out, args, started, columns=features.columns, aggregate=args.aggregate)
    r = pearson_r([p[1] for p in pred_rows], [p[2] for p in pred_rows])
    print(f"n={len(pred_rows)} R^2={model.r_squared:.6f} r={r:.6f}")
    for name, w in model.weights.items():
        print(f"  {name:>16s} {w:+.6f}")
    print(f"  {'intercept':>16s} {model.intercept:+.6f}")
    return 0


# -- simulate --------------------------------------------------------------------

def cmd_simulate(args) -> int:
    started = time.time()
    spec = _load_spec(args.spec)
    first, second = policy_from_name(args.first), policy_from_name(args.second)
    size = effective_board_size(spec)
    records = []
    for i in range(args.games):
        rng = derive_rng(args.seed, spec.id, i, "simulate")
        cap = int(rng.integers(1, size + 1)) if args.mode == "partial" else size
        records.append(simulate_game(spec, first, second, cap, rng, sim_index=i))
    for rec in records:
        final = replay(spec, rec.moves)
        if final.status.is_terminal and final.status is not rec.outcome:
            raise DataError(f"trace {rec.sim_index} does not replay to its outcome")
    dist = OutcomeDistribution.from_statuses(r.outcome for r in records)
    summary = sys.stdout
    if args.trace:
        lines = "".join(json.dumps(r.to_json()) + "\n" for r in records)
        if args.out:
            _write(args.out, lines)
            _write_manifest(args.out, args, started, first=args.first, second=args.second,
                            games=args.games, mode=args.mode)
        else:
            sys.stdout.write(lines)
            summary = sys.stderr
    p = p_first_given_not_draw(dist)
    print(f"first_wins={dist.first_wins} second_wins={dist.second_wins} draws={dist.draws} "
          f"k={dist.k} payoff={expected_payoff(dist):.6f} "
          f"p_first_given_not_draw={'null' if p is None else f'{p:.6f}'} "
          f"entropy_bits={outcome_entropy(dist):.6f}", file=summary)
    return 0


# -- report ----------------------------------------------------------------------

def cmd_report(args) -> int:
    started = time.time()
    model_scores = _read_scores(args.results, args.column)
    human = _read_scores(args.external, args.external_column)
    missing = sorted(set(model_scores) - set(human))
    if missing:
        raise DataError(f"no judgement for games: {', '.join(missing)}")
    ids = list(model_scores)
    x = [model_scores[g] for g in ids]
    y = [human[g] for g in ids]
    r = pearson_r(x, y)
    print(f"n={len(ids)} r={r:.6f} R^2={r * r:.6f} ({args.column} vs {args.external})")
    if args.out:
        _write(args.out, _csv_text(["game_id", "model", "judgement"], zip(ids, x, y)))
        _write_manifest(args.out, args, started, column=args.column, r=r)
    if args.plot:
        from .plotting import scatter_with_fit

        scatter_with_fit(x, y, args.plot, xlabel=f"model {args.column}",
                         ylabel="judgement", title=f"r = {r:.3f}, n = {len(ids)}")
    return 0


# -- argument parsing --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="novelgames", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", help="generate or validate the game catalog")
    c.add_argument("action", choices=["generate", "validate"])
    c.add_argument("--catalog")
    c.add_argument("--out")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_catalog)

    e = sub.add_parser("evaluate", help="outcome estimates for every catalog game")
    e.add_argument("--catalog", required=True)
    e.add_argument("--model", required=True, choices=list(MODELS))
    e.add_argument("--k", type=int, default=DEFAULT_K)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", required=True)
    e.add_argument("--trace", action="store_true", help="also write <out>.trace.jsonl")
    e.add_argument("--workers", type=int, default=1)
    e.set_defaults(func=cmd_evaluate)

    f = sub.add_parser("features", help="entropy / advantage / length features per game")
    f.add_argument("--catalog", required=True)
    f.add_argument("--k", type=int, default=DEFAULT_K)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--external", help="CSV of game_id plus one score column to join")
    f.add_argument("--out", required=True)
    f.add_argument("--workers", type=int, default=1)
    f.set_defaults(func=cmd_features)

    r = sub.add_parser("fit-fun", help="regress fun ratings on features")
    r.add_argument("--features", required=True)
    r.add_argument("--ratings", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--columns", help="comma-separated feature columns (default: all)")
    r.add_argument("--rating-column")
    r.add_argument("--aggregate", choices=["mean", "median"], default="mean")
    r.set_defaults(func=cmd_fit_fun)

    s = sub.add_parser("simulate", help="play games between two policies")
    s.add_argument("--spec", required=True, help="DSL text, or a path to a DSL/JSON spec file")
    s.add_argument("--first", choices=POLICY_NAMES, default="subgoal")
    s.add_argument("--second", choices=POLICY_NAMES, default="subgoal")
    s.add_argument("--games", type=int, default=DEFAULT_K)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", choices=["full", "partial"], default="full")
    s.add_argument("--trace", action="store_true", help="emit one JSON trajectory per game")
    s.add_argument("--out", help="trace file (default: stdout)")
    s.set_defaults(func=cmd_simulate)

    q = sub.add_parser("report", help="correlate model estimates with external judgements")
    q.add_argument("--results", required=True)
    q.add_argument("--column", default="payoff")
    q.add_argument("--external", required=True)
    q.add_argument("--external-column")
    q.add_argument("--out")
    q.add_argument("--plot", help="scatter figure path (.svg, .png or .pdf)")
    q.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    for name in ("k", "games", "workers"):
        if getattr(args, name, 1) < 1:
            parser.error(f"--{name} must be >= 1")
    try:
        return args.func(args)
    except DslSyntaxError as exc:
        print("spec parse errors:\n" + "\n".join(str(e) for e in exc.errors), file=sys.stderr)
    except (DataError, SpecError, FeatureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
