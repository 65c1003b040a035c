"""Command-line interface.

Subcommands: synth (generate synthetic data), importance (rank
predictors), fit (train one model), predict (score a query file),
compare (full model comparison), map (prediction grid + residuals).
Failures exit nonzero with a one-line machine-readable JSON error on
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from .data import (
    generate_synthetic,
    hedonic_records,
    load_csv,
    load_query_csv,
    load_schema,
    table_schema,
    write_csv,
    write_records,
)
from .ensemble import fit_lsboost, predictor_importance
from .errors import CwregError, ParameterError
from .evaluate import (
    ComparisonConfig,
    export_maps,
    fit_model,
    run_batch,
    run_comparison,
)
from .models import load_model, save_model

SYNTH_REGIMES = ("geo", "attr", "mixed", "hedonic")


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as JSON on stderr."""

    def error(self, message):
        _emit_error("UsageError", message)
        raise SystemExit(2)


def _emit_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _write_json(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _load_table(args):
    schema = load_schema(args.schema) if args.schema else None
    table, report = load_csv(args.data, schema)
    if report.rejections:
        print(f"ingestion: accepted {report.accepted_rows} of "
              f"{report.total_rows} rows "
              f"({report.rejected_rows} rejected)", file=sys.stderr)
        for line, reason in report.rejections:
            print(f"  line {line}: {reason}", file=sys.stderr)
    return table


def _parse_r(text):
    if text == "search":
        return "search"
    try:
        return float(text)
    except ValueError:
        raise ParameterError(f'--r must be a number or "search", got {text!r}')


def _parse_bandwidth(text):
    if text == "cv":
        return "cv"
    try:
        return float(text)
    except ValueError:
        raise ParameterError(f'--bandwidth must be a number or "cv", got {text!r}')


def cmd_synth(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            conf = json.load(fh)
        regime = conf.get("regime", args.regime)
        n = int(conf.get("n", args.n))
        sigma = float(conf.get("sigma", args.sigma))
        seed = int(conf.get("seed", args.seed))
        params = conf.get("params", {})
    else:
        regime, n, sigma, seed, params = (args.regime, args.n, args.sigma,
                                          args.seed, {})
    if regime not in SYNTH_REGIMES:
        raise ParameterError(
            f"unknown regime {regime!r}, expected one of {SYNTH_REGIMES}"
        )
    if regime == "hedonic":
        records, schema = hedonic_records(n=n, seed=seed, sigma=sigma
                                          if sigma is not None else 10.0)
        write_records(records, args.out)
        truth_doc = None
    else:
        table, truth = generate_synthetic(regime, n=n, sigma=sigma, seed=seed,
                                          **params)
        write_csv(table, args.out)
        schema = table_schema(table)
        truth_doc = {
            "regime": truth.regime,
            "params": truth.params,
            "intercepts": truth.intercepts.tolist(),
            "slopes": truth.slopes.tolist(),
        }
    if args.schema_out:
        _write_json(schema, args.schema_out)
    if args.truth_out:
        if truth_doc is None:
            raise ParameterError("--truth-out is not available for hedonic data")
        _write_json(truth_doc, args.truth_out)
    print(f"wrote {args.out} ({regime}, n={n}, sigma={sigma}, seed={seed})")
    return 0


def cmd_importance(args) -> int:
    table = _load_table(args)
    ensemble = fit_lsboost(
        table.covariates, table.y,
        n_trees=args.trees, shrinkage=args.shrinkage,
        max_depth=args.depth, min_leaf=args.min_leaf,
        feature_names=table.covariate_names,
    )
    report = predictor_importance(ensemble)
    if report.uninformative:
        print("warning: ensemble never split; importances are all zero",
              file=sys.stderr)
    for rank, i in enumerate(report.order, start=1):
        print(f"{rank:3d}  {report.names[i]:<24s} "
              f"raw={report.raw[i]:.6g}  normalized={report.normalized[i]:.4f}")
    if args.out:
        report.to_csv(args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_fit(args) -> int:
    table = _load_table(args)
    config = ComparisonConfig(
        models=(args.model,),
        seed=args.seed,
        r=_parse_r(args.r),
        bandwidth=_parse_bandwidth(args.bandwidth),
        knn=args.knn,
        predict_mode=args.predict_mode,
        scoring="insample" if args.strict_paper_scoring else "loo",
        attribute_columns=(tuple(args.attribute_columns.split(","))
                           if args.attribute_columns else None),
        boost_trees=args.trees,
        boost_shrinkage=args.shrinkage,
        boost_max_depth=args.depth,
        boost_min_leaf=args.min_leaf,
    )
    model, params = fit_model(args.model, table, config)
    save_model(model, args.out)
    summary = " ".join(f"{k}={v}" for k, v in params.items())
    print(f"fitted {args.model} on {table.n} records; {summary}".rstrip("; "))
    print(f"wrote {args.out}")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    ids, coords, covariates = load_query_csv(args.query, model.covariate_names)
    predictions = model.predict(coords, covariates)
    lines = [["id", "u", "v", "predicted"]]
    for i, rid in enumerate(ids):
        lines.append([rid, repr(float(coords[i, 0])), repr(float(coords[i, 1])),
                      repr(float(predictions[i]))])
    if args.out:
        import csv as _csv
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            _csv.writer(fh).writerows(lines)
        print(f"wrote {args.out} ({len(ids)} predictions)")
    else:
        for row in lines:
            print(",".join(str(c) for c in row))
    return 0


def cmd_compare(args) -> int:
    config = ComparisonConfig(
        models=tuple(args.models.split(",")),
        seed=args.seed,
        train_fraction=args.train_frac,
        r=_parse_r(args.r),
        bandwidth=_parse_bandwidth(args.bandwidth),
        knn=args.knn,
        predict_mode=args.predict_mode,
        scoring="insample" if args.strict_paper_scoring else "loo",
        select_top_k=args.select_factors,
        boost_trees=args.trees,
        boost_shrinkage=args.shrinkage,
        boost_max_depth=args.depth,
        boost_min_leaf=args.min_leaf,
    )
    if args.manifest:
        import os
        with open(args.manifest, encoding="utf-8") as fh:
            manifest = json.load(fh)
        summary = run_batch(manifest, config,
                            base_dir=os.path.dirname(os.path.abspath(args.manifest)))
        text = json.dumps(summary, indent=2) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
            for case in summary["cases"]:
                rmses = " ".join(f"{m}={v:.4g}" if v is not None else f"{m}=failed"
                                 for m, v in case["models"].items())
                print(f"{case['name']}: {rmses}")
            print(f"wrote {args.out}")
        else:
            sys.stdout.write(text)
        return 0
    if not args.data:
        raise ParameterError("compare needs --data or --manifest")
    table = _load_table(args)
    report = run_comparison(table, config)
    if args.out:
        report.save(args.out)
        for name in config.models:
            res = report.results[name]
            if res.ok:
                print(f"{name:8s} rmse={res.rmse:.6g} "
                      f"runtime={res.runtime:.2f}s "
                      + " ".join(f"{k}={v}" for k, v in res.params.items()))
            else:
                print(f"{name:8s} FAILED: {res.error}")
        for a, row in report.improvements.items():
            for b, pct in row.items():
                if pct is not None:
                    print(f"improvement {a} over {b}: {pct:.2f}%")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(report.to_json())
    return 0


def cmd_map(args) -> int:
    model = load_model(args.model)
    table = _load_table(args)
    export = export_maps(model, table, (args.nx, args.ny), args.out_prefix)
    print(f"wrote {export.grid_path} ({export.grid_coords.shape[0]} grid points)")
    print(f"wrote {export.residual_path} ({export.n_residuals} residual rows)")
    return 0


def _add_data_flags(p, required=True):
    p.add_argument("--data", required=required, help="dataset CSV path")
    p.add_argument("--schema", default=None,
                   help="schema JSON path (default: built-in house-price schema)")


def _add_boost_flags(p):
    p.add_argument("--trees", type=int, default=100,
                   help="boosting stages (default 100)")
    p.add_argument("--shrinkage", type=float, default=0.1,
                   help="boosting learning rate (default 0.1)")
    p.add_argument("--depth", type=int, default=3,
                   help="tree depth (default 3)")
    p.add_argument("--min-leaf", type=int, default=5, dest="min_leaf",
                   help="minimum records per leaf (default 5)")


def _add_model_flags(p):
    p.add_argument("--r", default="search",
                   help='blend ratio in [0, 1] or "search" (default)')
    p.add_argument("--bandwidth", default="cv",
                   help='kernel bandwidth or "cv" (default)')
    p.add_argument("--knn", type=int, default=3,
                   help="neighbors for coefficient averaging (default 3)")
    p.add_argument("--predict-mode", choices=("knn-coef", "local-fit"),
                   default="knn-coef", dest="predict_mode")
    p.add_argument("--strict-paper-scoring", action="store_true",
                   dest="strict_paper_scoring",
                   help="judge blend-ratio candidates by in-sample training "
                        "RMSE instead of leave-one-out RMSE")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cwreg",
                     description="Spatial regression with blended "
                                 "geographic/attribute kernel weights.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset",
                       description="Generate a synthetic dataset CSV.")
    p.add_argument("--regime", choices=SYNTH_REGIMES, default="geo")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None,
                   help="JSON config overriding the flags above")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--schema-out", default=None, dest="schema_out",
                   help="also write the matching schema JSON here")
    p.add_argument("--truth-out", default=None, dest="truth_out",
                   help="also write ground-truth coefficients here")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("importance", help="rank predictors by split gain")
    _add_data_flags(p)
    _add_boost_flags(p)
    p.add_argument("--out", default=None, help="importance CSV path")
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("fit", help="train one model and save it")
    _add_data_flags(p)
    p.add_argument("--model", choices=("ols", "gwr", "cwr", "lsboost"),
                   default="cwr")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--attribute-columns", default=None, dest="attribute_columns",
                   help="comma-separated attribute-distance columns "
                        "(default: all continuous covariates)")
    _add_model_flags(p)
    _add_boost_flags(p)
    p.add_argument("--out", required=True, help="model JSON path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="score a query CSV with a saved model")
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--query", required=True,
                   help="CSV with u, v and the model's covariate columns")
    p.add_argument("--out", default=None, help="predictions CSV path")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("compare", help="train and score every model")
    _add_data_flags(p, required=False)
    p.add_argument("--manifest", default=None,
                   help="JSON manifest of named cases (batch mode)")
    p.add_argument("--models", default="ols,gwr,cwr,lsboost",
                   help="comma-separated model list")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-frac", type=float, default=0.8, dest="train_frac")
    p.add_argument("--select-factors", type=int, default=None,
                   dest="select_factors", metavar="K",
                   help="keep only the top K covariates by importance")
    _add_model_flags(p)
    _add_boost_flags(p)
    p.add_argument("--out", default=None, help="report JSON path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("map", help="export a prediction grid and residuals")
    p.add_argument("--model", required=True, help="model JSON path")
    _add_data_flags(p)
    p.add_argument("--nx", type=int, default=25, help="grid points along u")
    p.add_argument("--ny", type=int, default=25, help="grid points along v")
    p.add_argument("--out-prefix", required=True, dest="out_prefix",
                   help="output prefix for <prefix>_grid.csv and "
                        "<prefix>_residuals.csv")
    p.set_defaults(func=cmd_map)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CwregError as err:
        _emit_error(type(err).__name__, str(err))
        return 1
    except OSError as err:
        _emit_error("OSError", str(err))
        return 1


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
