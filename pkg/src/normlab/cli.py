"""Command-line front end: list, run, predict, witness."""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import lab, measures


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="normlab",
        description="experiments on genericity along subsequences",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="show the scenario registry")

    p_run = sub.add_parser("run", help="run scenarios from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None, help="directory for reports")
    p_run.add_argument("--format", choices=("csv", "json"), default="json")

    p_pred = sub.add_parser(
        "predict", help="analytic values only, no simulation"
    )
    p_pred.add_argument("--config", required=True)

    p_wit = sub.add_parser("witness", help="spread-block witness search")
    p_wit.add_argument("--spec", required=True, help="measure config file")
    p_wit.add_argument("--out", default=None, help="certificate JSON path")

    args = parser.parse_args(argv)
    return {
        "list": _cmd_list,
        "run": _cmd_run,
        "predict": _cmd_predict,
        "witness": _cmd_witness,
    }[args.command](args)


def _cmd_list(args) -> int:
    registry = lab.list_scenarios()
    width = max(len(n) for n in registry)
    for name, info in registry.items():
        print(f"{name:<{width}}  {info['description']}")
        print(f"{'':<{width}}  [{info['reference']}]")
    return 0


def _cmd_run(args) -> int:
    raw = lab.parse_flat_config(args.config)
    if args.seed is not None:
        raw["seed"] = args.seed
    names = raw.get("scenario", "all")
    if names == "all":
        names = list(lab.list_scenarios())
    elif isinstance(names, str):
        names = [s.strip() for s in names.split(",")]
    configs = []
    for name in names:
        d = dict(raw)
        d["scenario"] = name
        configs.append(lab.config_from_dict(d))
    reports = lab.run_many(configs)
    all_ok = True
    for rep in reports:
        all_ok &= rep.passed
        status = "PASS" if rep.passed else "FAIL"
        print(f"[{status}] {rep.scenario}: {rep.verdict} "
              f"({rep.wall_clock_s:.2f}s)")
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            path = os.path.join(args.out, f"{rep.scenario}.{args.format}")
            lab.emit_report(rep, args.format, path)
            print(f"       report -> {path}")
    return 0 if all_ok else 1


def _cmd_predict(args) -> int:
    raw = lab.parse_flat_config(args.config)
    if "measure" not in raw:
        print("predict needs measure.* keys", file=sys.stderr)
        return 2
    mu = lab.measure_from_config(raw["measure"])
    out: dict = {"measure": raw["measure"]}
    block = tuple(raw.get("block", (1, 1) if isinstance(mu, measures.GaussCF)
                  else (0, 0)))
    gaps = tuple(raw.get("gaps", (0,) * (len(block) - 1)))
    sb = measures.SpreadBlock(block, gaps)
    tol = raw.get("tol", 1e-6)
    out["block"] = list(block)
    out["gaps"] = list(gaps)
    if isinstance(mu, measures.GaussCF):
        val, bound = measures.gauss_spread_measure(block, gaps, tol)
        out["spread_value"] = val
        out["spread_error_bound"] = bound
        out["cylinder_value"] = measures.cylinder_measure(mu, block)
    else:
        out["spread_value"] = measures.spread_cylinder_measure(mu, sb)
        out["cylinder_value"] = measures.cylinder_measure(mu, block)
    out["product_of_symbol_values"] = measures.product_of_symbol_measures(
        mu, block)
    if "set" in raw:
        nu = lab.derived_indicator_measure(raw["set"])
        if nu is None:
            out["restricted_prediction"] = None
        else:
            val, bound = measures.predicted_restricted_frequency(
                mu, nu, sb, tol)
            out["restricted_prediction"] = val
            out["restricted_error_bound"] = bound
    print(json.dumps(lab._round12(out), indent=2, sort_keys=True))
    return 0


def _cmd_witness(args) -> int:
    raw = lab.parse_flat_config(args.spec)
    if "measure" not in raw:
        print("witness needs measure.* keys", file=sys.stderr)
        return 2
    mu = lab.measure_from_config(raw["measure"])
    try:
        w = measures.find_witness(
            mu,
            k_max=raw.get("k_max", 4),
            box=raw.get("box", 8),
            eps_floor=raw.get("eps_floor", 1e-9),
            cap=raw.get("cap"),
        )
    except measures.NoWitnessError as exc:
        print(f"no witness: {exc}", file=sys.stderr)
        return 1
    payload = json.dumps(lab._round12(w.to_dict()), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
        print(f"certificate -> {args.out}")
    else:
        print(payload)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
