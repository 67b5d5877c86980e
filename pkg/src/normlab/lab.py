"""Scenario runner: wires streams, selections, counting and predictions
into reproducible experiment reports.

Each scenario samples seeded trajectories, restricts them along a
selection, counts, and pairs every measured value with an analytic
prediction (or an explicit no-prediction marker).  Reports are
deterministic given the config; float fields are rounded to 12
significant digits at assembly so emitted files are byte-stable and
round-trip to equal reports.

Verdicts say "consistent with": finitely many seeds sample the
universally quantified statements, they do not verify them.
"""
from __future__ import annotations

import ast
import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import empirics, measures, selectors, sources

WORKERS_ENV = "NORMLAB_WORKERS"


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

class ConfigError(ValueError):
    pass


_BASE_KEYS = {
    "scenario", "n", "seed", "seeds", "ks", "cap", "tolerance",
    "destruction_margin", "checkpoints", "block", "gaps", "k_max", "box",
    "eps_floor", "tol",
}
_MEASURE_KEYS = {"kind", "weights", "transition", "labels", "pattern", "p"}
_SET_KEYS = {
    "kind", "first", "step", "support", "probs", "fixed_gap", "choices",
    "first_gap", "p", "base", "factor", "seed",
}


@dataclass
class ExperimentConfig:
    scenario: str
    n: int = 1_000_000
    seed: int = 17
    seeds: int = 5
    ks: tuple = (2,)
    cap: int = 100
    tolerance: float | None = None
    destruction_margin: float = 0.01
    checkpoints: tuple | None = None
    measure: dict | None = None       # flat descriptor, kind + parameters
    selection: dict | None = None

    def __post_init__(self):
        self.ks = tuple(int(k) for k in self.ks)
        if self.n < max(self.ks, default=1):
            raise ConfigError("prefix length n must be at least max k")
        if self.seeds < 1:
            raise ConfigError("need at least one seed")

    def seed_list(self):
        return [self.seed + i for i in range(self.seeds)]

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: v for k, v in d.items() if v is not None}


def parse_flat_config(path: str) -> dict:
    """Flat `key = value` file; values are Python literals or bare strings.

    Dotted keys group into sub-dicts (measure.kind, set.first, ...).
    Unknown keys are errors, not warnings.
    """
    out: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            try:
                value = ast.literal_eval(value)
            except (ValueError, SyntaxError):
                pass  # bare string
            if "." in key:
                head, sub = key.split(".", 1)
                out.setdefault(head, {})[sub] = value
            else:
                out[key] = value
    _validate_keys(out, path)
    return out


def _validate_keys(cfg: dict, origin: str):
    unknown = {k for k in cfg if k not in _BASE_KEYS | {"measure", "set"}}
    if unknown:
        raise ConfigError(f"{origin}: unknown keys {sorted(unknown)}")
    for group, allowed in (("measure", _MEASURE_KEYS), ("set", _SET_KEYS)):
        sub = cfg.get(group)
        if sub is None:
            continue
        if not isinstance(sub, dict):
            raise ConfigError(f"{origin}: {group}.* entries expected")
        bad = set(sub) - allowed
        if bad:
            raise ConfigError(f"{origin}: unknown {group} keys {sorted(bad)}")


def config_from_dict(d: dict) -> ExperimentConfig:
    d = dict(d)
    if "scenario" not in d:
        raise ConfigError("config needs a scenario key")
    kwargs = {"scenario": d.pop("scenario")}
    renames = {"set": "selection"}
    for key, value in d.items():
        kwargs[renames.get(key, key)] = tuple(value) if isinstance(value, list) else value
    allowed = set(ExperimentConfig.__dataclass_fields__)
    bad = set(kwargs) - allowed
    if bad:
        raise ConfigError(f"unknown config fields {sorted(bad)}")
    return ExperimentConfig(**kwargs)


def measure_from_config(d: dict) -> measures.MeasureSpec:
    kind = d.get("kind")
    if kind == "bernoulli":
        if "p" in d:
            return measures.Bernoulli(sources.GeometricWeights(d["p"]))
        return measures.Bernoulli(tuple(d["weights"]))
    if kind == "markov":
        labels = tuple(d["labels"]) if "labels" in d else None
        return measures.Markov(tuple(map(tuple, d["transition"])), labels)
    if kind == "gauss_cf":
        return measures.GaussCF()
    if kind == "periodic":
        return measures.Periodic(tuple(d["pattern"]))
    raise ConfigError(f"unknown measure kind {kind!r}")


def selection_from_config(d: dict, default_seed: int = 0) -> selectors.SelectionSet:
    kind = d.get("kind")
    seed = d.get("seed", default_seed)
    if kind == "arithmetic_progression":
        return selectors.arithmetic_progression(d["first"], d["step"])
    if kind == "iid_gaps":
        rule = selectors.IIDGaps(tuple(d["support"]), tuple(d["probs"]))
        return selectors.gap_process_set(rule, seed)
    if kind == "alternating_gaps":
        rule = selectors.AlternatingGaps(
            d.get("fixed_gap", 2), tuple(d.get("choices", (4, 8))),
            d.get("first_gap", "random"),
        )
        return selectors.gap_process_set(rule, seed)
    if kind == "coin_membership":
        return selectors.gap_process_set(selectors.CoinMembership(d["p"]), seed)
    if kind == "power_intervals":
        return selectors.power_intervals(d.get("base", 4), d.get("factor", 2))
    if kind == "power_runs":
        return selectors.power_runs(d.get("base", 4))
    if kind == "powers":
        return selectors.powers_of(d.get("base", 2))
    if kind == "gh_support":
        return selectors.support_set(sources.garcia_hedlund_stream())
    raise ConfigError(f"unknown set kind {kind!r}")


def derived_indicator_measure(d: dict) -> measures.MeasureSpec | None:
    """Law of the indicator sequence of the selection, when known in
    closed form; None means predictions are skipped."""
    kind = d.get("kind")
    if kind == "arithmetic_progression":
        step = d["step"]
        return measures.Periodic((1,) + (0,) * (step - 1))
    if kind == "iid_gaps":
        support = tuple(d["support"])
        probs = tuple(d["probs"])
        m = max(support)
        if m == 1:
            return measures.Periodic((1,))
        T = [[0.0] * m for _ in range(m)]
        for g, p in zip(support, probs):
            T[0][g - 1] += p
        for r in range(1, m):
            T[r][r - 1] = 1.0
        labels = (1,) + (0,) * (m - 1)
        return measures.Markov(tuple(map(tuple, T)), labels)
    if kind == "coin_membership":
        p = d["p"]
        return measures.Bernoulli((1.0 - p, p))
    return None


def sample_stream(spec: measures.MeasureSpec, seed: int) -> sources.SymbolStream:
    """Fresh seeded trajectory that is a.s. (or exactly) generic for spec."""
    if isinstance(spec, measures.Bernoulli):
        return sources.bernoulli_stream(spec.weights, seed)
    if isinstance(spec, measures.Markov):
        return sources.markov_stream(spec.transition, seed=seed, labels=spec.labels)
    if isinstance(spec, measures.GaussCF):
        return sources.gauss_digit_stream(seed)
    if isinstance(spec, measures.Periodic):
        return sources.periodic_stream(spec.pattern)
    if isinstance(spec, measures.Product):
        ss = np.random.SeedSequence(seed).spawn(2)
        s1 = int(ss[0].generate_state(1)[0])
        s2 = int(ss[1].generate_state(1)[0])
        return sources.product_stream(
            sample_stream(spec.first, s1), sample_stream(spec.second, s2)
        )
    raise TypeError(f"cannot sample {spec!r}")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class Measurement:
    name: str
    value: float
    predicted: float | None = None
    provenance: str = "none"  # analytic | truncated-sum | exact | none
    bound: float = 0.0
    tolerance: float | None = None
    passed: bool | None = None

    def __post_init__(self):
        if self.predicted is None and self.provenance != "none":
            raise ValueError("prediction provenance without a predicted value")


@dataclass
class ExperimentReport:
    scenario: str
    config: dict
    measurements: list
    series: dict = field(default_factory=dict)
    verdict: str = ""
    passed: bool = True
    wall_clock_s: float = 0.0

    def measurement(self, name: str) -> Measurement:
        for m in self.measurements:
            if m.name == name:
                return m
        raise KeyError(name)


def _round12(x):
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: _round12(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round12(v) for v in x]
    return x


def _finish(scenario, cfg, ms, series, verdict, t0) -> ExperimentReport:
    ms = [Measurement(**_round12(asdict(m))) for m in ms]
    series = {k: _round12(v) for k, v in series.items()}
    passed = all(m.passed is not False for m in ms)
    return ExperimentReport(
        scenario, _round12(cfg.to_dict()), ms, series, verdict, passed,
        _round12(time.perf_counter() - t0),
    )


def emit_report(report: ExperimentReport, fmt: str, path: str):
    """Write a report; identical reports produce byte-identical files."""
    if fmt == "json":
        payload = {
            "scenario": report.scenario,
            "config": report.config,
            "measurements": [asdict(m) for m in report.measurements],
            "series": report.series,
            "verdict": report.verdict,
            "passed": report.passed,
            "wall_clock_s": report.wall_clock_s,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    elif fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["section", "name", "value", "predicted", "provenance",
                        "bound", "tolerance", "passed"])
            w.writerow(["meta", "scenario", report.scenario, "", "", "", "", ""])
            w.writerow(["meta", "verdict", report.verdict, "", "", "", "",
                        report.passed])
            for m in sorted(report.measurements, key=lambda m: m.name):
                w.writerow(["measurement", m.name, m.value,
                            "" if m.predicted is None else m.predicted,
                            m.provenance, m.bound,
                            "" if m.tolerance is None else m.tolerance,
                            "" if m.passed is None else m.passed])
            for name in sorted(report.series):
                for n, v in report.series[name]:
                    w.writerow(["series", name, n, v, "", "", "", ""])
    else:
        raise ValueError(f"unknown format {fmt!r}")


def report_from_json(path: str) -> ExperimentReport:
    with open(path) as fh:
        payload = json.load(fh)
    return ExperimentReport(
        payload["scenario"], payload["config"],
        [Measurement(**m) for m in payload["measurements"]],
        payload["series"], payload["verdict"], payload["passed"],
        payload["wall_clock_s"],
    )


def stat_tolerance(windows: int) -> float:
    """Generous CLT band for one empirical frequency: 4 / sqrt(windows)."""
    return 4.0 / math.sqrt(max(windows, 1))


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

def _restricted_prefix(x: sources.SymbolStream, S: selectors.SelectionSet, n: int):
    length = S.count_upto(n)
    return selectors.restrict(x, S).prefix(length)


def _defect_measurements(cfg, spec, S, name_prefix, *, simple_too=False):
    """Normality defects of restricted samples, one per seed and k."""
    ms = []
    cap = cfg.cap if measures.is_countable(spec) else None
    for seed in cfg.seed_list():
        x = sample_stream(spec, seed)
        xs = _restricted_prefix(x, S, cfg.n)
        for k in cfg.ks:
            tol = cfg.tolerance or stat_tolerance(len(xs) - k + 1)
            d = empirics.normality_defect(xs, spec, k, cap)
            ms.append(Measurement(
                f"{name_prefix}defect_k{k}_seed{seed}", d, 0.0, "analytic",
                0.0, tol, d < tol,
            ))
        if simple_too:
            tol = cfg.tolerance or stat_tolerance(len(xs))
            d = empirics.simple_normality_defect(xs, spec, cap)
            ms.append(Measurement(
                f"{name_prefix}simple_defect_seed{seed}", d, 0.0, "analytic",
                0.0, tol, d < tol,
            ))
    return ms


def _scn_wall(cfg):
    spec = measures.Bernoulli((0.5, 0.5)) if cfg.measure is None \
        else measure_from_config(cfg.measure)
    sel_d = cfg.selection or {"kind": "arithmetic_progression", "first": 1, "step": 3}
    S = selection_from_config(sel_d, cfg.seed)
    ms = _defect_measurements(cfg, spec, S, "")
    ok = all(m.passed for m in ms)
    verdict = "preserved (consistent with theorem)" if ok else \
        "defect above tolerance"
    return ms, {}, verdict


def _scn_kamae_weiss(cfg):
    cfg.selection = cfg.selection or {"kind": "gh_support"}
    return _scn_wall(cfg)


def _destruction_measurements(cfg, mu, sel_d, witness, label=""):
    """Measured vs predicted spread-pattern frequency along one selection."""
    S = selection_from_config(sel_d, cfg.seed + 1000)
    nu = derived_indicator_measure(sel_d)
    sb = witness.spread_block()
    pattern = empirics.WildcardPattern.from_spread(sb.symbols, sb.gaps)
    if nu is not None:
        predicted, bound = measures.predicted_restricted_frequency(
            mu, nu, sb, tol=2e-6
        )
        provenance = "truncated-sum" if bound > 0 else "analytic"
    else:
        predicted, bound, provenance = None, 0.0, "none"
    ms = []
    series = {}
    for seed in cfg.seed_list():
        x = sample_stream(mu, seed)
        xs = _restricted_prefix(x, S, cfg.n)
        tol = cfg.tolerance or stat_tolerance(len(xs) - sb.span + 1)
        f = empirics.pattern_frequency(xs, pattern)
        ms.append(Measurement(
            f"{label}restricted_pattern_freq_seed{seed}", f, predicted,
            provenance, bound, tol,
            None if predicted is None else abs(f - predicted) <= tol + bound,
        ))
        gap = witness.value - f
        ms.append(Measurement(
            f"{label}destruction_gap_seed{seed}", gap, None, "none", 0.0,
            cfg.destruction_margin, gap > cfg.destruction_margin,
        ))
        if cfg.checkpoints:
            series[f"{label}running_freq_seed{seed}"] = \
                empirics.running_frequency_series(xs, pattern, cfg.checkpoints)
    ms.append(Measurement(
        f"{label}unrestricted_value", witness.value, witness.value, "analytic",
        0.0, None, None,
    ))
    return ms, series


def _scn_markov_destruction(cfg):
    mu = measures.Markov(((0.9, 0.1), (0.1, 0.9))) if cfg.measure is None \
        else measure_from_config(cfg.measure)
    witness = measures.find_witness(mu, k_max=3, box=10)
    sets = [cfg.selection] if cfg.selection else [
        {"kind": "arithmetic_progression", "first": 2, "step": 2},
        {"kind": "iid_gaps", "support": [1, 3], "probs": [0.5, 0.5]},
    ]
    ms, series = [], {}
    for i, sel_d in enumerate(sets):
        label = f"set{i}_" if len(sets) > 1 else ""
        m2, s2 = _destruction_measurements(cfg, mu, sel_d, witness, label)
        ms.extend(m2)
        series.update(s2)
    ok = all(m.passed is not False for m in ms)
    verdict = "destroyed (consistent with theorem)" if ok else \
        "measurements off the predicted destruction values"
    return ms, series, verdict


def _scn_nondeterministic(cfg):
    cfg.selection = cfg.selection or {"kind": "coin_membership", "p": 0.5}
    ms, series, verdict = _scn_markov_destruction(cfg)
    S = selection_from_config(cfg.selection, cfg.seed + 1000)
    y = S.characteristic_prefix(min(cfg.n, 50_000))
    lz = selectors.lz76_rate(y)
    ms.append(Measurement("indicator_lz76_rate", lz, None, "none", 0.0, 0.5,
                          lz > 0.5))
    if verdict.startswith("destroyed"):
        verdict = "not preserved (consistent with theorem)"
    return ms, series, verdict


def _scn_heersink_vandehey(cfg):
    cfg.measure = cfg.measure or {"kind": "gauss_cf"}
    mu = measure_from_config(cfg.measure)
    sel_d = cfg.selection or {"kind": "arithmetic_progression", "first": 2,
                              "step": 2}
    nu = derived_indicator_measure(sel_d)
    S = selection_from_config(sel_d, cfg.seed + 1000)
    sb = measures.SpreadBlock((1, 1), (0,))
    predicted, bound = measures.predicted_restricted_frequency(mu, nu, sb, 2e-6)
    reference = measures.cylinder_measure(mu, (1, 1))
    pattern = empirics.WildcardPattern.from_block((1, 1))
    ms, series = [], {}
    for seed in cfg.seed_list():
        x = sample_stream(mu, seed)
        xs = _restricted_prefix(x, S, cfg.n)
        tol = cfg.tolerance or stat_tolerance(len(xs) - 1)
        f = empirics.pattern_frequency(xs, pattern)
        ms.append(Measurement(
            f"restricted_pair_freq_seed{seed}", f, predicted, "truncated-sum",
            bound, tol, abs(f - predicted) <= tol + bound,
        ))
        sd = empirics.simple_normality_defect(xs, mu, cfg.cap)
        ms.append(Measurement(
            f"simple_defect_seed{seed}", sd, 0.0, "analytic", 0.0,
            stat_tolerance(len(xs)) + 0.002, sd < stat_tolerance(len(xs)) + 0.002,
        ))
        if cfg.checkpoints:
            series[f"running_pair_freq_seed{seed}"] = \
                empirics.running_frequency_series(xs, pattern, cfg.checkpoints)
    n_win = S.count_upto(cfg.n) - 1
    gap = abs(reference - predicted)
    ms.append(Measurement("unrestricted_pair_value", reference, reference,
                          "analytic", 0.0, None, None))
    # gate: the analytic gap must be detectable above the CLT band at this n
    ms.append(Measurement(
        "destruction_gap", gap, None, "none", bound,
        2 * stat_tolerance(n_win), gap > 2 * stat_tolerance(n_win),
    ))
    ok = all(m.passed is not False for m in ms)
    verdict = "destroyed (consistent with theorem)" if ok else \
        "measurements off the predicted destruction values"
    return ms, series, verdict


def _scn_simple_normality(cfg):
    """Single-symbol statistics survive the very restrictions that break
    longer blocks: both facts in one report."""
    ms, series = [], {}
    sub = ExperimentConfig(
        scenario=cfg.scenario, n=cfg.n, seed=cfg.seed, seeds=cfg.seeds,
        ks=cfg.ks, cap=cfg.cap, tolerance=cfg.tolerance,
        destruction_margin=cfg.destruction_margin,
    )
    m1, s1, _ = _scn_heersink_vandehey(sub)
    for m in m1:
        m.name = "gauss_" + m.name
    ms += m1
    series.update({"gauss_" + k: v for k, v in s1.items()} if s1 else {})
    sub2 = ExperimentConfig(
        scenario=cfg.scenario, n=cfg.n, seed=cfg.seed, seeds=cfg.seeds,
        ks=(1,), cap=cfg.cap, tolerance=cfg.tolerance,
        destruction_margin=cfg.destruction_margin,
        selection={"kind": "arithmetic_progression", "first": 2, "step": 2},
    )
    mu = measures.Markov(((0.9, 0.1), (0.1, 0.9)))
    witness = measures.find_witness(mu, k_max=3, box=10)
    m2, s2 = _destruction_measurements(sub2, mu, sub2.selection, witness,
                                       "markov_")
    S = selection_from_config(sub2.selection, cfg.seed + 1000)
    for seed in sub2.seed_list():
        x = sample_stream(mu, seed)
        xs = _restricted_prefix(x, S, cfg.n)
        tol = cfg.tolerance or stat_tolerance(len(xs))
        d = empirics.simple_normality_defect(xs, mu)
        m2.append(Measurement(
            f"markov_simple_defect_seed{seed}", d, 0.0, "analytic", 0.0, tol,
            d < tol,
        ))
    ms += m2
    series.update(s2)
    ok = all(m.passed is not False for m in ms)
    verdict = ("simple normality preserved while longer blocks drift "
               "(consistent with theorem)") if ok else "contrast not observed"
    return ms, series, verdict


def _scn_superficial_construction(cfg):
    spec = measures.Bernoulli((0.5, 0.5)) if cfg.measure is None \
        else measure_from_config(cfg.measure)
    S = selectors.power_intervals(4, 2)
    dec = selectors.interval_decomposition(S, cfg.n)
    ms = []
    for seed in cfg.seed_list():
        z = sample_stream(spec, seed)
        x = sources.build_preserving_pair(z, dec)
        xp = x.prefix(cfg.n)
        xs = _restricted_prefix(x, S, cfg.n)
        for k in cfg.ks:
            tol = cfg.tolerance or stat_tolerance(cfg.n)
            d = empirics.normality_defect(xp, spec, k)
            ms.append(Measurement(f"built_defect_k{k}_seed{seed}", d, 0.0,
                                  "analytic", 0.0, tol, d < tol))
            tol_r = cfg.tolerance or stat_tolerance(len(xs))
            dr = empirics.normality_defect(xs, spec, k)
            ms.append(Measurement(f"restricted_defect_k{k}_seed{seed}", dr,
                                  0.0, "analytic", 0.0, tol_r, dr < tol_r))
    ok = all(m.passed for m in ms)
    verdict = ("construction generic along and off the set "
               "(consistent with theorem)") if ok else "construction defective"
    return ms, {}, verdict


def _scn_density_zero_spoiler(cfg):
    spec = measures.Bernoulli((0.5, 0.5)) if cfg.measure is None \
        else measure_from_config(cfg.measure)
    S = selectors.power_runs(4)
    symbol = 0
    ms = []
    series = {}
    for seed in cfg.seed_list():
        x = sample_stream(spec, seed)
        xp = sources.build_density_zero_spoiler(x, S, symbol)
        xarr = xp.prefix(cfg.n)
        for k in cfg.ks:
            tol = cfg.tolerance or stat_tolerance(cfg.n)
            d = empirics.normality_defect(xarr, spec, k)
            ms.append(Measurement(f"modified_defect_k{k}_seed{seed}", d, 0.0,
                                  "analytic", 0.0, tol, d < tol))
        xs = _restricted_prefix(xp, S, cfg.n)
        sd = empirics.simple_normality_defect(xs, spec)
        floor = 1.0 - measures.symbol_measure(spec, symbol)
        ms.append(Measurement(
            f"restricted_simple_defect_seed{seed}", sd, floor, "analytic",
            0.0, None, sd >= 1 / 6,
        ))
    caps = selectors.spoiler_capture_series(S, cfg.n)
    series["capture_ratio"] = [(n, r) for n, r, _ in caps]
    series["sprime_density"] = [(n, d) for n, _, d in caps]
    last_ratio = caps[-1][1]
    ms.append(Measurement("final_capture_ratio", last_ratio, None, "none",
                          0.0, 2 / 3, last_ratio >= 2 / 3))
    ms.append(Measurement("final_sprime_density", caps[-1][2], 0.0,
                          "analytic", 0.0, 0.01, caps[-1][2] < 0.01))
    ok = all(m.passed is not False for m in ms)
    verdict = ("modification invisible globally, fatal along the set "
               "(consistent with theorem)") if ok else "spoiler off target"
    return ms, series, verdict


def _scn_superficial_preservation(cfg):
    spec = measures.Bernoulli((0.5, 0.5)) if cfg.measure is None \
        else measure_from_config(cfg.measure)
    S = selectors.power_intervals(4, 2)
    ms = _defect_measurements(cfg, spec, S, "")
    prof = selectors.density_profile(S, cfg.n)
    ms.append(Measurement("lower_density_estimate", prof.lower_estimate,
                          None, "none", 0.0, 0.2,
                          prof.lower_estimate > 0.2))
    ok = all(m.passed is not False for m in ms)
    verdict = "preserved (consistent with theorem)" if ok else \
        "defect above tolerance"
    return ms, {}, verdict


def _exact_identity(cfg, x, S, expect_negation=False, horizon=100_000):
    xs = selectors.restrict(x, S).prefix(horizon)
    base = x.prefix(horizon)
    if expect_negation:
        base = 1 - base
    mismatches = int(np.count_nonzero(xs != base))
    return Measurement(
        ("negation_mismatches" if expect_negation else "identity_mismatches")
        + f"_first{horizon}", float(mismatches), 0.0, "exact", 0.0, 0.0,
        mismatches == 0,
    )


def _scn_example_7_1(cfg):
    x = sources.garcia_hedlund_stream()
    S = selectors.arithmetic_progression(3, 3)
    m = _exact_identity(cfg, x, S, horizon=min(cfg.n, 100_000))
    ok = bool(m.passed)
    return [m], {}, "preserved (exact)" if ok else "identity broken"


def _scn_example_7_2(cfg):
    x = sources.thue_morse_stream()
    h = min(cfg.n, 100_000)
    m1 = _exact_identity(cfg, x, selectors.arithmetic_progression(1, 2), False, h)
    m1.name = "odd_" + m1.name
    m2 = _exact_identity(cfg, x, selectors.arithmetic_progression(2, 2), True, h)
    m2.name = "even_" + m2.name
    ok = bool(m1.passed and m2.passed)
    return [m1, m2], {}, "preserved (exact)" if ok else "identity broken"


def _scn_example_7_3(cfg):
    h = min(cfg.n, 300_000)
    S = selectors.arithmetic_progression(3, 3)
    m1 = _exact_identity(cfg, sources.garcia_hedlund_stream(), S, False, h)
    m1.name = "toeplitz_row_" + m1.name
    coin = measures.Bernoulli((0.5, 0.5))
    ms = [m1]
    for seed in cfg.seed_list():
        w = sample_stream(coin, seed)
        ws = _restricted_prefix(w, S, h)
        tol = cfg.tolerance or stat_tolerance(len(ws) - 2)
        d = empirics.normality_defect(ws, coin, 3)
        ms.append(Measurement(f"coin_row_defect_k3_seed{seed}", d, 0.0,
                              "analytic", 0.0, tol, d < tol))
    ok = all(m.passed for m in ms)
    return ms, {}, "preserved (consistent with theorem)" if ok else \
        "product restriction defective"


def _scn_example_7_4(cfg):
    h = min(cfg.n, 300_000)
    S = selectors.arithmetic_progression(1, 2)
    m1 = _exact_identity(cfg, sources.thue_morse_stream(), S, False, h)
    m1.name = "morse_row_" + m1.name
    coin = measures.Bernoulli((0.5, 0.5))
    ms = [m1]
    for seed in cfg.seed_list():
        w = sample_stream(coin, seed)
        ws = _restricted_prefix(w, S, h)
        tol = cfg.tolerance or stat_tolerance(len(ws) - 2)
        d = empirics.normality_defect(ws, coin, 3)
        ms.append(Measurement(f"coin_row_defect_k3_seed{seed}", d, 0.0,
                              "analytic", 0.0, tol, d < tol))
    ok = all(m.passed for m in ms)
    return ms, {}, "preserved (consistent with theorem)" if ok else \
        "product restriction defective"


def _scn_example_7_5(cfg):
    x = sources.periodic_stream((0, 1))
    sel_d = {"kind": "iid_gaps", "support": [1, 3], "probs": [0.5, 0.5]}
    ms = []
    h = min(cfg.n, 100_000)
    spec = measures.Periodic((0, 1))
    for seed in cfg.seed_list():
        S = selection_from_config(sel_d, cfg.seed + seed)
        ms.append(_exact_identity(cfg, x, S, horizon=h))
        ms[-1].name = f"seed{seed}_" + ms[-1].name
        xs = selectors.restrict(x, S).prefix(h)
        d = empirics.normality_defect(xs, spec, 2)
        ms.append(Measurement(f"restricted_defect_k2_seed{seed}", d, 0.0,
                              "analytic", 0.0, 0.001, d < 0.001))
    S = selection_from_config(sel_d, cfg.seed)
    y = S.characteristic_prefix(min(cfg.n, 1_000_000))
    score = selectors.determinism_score(y, k_max=4)
    h4 = score["plugin_entropy_rates"][-1]
    ms.append(Measurement("indicator_plugin_rate_k4", h4, 0.5, "analytic",
                          0.0, None, h4 >= 0.2))
    ok = all(m.passed is not False for m in ms)
    return ms, {}, "preserved (exact identity)" if ok else "identity broken"


def _scn_example_7_6(cfg):
    x = sources.periodic_stream((0, 0, 1, 1))
    ms = []
    h = min(cfg.n, 100_000)
    for seed in cfg.seed_list():
        rule = selectors.AlternatingGaps(2, (4, 8), "random")
        S = selectors.gap_process_set(rule, cfg.seed + seed)
        m = _exact_identity(cfg, x, S, horizon=h)
        m.name = f"seed{seed}_" + m.name
        ms.append(m)
    ok = all(m.passed for m in ms)
    return ms, {}, "preserved (exact)" if ok else "identity broken"


@dataclass(frozen=True)
class ScenarioInfo:
    func: object
    description: str
    reference: str


_REGISTRY = {
    "wall": ScenarioInfo(
        _scn_wall,
        "uniform i.i.d. samples restricted to an arithmetic progression "
        "keep their block statistics",
        "Wall 1949: arithmetic progressions preserve classical normality",
    ),
    "kamae_weiss_toeplitz": ScenarioInfo(
        _scn_kamae_weiss,
        "i.i.d. samples restricted to a positive-density Toeplitz-style "
        "deterministic set keep their block statistics",
        "Kamae 1973 / Weiss 1971: deterministic positive-density sets "
        "preserve classical normality",
    ),
    "heersink_vandehey": ScenarioInfo(
        _scn_heersink_vandehey,
        "continued-fraction digits sampled along an arithmetic progression "
        "show the wrong pair frequency",
        "Heersink & Vandehey 2016: nontrivial arithmetic progressions "
        "destroy continued-fraction normality",
    ),
    "markov_destruction": ScenarioInfo(
        _scn_markov_destruction,
        "a mixing Markov chain restricted along deterministic sets misses "
        "its spread-block value by the predicted convex combination",
        "destruction along deterministic sets for non-i.i.d. laws with "
        "completely positive entropy",
    ),
    "nondeterministic_nonpreservation": ScenarioInfo(
        _scn_nondeterministic,
        "restriction along an i.i.d. membership set moves the spread-block "
        "frequency of a Markov sample off its value",
        "non-deterministic sets do not preserve genericity for laws with "
        "completely positive entropy",
    ),
    "simple_normality_preservation": ScenarioInfo(
        _scn_simple_normality,
        "single-symbol frequencies survive the same restrictions that "
        "derail longer blocks, in one report",
        "disjointness from the indicator laws preserves single-symbol "
        "frequencies along positive-density sets",
    ),
    "superficial_construction": ScenarioInfo(
        _scn_superficial_construction,
        "recycling ever-longer initial stretches builds a point whose "
        "restriction to a run-structured set stays generic",
        "run-structured (superficial) sets never destroy genericity: "
        "explicit construction",
    ),
    "density_zero_spoiler": ScenarioInfo(
        _scn_density_zero_spoiler,
        "overwriting a density-zero windowed subset leaves the point "
        "generic but wrecks single-symbol frequencies along the set",
        "lower-density-zero sets preserve nothing: windowed overwrite "
        "construction",
    ),
    "superficial_positive_density_preservation": ScenarioInfo(
        _scn_superficial_preservation,
        "restriction to a positive-density run-structured set keeps "
        "samples generic",
        "positive-density run-structured (superficial) sets preserve "
        "genericity for ergodic laws",
    ),
    "example_7_1": ScenarioInfo(
        _scn_example_7_1,
        "the period-doubling Toeplitz point restricted to multiples of 3 "
        "reproduces itself exactly",
        "catalog example: Garcia & Hedlund sequence along 3N",
    ),
    "example_7_2": ScenarioInfo(
        _scn_example_7_2,
        "the Thue-Morse point equals its odd subsequence and the negation "
        "of its even subsequence",
        "catalog example: Thue-Morse along odds and evens",
    ),
    "example_7_3": ScenarioInfo(
        _scn_example_7_3,
        "the Toeplitz x coin product stays generic along multiples of 3",
        "catalog example: positive-entropy product with a disjoint "
        "indicator law",
    ),
    "example_7_4": ScenarioInfo(
        _scn_example_7_4,
        "the Thue-Morse x coin product stays generic along the odds",
        "catalog example: positive-entropy product without disjointness",
    ),
    "example_7_5": ScenarioInfo(
        _scn_example_7_5,
        "the 2-periodic point survives restriction along random odd gaps "
        "{1,3}, a non-deterministic set",
        "catalog example: zero-entropy law, non-deterministic set, "
        "disjointness",
    ),
    "example_7_6": ScenarioInfo(
        _scn_example_7_6,
        "the 4-periodic point 0011 reproduces itself along alternating "
        "random gaps {4,8} and fixed gaps 2",
        "catalog example: zero-entropy law, non-deterministic set, no "
        "disjointness",
    ),
}


def list_scenarios() -> dict:
    """Registry: name -> (description, reference) in a stable order."""
    return {
        name: {"description": info.description, "reference": info.reference}
        for name, info in _REGISTRY.items()
    }


def run_scenario(config: ExperimentConfig) -> ExperimentReport:
    """Run one scenario; deterministic given the config."""
    info = _REGISTRY.get(config.scenario)
    if info is None:
        raise ConfigError(
            f"unknown scenario {config.scenario!r}; known: "
            f"{', '.join(_REGISTRY)}"
        )
    t0 = time.perf_counter()
    ms, series, verdict = info.func(config)
    return _finish(config.scenario, config, ms, series, verdict, t0)


def _run_dict(d: dict) -> ExperimentReport:
    return run_scenario(config_from_dict(d))


def run_many(configs, workers: int | None = None):
    """Run several configs, one worker process per scenario when asked."""
    configs = list(configs)
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    dicts = []
    for c in configs:
        d = c.to_dict()
        d["ks"] = list(d.get("ks", ()))
        dicts.append(d)
    if workers <= 1 or len(configs) <= 1:
        return [_run_dict(d) for d in dicts]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_dict, dicts))
