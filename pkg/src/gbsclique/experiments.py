"""Experiment registry: a strict JSON config in, a deterministic report out.

Each experiment compares a simulated quantity with the closed-form value
from :mod:`gbsclique.theory`; every report row carries ``estimate``,
``stderr``, ``theory`` and ``ratio`` columns. ``run_experiment`` with only
``experiment`` and ``seed`` set reproduces the acceptance parameters.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy.stats import norm

from . import theory
from .detect import (SamplerSpec, auc, auc_stderr, detection_power_experiment,
                     gaussian_surrogate_overlap, run_algorithm1)
from .gbs import enumerate_distribution, sample_exact, sample_mcmc
from .graph import gen_bipartite_er, planted_er, random_biadjacency
from .matchperm import normalized_hafnians, permanents
from .rng import child_seed, stream
from .statkit import (ks_statistic, mean_se, subset_intersection_experiment,
                      zero_agreement_frequency)
from .weights import exact_weights, expected_weight_structural_mc, weight_mc_perm

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Bad configuration: malformed, unknown key, or an invalid parameter point."""


# keys every config may carry; values here are the generic fallbacks
_COMMON = {
    "experiment": None,
    "seed": 0,
    "out": "report",
    "cap_enum": None,
    "cap_perm": 10**8,
}

SWEEP_KEYS = ("n", "m", "k", "p", "eps")


@dataclass(frozen=True)
class Experiment:
    name: str
    claim: str
    defaults: dict
    run: Callable[["ExperimentConfig"], tuple[list[dict], dict]]
    validate: Callable[[dict], None] | None = None


REGISTRY: dict[str, Experiment] = {}


def register(name: str, claim: str, defaults: dict, validate=None):
    def deco(fn):
        REGISTRY[name] = Experiment(name, claim, defaults, fn, validate)
        return fn
    return deco


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int
    params: dict

    def __getattr__(self, key):
        try:
            return self.__dict__["params"][key]
        except KeyError:
            raise AttributeError(key) from None

    def sweep(self, *keys):
        """Cartesian product over the listed sweep keys, in config order."""
        lists = [self.params[k] if isinstance(self.params[k], list) else [self.params[k]]
                 for k in keys]
        for combo in itertools.product(*lists):
            yield dict(zip(keys, combo))

    def echo(self) -> dict:
        return {"experiment": self.experiment, "seed": self.seed, **self.params}


@dataclass
class ExperimentReport:
    experiment: str
    claim: str
    config: dict
    rows: list[dict]
    summary: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def columns(self) -> list[str]:
        cols: list[str] = []
        for r in self.rows:
            for c in r:
                if c not in cols:
                    cols.append(c)
        return cols

    def column(self, name: str) -> list:
        return [r.get(name) for r in self.rows]


def _as_list(v):
    return v if isinstance(v, list) else [v]


def _check_point(pt: dict):
    n, m, k, p = pt.get("n"), pt.get("m"), pt.get("k"), pt.get("p")
    if n is not None and (not isinstance(n, int) or n < 1):
        raise ConfigError(f"invalid point {pt}: n must be a positive integer")
    if p is not None and not 0.0 < p <= 1.0:
        raise ConfigError(f"invalid point {pt}: p must lie in (0, 1]")
    if n is not None and k is not None and not 0 <= k <= n:
        raise ConfigError(f"invalid point {pt}: need 0 <= k <= n")
    if n is not None and m is not None and not 1 <= m <= n:
        raise ConfigError(f"invalid point {pt}: need 1 <= m <= n")


def parse_config(document: str | dict, overrides: dict | None = None) -> ExperimentConfig:
    """Validate a JSON config (strict: unknown keys are rejected) and fill defaults."""
    if isinstance(document, str):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}") from None
    else:
        raw = dict(document)
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    raw.update(overrides or {})
    name = raw.get("experiment")
    if name not in REGISTRY:
        raise ConfigError(f"unknown experiment {name!r}; known: {sorted(REGISTRY)}")
    exp = REGISTRY[name]
    allowed = set(_COMMON) | set(exp.defaults)
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"unknown config key {unknown[0]!r} for experiment {name!r}")
    seed = raw.get("seed", _COMMON["seed"])
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    params = {k: v for k, v in _COMMON.items() if k not in ("experiment", "seed")}
    params.update(exp.defaults)
    params.update({k: v for k, v in raw.items() if k not in ("experiment", "seed")})
    for key in SWEEP_KEYS:
        if key in params and isinstance(params[key], list) and not params[key]:
            raise ConfigError(f"sweep list {key!r} is empty")
    keys = [k for k in SWEEP_KEYS if k in params and params[k] is not None]
    if keys and name not in ("stein_chen",):
        lists = [_as_list(params[k]) for k in keys]
        for combo in itertools.product(*lists):
            _check_point(dict(zip(keys, combo)))
    for key in ("t", "trials", "r"):
        if key in params and (not isinstance(params[key], int) or params[key] < 1):
            raise ConfigError(f"{key} must be a positive integer")
    if exp.validate:
        exp.validate(params)
    return ExperimentConfig(name, seed, params)


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    exp = REGISTRY[cfg.experiment]
    start = time.perf_counter()
    rows, summary = exp.run(cfg)
    for row in rows:
        est, th = row.get("estimate"), row.get("theory")
        if "ratio" not in row:
            row["ratio"] = est / th if est is not None and th not in (None, 0) else None
    meta = {
        "runtime_seconds": round(time.perf_counter() - start, 3),
        "threads": int(os.environ.get("PGL_THREADS", "1")),
    }
    return ExperimentReport(cfg.experiment, exp.claim, cfg.echo(), rows, summary, meta)


# --- serialization ---------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (list, tuple)):
        return ";".join(_fmt(x) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def report_to_csv(report: ExperimentReport) -> str:
    if not report.rows:
        raise ValueError("report has no rows")
    buf = io.StringIO()
    buf.write(f"# experiment={report.experiment} schema_version={report.schema_version}\n")
    buf.write(f"# claim: {report.claim}\n")
    cols = report.columns()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in report.rows:
        w.writerow([_fmt(r.get(c)) for c in cols])
    return buf.getvalue()


def report_to_json(report: ExperimentReport) -> str:
    if not report.rows:
        raise ValueError("report has no rows")
    doc = {
        "schema_version": report.schema_version,
        "experiment": report.experiment,
        "claim": report.claim,
        "config": report.config,
        "rows": report.rows,
        "summary": report.summary,
        "meta": report.meta,
    }
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"


def read_report_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def emit_report(report: ExperimentReport, fmt: str = "csv", out: str | None = None) -> str:
    """Write ``<out>.<experiment>.<fmt>`` and return the path."""
    if fmt not in ("csv", "json"):
        raise ValueError("format must be csv or json")
    text = report_to_csv(report) if fmt == "csv" else report_to_json(report)
    prefix = out if out is not None else report.config.get("out", "report")
    path = f"{prefix}.{report.experiment}.{fmt}"
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


# --- shared simulation pieces ---------------------------------------------

def weight_replicates(n: int, m: int, p: float, trials: int, nodes, seed: int,
                      cap: int = 10**8) -> np.ndarray:
    """Exact ``W`` of the given left nodes over ``trials`` independent graphs."""
    out = np.empty((trials, len(nodes)))
    for t in range(trials):
        g = gen_bipartite_er(n, p, child_seed(seed, f"weight_replicates/{n}/{m}", t))
        out[t] = exact_weights(g, nodes, m, cap=cap)
    return out


def cov_rows(n: int, m: int, p: float, w: np.ndarray) -> list[dict]:
    """Variance, cross-covariance and kurtosis rows for ``sqrt(n) * (W - mean)``."""
    z = math.sqrt(n) * (w - w.mean(axis=0))
    R = z.shape[0]
    var = z[:, 0].var(ddof=1)
    var_se = math.sqrt(max(np.var(z[:, 0] ** 2, ddof=1), 0.0) / R)
    cov_prod = z[:, 0] * z[:, 1]
    cov = cov_prod.mean() * R / (R - 1)
    kurt = float(np.mean(z[:, 0] ** 4) / (3.0 * var * var))
    rows = [
        {"n": n, "m": m, "p": p, "quantity": "var", "estimate": float(var), "stderr": var_se,
         "theory": theory.covariance_entry(p, m, n, True)},
        {"n": n, "m": m, "p": p, "quantity": "cov", "estimate": float(cov),
         "stderr": float(cov_prod.std(ddof=1) / math.sqrt(R)),
         "theory": theory.covariance_entry(p, m, n, False)},
        {"n": n, "m": m, "p": p, "quantity": "kurtosis_ratio", "estimate": kurt, "stderr": None,
         "theory": 1.0},
        {"n": n, "m": m, "p": p, "quantity": "mean_w", "estimate": float(w[:, 0].mean()),
         "stderr": float(w[:, 0].std(ddof=1) / math.sqrt(R)), "theory": theory.expected_weight(p)},
    ]
    for r in rows:
        r["ratio"] = r["estimate"] / r["theory"] if r["theory"] else None
    return rows


# --- registry --------------------------------------------------------------

@register("expected_weight", "E[W(i)] tends to exp(1/p - 1) for a background node",
          {"n": 10_000, "m": 50, "k": 0, "p": 0.5, "r": 1_000_000, "method": "structural",
           "trials": 20})
def exp_expected_weight(cfg):
    rows = []
    for pt in cfg.sweep("n", "m", "k", "p"):
        seed = child_seed(cfg.seed, "expected_weight")
        if cfg.method == "structural":
            est, se = expected_weight_structural_mc(pt["n"], pt["m"], pt["k"], pt["p"], False,
                                                    cfg.r, seed)
        elif cfg.method == "graph":
            vals = []
            for t in range(cfg.trials):
                inst = planted_er(pt["n"], pt["p"], pt["k"], child_seed(seed, "graph", t))
                node = next(i for i in range(pt["n"]) if i not in inst.a0)
                vals.append(weight_mc_perm(inst.graph, node, pt["m"], cfg.r, child_seed(seed, "mc", t))[0])
            est, se = mean_se(vals)
        else:
            raise ConfigError("method must be structural or graph")
        rows.append({**pt, "method": cfg.method, "estimate": est, "stderr": se,
                     "theory": theory.expected_weight(pt["p"])})
    return rows, {}


@register("bias_sweep", "planted-minus-background weight gap tends to e^(1/p-1) (1/p-1) 2K/n",
          {"n": 100, "m": 5, "k": [5, 10, 20], "p": 0.5, "r": 1_000_000})
def exp_bias_sweep(cfg):
    rows = []
    for pt in cfg.sweep("n", "m", "k", "p"):
        if pt["k"] < 1:
            raise ConfigError(f"invalid point {pt}: bias needs k >= 1")
        seed = child_seed(cfg.seed, f"bias_sweep/{pt['k']}")
        on, se_on = expected_weight_structural_mc(pt["n"], pt["m"], pt["k"], pt["p"], True, cfg.r, seed)
        off, se_off = expected_weight_structural_mc(pt["n"], pt["m"], pt["k"], pt["p"], False, cfg.r, seed)
        rows.append({**pt, "planted": on, "background": off, "estimate": on - off,
                     "stderr": math.hypot(se_on, se_off),
                     "theory": theory.weight_bias(pt["p"], pt["k"], pt["n"])})
    summary = {}
    ks = np.array([r["k"] for r in rows], dtype=float)
    if len(set(ks.tolist())) > 1 and len({(r["n"], r["p"]) for r in rows}) == 1:
        bias = np.array([r["estimate"] for r in rows])
        slope = float(ks @ bias / (ks @ ks))
        th = theory.weight_bias(rows[0]["p"], 1, rows[0]["n"])
        summary = {"slope": slope, "theory_slope": th, "slope_rel_error": abs(slope - th) / th}
    return rows, summary


@register("cov_check", "Cov(sqrt(n)Z(i), sqrt(n)Z(j)) tends to 4(1/p-1)e^(2(1/p-1))(1{i=j} + m^2/n)",
          {"n": [12, 16, 20], "m": 3, "p": 0.5, "trials": 2000})
def exp_cov_check(cfg):
    rows = []
    for pt in cfg.sweep("n", "m", "p"):
        w = weight_replicates(pt["n"], pt["m"], pt["p"], cfg.trials, [0, 1],
                              child_seed(cfg.seed, "cov_check"), cfg.cap_perm)
        rows.extend(cov_rows(pt["n"], pt["m"], pt["p"], w))
    return rows, {}


WICK_INDEX_SETS = ((0, 0), (0, 1), (0, 0, 0), (0, 1, 2), (0, 0, 0, 0), (0, 0, 1, 1), (0, 1, 2, 0))


def wick_rows(n: int, m: int, p: float, w: np.ndarray, index_sets=WICK_INDEX_SETS) -> list[dict]:
    z = math.sqrt(n) * (w - w.mean(axis=0))
    rows = []
    for idx in index_sets:
        prod = np.prod(z[:, list(idx)], axis=1)
        est, se = mean_se(prod)
        th = theory.wick_moment(theory.covariance_matrix(p, m, n, idx))
        rows.append({"n": n, "m": m, "p": p, "indices": list(idx), "estimate": est, "stderr": se,
                     "theory": th, "z_score": (est - th) / se if se > 0 else None})
    return rows


@register("wick_check", "joint moments of sqrt(n)Z follow the Gaussian pairing (Wick) sum",
          {"n": 20, "m": 3, "p": 0.5, "trials": 5000})
def exp_wick_check(cfg):
    rows = []
    for pt in cfg.sweep("n", "m", "p"):
        w = weight_replicates(pt["n"], pt["m"], pt["p"], cfg.trials, [0, 1, 2],
                              child_seed(cfg.seed, "wick_check"), cfg.cap_perm)
        rows.extend(wick_rows(pt["n"], pt["m"], pt["p"], w))
    return rows, {}


def lognormal_row(n: int, p: float, trials: int, seed: int) -> dict:
    rng = stream(seed, "lognormal", n)
    vals = normalized_hafnians(random_biadjacency(n, p, trials, rng), p)
    mu, s2 = theory.lognormal_params(p)
    pos = vals > 0
    logs = np.log(vals[pos])
    def cdf(x):
        out = np.zeros_like(x)
        ok = x > 0
        out[ok] = norm.cdf((np.log(x[ok]) - mu) / math.sqrt(s2))
        return out

    ks = ks_statistic(vals, cdf)
    lm, lse = mean_se(logs)
    return {"n": n, "p": p, "trials": trials, "zeros": int((~pos).sum()), "ks": ks,
            "log_mean": lm, "log_var": float(logs.var(ddof=1)), "estimate": lm, "stderr": lse,
            "theory": mu, "theory_log_var": s2}


@register("lognormal", "the normalized Hafnian converges weakly to LogNormal(-(1-p)/(2p), (1-p)/p)",
          {"n": [8, 12, 16, 20], "p": 0.5, "trials": 20_000})
def exp_lognormal(cfg):
    rows = [lognormal_row(pt["n"], pt["p"], cfg.trials, child_seed(cfg.seed, "lognormal"))
            for pt in cfg.sweep("n", "p")]
    ks = [r["ks"] for r in rows]
    return rows, {"ks_strictly_decreasing": all(a > b for a, b in zip(ks, ks[1:]))}


def haf_moment_row(n: int, p: float, trials: int, seed: int) -> dict:
    rng = stream(seed, "haf_moment", n)
    h = normalized_hafnians(random_biadjacency(n, p, trials, rng), p)
    m1, se1 = mean_se(h)
    m2, se2 = mean_se(h * h)
    return {"n": n, "p": p, "trials": trials, "mean": m1, "mean_stderr": se1, "estimate": m2,
            "stderr": se2, "theory": theory.haf_second_moment_exact(n, p)}


@register("haf_moment", "E[Haf] = 1 and E[Haf^2] = sum_i p^-i/i! De(n-i)/(n-i)! at finite n",
          {"n": list(range(2, 11)), "p": [0.3, 0.5, 0.7], "trials": 100_000})
def exp_haf_moment(cfg):
    rows = [haf_moment_row(pt["n"], pt["p"], cfg.trials, child_seed(cfg.seed, f"haf/{pt['p']}"))
            for pt in cfg.sweep("n", "p")]
    return rows, {}


def _validate_sizes(params):
    sizes = params["sizes"]
    if not sizes or not all(isinstance(s, list) and s for s in sizes):
        raise ConfigError("sizes must be a nonempty list of nonempty lists")
    for s in sizes:
        if len(s) > 6 or any(x > params["n"] or x < 0 for x in s):
            raise ConfigError(f"invalid sizes {s}: at most 6 subsets, each of size <= n")


@register("poisson_lemma", "exact-membership intersection counts are asymptotically independent Poisson",
          {"n": 10_000, "sizes": [[100, 100], [100, 100, 100]], "trials": 100_000},
          validate=_validate_sizes)
def exp_poisson_lemma(cfg):
    rows, summary = [], {}
    for si, sizes in enumerate(cfg.sizes):
        rep = subset_intersection_experiment(cfg.n, sizes, cfg.trials,
                                             child_seed(cfg.seed, "poisson_lemma", si))
        for ci, c in enumerate(rep.cells):
            col = rep.counts[:, ci]
            est, se = mean_se(col)
            hit = float((col >= 1).mean())
            th_hit = 1.0 - math.exp(-rep.means[c])
            rows.append({"n": cfg.n, "sizes": list(sizes), "cell": list(c), "estimate": est,
                         "stderr": se, "theory": rep.means[c], "tv": rep.tv[c],
                         "p_at_least_one": hit,
                         "p_at_least_one_stderr": math.sqrt(hit * (1 - hit) / cfg.trials),
                         "theory_p_at_least_one": th_hit})
        x = [0] * len(rep.cells)
        summary[f"joint_zero/{si}"] = {"empirical": rep.joint_frequency(x),
                                       "product_poisson": rep.product_poisson(x)}
    return rows, summary


def resolve_overlap(m: int, rule) -> int:
    if rule == "full":
        return m
    if rule == "m-m^(2/3)":
        return m - math.ceil(m ** (2.0 / 3.0) - 1e-12)
    if isinstance(rule, int) and 0 <= rule <= m:
        return rule
    raise ConfigError(f"invalid overlap {rule!r} for m={m}")


def _validate_stein(params):
    ms, ov = _as_list(params["m"]), _as_list(params["overlap"])
    if len(ms) != len(ov):
        raise ConfigError("m and overlap lists must have equal length")
    for m, rule in zip(ms, ov):
        if not isinstance(m, int) or m < 1:
            raise ConfigError(f"invalid point m={m}")
        resolve_overlap(m, rule)


@register("stein_chen", "P(two random bijections never agree on the common domain) tends to 1/e",
          {"m": [500, 1000], "overlap": ["full", "m-m^(2/3)"], "trials": 100_000},
          validate=_validate_stein)
def exp_stein_chen(cfg):
    rows = []
    for i, (m, rule) in enumerate(zip(_as_list(cfg.m), _as_list(cfg.overlap))):
        ov = resolve_overlap(m, rule)
        freq, se = zero_agreement_frequency(m, ov, ov, cfg.trials, child_seed(cfg.seed, "stein_chen", i))
        rows.append({"m": m, "overlap": ov, "estimate": freq, "stderr": se,
                     "theory": math.exp(-1.0), "abs_error": abs(freq - math.exp(-1.0)),
                     "poisson_reference": math.exp(-ov * ov / (m * m))})
    return rows, {}


def _validate_power(params):
    if params["detector"] not in ("gaussian", "weight", "degree"):
        raise ConfigError(f"unknown detector {params['detector']!r}")
    if params["sampler"] not in ("exact", "mcmc"):
        raise ConfigError(f"unknown sampler {params['sampler']!r}")
    if not 0.0 < params["c"] < 1.0:
        raise ConfigError("c must lie in (0, 1)")


@register("detection_power", "planted nodes in the top c*n fraction: 1 - Phi(Phi^-1(1-c) - eps)",
          {"detector": "gaussian", "n": None, "k": 1000, "eps": [0.01, 1.0], "c": 0.8,
           "trials": 100, "p": 0.5, "m": 3, "t": 10_000, "sampler": "mcmc", "burnin": 10_000,
           "thin": 10},
          validate=_validate_power)
def exp_detection_power(cfg):
    rows, summary = [], {}
    if cfg.detector == "gaussian":
        for i, pt in enumerate(cfg.sweep("k", "eps")):
            k, eps = pt["k"], pt["eps"]
            n = cfg.n if cfg.n is not None else int(round((k / eps) ** 2))
            if n < k or eps <= 0:
                raise ConfigError(f"invalid point {pt}: need eps > 0 and n >= k")
            eps_eff = k / math.sqrt(n)
            overlap = gaussian_surrogate_overlap(n, k, eps_eff, cfg.c, cfg.trials,
                                                 child_seed(cfg.seed, "detection_power", i))
            frac, se = mean_se(overlap / k)
            rows.append({"detector": "gaussian", "n": n, "k": k, "eps": eps_eff, "c": cfg.c,
                         "trials": cfg.trials, "aggregated": cfg.trials * k, "estimate": frac,
                         "stderr": se, "theory": theory.detection_proportion(cfg.c, eps_eff)})
        return rows, summary
    sampler = SamplerSpec(cfg.sampler, cfg.m, cfg.burnin, cfg.thin, cfg.cap_enum)
    for pt in cfg.sweep("n", "k", "p"):
        if pt["n"] is None:
            raise ConfigError("graph detectors need n")
        power_rows, a, a_se = detection_power_experiment(
            pt["n"], pt["p"], pt["k"], cfg.trials, child_seed(cfg.seed, "detection_power"),
            detector=cfg.detector, sampler=sampler, t=cfg.t, c=cfg.c)
        for r in power_rows:
            for role, stat in (("null", r.statistic_null), ("planted", r.statistic_planted)):
                rows.append({"trial": r.trial, "n": r.n, "p": r.p, "K": r.k, "m": r.m, "T": r.t,
                             "detector": r.detector, "role": role, "statistic": stat,
                             "overlap": r.overlap if role == "planted" else None,
                             "auc_flag": int(r.statistic_planted > r.statistic_null)})
        summary[f"auc/n={pt['n']}/k={pt['k']}/p={pt['p']}"] = {"auc": a, "stderr": a_se}
    return rows, summary


@register("algorithm1", "planted nodes have larger GBS inclusion frequency (positive weight bias)",
          {"n": 12, "m": 3, "p": 0.5, "k": 6, "trials": 50, "t": 100_000, "sampler": "exact",
           "burnin": 10_000, "thin": 10},
          validate=lambda prm: _validate_power({**prm, "detector": "weight", "c": 0.5}))
def exp_algorithm1(cfg):
    rows = []
    sampler = SamplerSpec(cfg.sampler, cfg.m, cfg.burnin, cfg.thin, cfg.cap_enum)
    for pt in cfg.sweep("n", "k", "p"):
        n, k = pt["n"], pt["k"]
        if k < 1:
            raise ConfigError(f"invalid point {pt}: sign check needs k >= 1")
        for trial in range(cfg.trials):
            base = child_seed(cfg.seed, "algorithm1", trial)
            null = planted_er(n, pt["p"], 0, child_seed(base, "null"))
            alt = planted_er(n, pt["p"], k, child_seed(base, "planted"))
            r0 = run_algorithm1(null.graph, sampler, cfg.t, seed=child_seed(base, "sample_null"))
            r1 = run_algorithm1(alt.graph, sampler, cfg.t, seed=child_seed(base, "sample_planted"))
            mask = np.zeros(n, dtype=bool)
            mask[list(alt.a0)] = True
            z1 = r1.left
            planted_mean = float(z1[mask].mean())
            background_mean = float(z1[~mask].mean())
            rows.append({"trial": trial, "n": n, "m": cfg.m, "p": pt["p"], "K": k, "T": cfg.t,
                         "planted_mean_z": planted_mean, "background_mean_z": background_mean,
                         "estimate": planted_mean - background_mean, "stderr": None,
                         # frequencies are (m/n) W / E[W], so the weight gap maps to a z gap
                         "theory": cfg.m / n * theory.weight_bias(pt["p"], k, n)
                         / theory.expected_weight(pt["p"]) / r1.sigma,
                         "null_same_nodes_mean_z": float(r0.left[mask].mean()),
                         "sigma": r1.sigma, "sigma_left": r1.sigma_left, "sigma_right": r1.sigma_right,
                         "sign": int(planted_mean > background_mean)})
    return rows, {"sign_consistency": int(sum(r["sign"] for r in rows)), "trials": len(rows)}


def marginal_tv(freq: np.ndarray, exact: np.ndarray, m: int) -> float:
    """TV distance between inclusion marginals, each normalized by ``m`` to a distribution."""
    return 0.5 * float(np.abs(freq - exact).sum()) / m


@register("mcmc_validation", "sampler inclusion frequencies match the enumerated distribution",
          {"n": 10, "m": 3, "p": 0.6, "t": 100_000, "burnin": 10_000, "thin": 10})
def exp_mcmc_validation(cfg):
    rows, summary = [], {}
    for pt in cfg.sweep("n", "m", "p"):
        n, m = pt["n"], pt["m"]
        g = gen_bipartite_er(n, pt["p"], child_seed(cfg.seed, "mcmc_validation/graph"))
        dist = enumerate_distribution(g, m, cfg.cap_enum)
        left, right = dist.inclusion_marginals()
        exact = np.concatenate([left, right])
        ex = sample_exact(dist, cfg.t, child_seed(cfg.seed, "mcmc_validation/exact"))
        mc = sample_mcmc(g, m, cfg.t, cfg.burnin, cfg.thin, child_seed(cfg.seed, "mcmc_validation/mcmc"))
        f_ex = np.concatenate(ex.inclusion_counts(n)) / cfg.t
        f_mc = np.concatenate(mc.inclusion_counts(n)) / cfg.t
        w_left = exact_weights(g, range(n), m)
        ratio = left / w_left
        for i in range(2 * n):
            se = math.sqrt(exact[i] * (1 - exact[i]) / cfg.t)
            rows.append({"n": n, "m": m, "p": pt["p"], "side": "left" if i < n else "right",
                         "node": i % n, "theory": float(exact[i]), "estimate": float(f_ex[i]),
                         "stderr": se, "z_exact": (f_ex[i] - exact[i]) / se if se > 0 else 0.0,
                         "mcmc": float(f_mc[i])})
        summary[f"n={n}/m={m}/p={pt['p']}"] = {
            "tv_mcmc_left": marginal_tv(f_mc[:n], exact[:n], m),
            "tv_mcmc_right": marginal_tv(f_mc[n:], exact[n:], m),
            "max_abs_z_exact": float(max(abs(r["z_exact"]) for r in rows[-2 * n:])),
            "marginal_weight_ratio_rel_spread": float(np.ptp(ratio) / ratio.mean()),
            "mcmc_acceptance": mc.meta["acceptance_rate"],
        }
    return rows, summary
