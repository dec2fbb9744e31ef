"""Config-driven scenarios comparing commutator Schatten norms with function-space norms."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import yaml

from .. import __version__
from ..dyadic import build_adjacent_family, build_dyadic_system
from ..funcnorms import (besov_adhoc, besov_classical, hajlasz_norm, mb_weak_norm,
                         sobolev_norm_grid)
from ..operators import (BesselSpec, apply_weight, bessel_riesz_operator, bessel_weight,
                         commutator, hilbert_kernel, kernel_commutator, kernel_matrix,
                         riesz_kernel)
from ..oscnorms import LorentzParams, osc_norm, osc_norm_family
from ..schatten import schatten_norm, singular_values
from ..space import WeightSpec, space_from_config
from . import families

log = logging.getLogger(__name__)

QUANTITIES = ("schatten", "osc", "osc_adjacent", "besov_adhoc", "besov_classical",
              "hajlasz", "sobolev", "mb_weak")

ROW_FIELDS = ("scenario", "function", "resolution", "quantity", "params", "value")


class ConfigError(ValueError):
    """Invalid scenario configuration."""


class ScenarioError(RuntimeError):
    """A module failed while a scenario was running."""


@dataclass
class Quantity:
    name: str
    params: dict

    @property
    def label(self) -> str:
        return f"{self.name}[{self.param_string}]"

    @property
    def param_string(self) -> str:
        return ",".join(f"{k}={_fmt(v)}" for k, v in sorted(self.params.items()))


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return f"{v:g}"
    return str(v)


def _num(v):
    if isinstance(v, str) and v.lower() in ("inf", "infinity"):
        return math.inf
    return float(v)


def _uses_random(fn) -> bool:
    if fn is None:
        return False
    if isinstance(fn, list):
        return any(str(n).startswith("trig") for n in fn)
    if "seed" in fn:
        return False
    if "names" in fn:
        return any(str(n).startswith("trig") for n in fn["names"])
    limit = {"standard": len(families._FIXED), "smooth": len(families.SMOOTH_NAMES)}
    return int(fn.get("count", 20)) > limit.get(fn.get("family", "standard"), math.inf)


@dataclass
class ScenarioConfig:
    """Parsed scenario; see the README for the file schema."""

    id: str
    space: dict
    resolutions: list
    dyadic: dict = field(default_factory=dict)
    operator: dict = field(default_factory=dict)
    functions: Any = None
    quantities: list[Quantity] = field(default_factory=list)
    ratios: list[tuple[str, str]] = field(default_factory=list)
    seed: int | None = None
    refinement: bool = False
    thresholds: dict = field(default_factory=lambda: {"growth_step": 0.10, "stable_total": 0.10})
    output: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a mapping")
        try:
            space = dict(d.get("space") or {})
            res = space.pop("resolutions", None) or [space.pop("resolution", 64)]
            quantities = []
            for q in d.get("quantities") or []:
                q = dict(q)
                name = q.pop("name")
                if name not in QUANTITIES:
                    raise ConfigError(f"unknown quantity {name!r}")
                q = {k: (_num(v) if k in ("p", "q", "r", "d") else v) for k, v in q.items()}
                if name == "schatten" and "q" not in q:
                    q["q"] = q["p"]
                quantities.append(Quantity(name, q))
            fn = d.get("functions")
            seed = d.get("seed")
            if seed is None and _uses_random(fn):
                raise ConfigError("random test functions need a seed")
            cfg = cls(
                id=str(d.get("id", "scenario")),
                space=space,
                resolutions=list(res),
                dyadic=dict(d.get("dyadic") or {}),
                operator=dict(d.get("operator") or {}),
                functions=fn,
                quantities=quantities,
                ratios=[tuple(r) for r in d.get("ratios") or []],
                seed=None if seed is None else int(seed),
                refinement=bool(d.get("refinement", False)),
                thresholds={"growth_step": 0.10, "stable_total": 0.10,
                            **(d.get("thresholds") or {})},
                output=dict(d.get("output") or {}),
                raw=d,
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(f"invalid config: {err}") from err
        labels = {q.label for q in cfg.quantities}
        for a, b in cfg.ratios:
            if a not in labels or b not in labels:
                raise ConfigError(f"ratio refers to unknown quantity: {a!r} / {b!r}")
        return cfg

    @classmethod
    def load(cls, path, seed: int | None = None) -> "ScenarioConfig":
        """Read a YAML (or JSON) scenario; ``seed`` replaces the file's seed before validation."""
        try:
            with open(path) as fh:
                data = yaml.safe_load(fh)
        except (OSError, yaml.YAMLError) as err:
            raise ConfigError(f"cannot read config {path}: {err}") from err
        if seed is not None and isinstance(data, dict):
            data = {**data, "seed": int(seed)}
        return cls.from_dict(data)

    def config_hash(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass
class NormReport:
    rows: list[dict] = field(default_factory=list)
    ratios: list[dict] = field(default_factory=list)
    classifications: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    error: dict | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def values(self, quantity: str, function: str | None = None) -> list[float]:
        return [r["value"] for r in self.rows if r["quantity"] == quantity
                and (function is None or r["function"] == function)]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(ROW_FIELDS)
        for r in self.rows:
            writer.writerow([r["scenario"], r["function"], r["resolution"], r["quantity"],
                             r["params"], repr(float(r["value"]))])
        if self.error is not None:
            writer.writerow([self.error["scenario"], "", "", "error", self.error["message"], "nan"])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def to_json(self, path=None) -> str:
        payload = {"metadata": self.metadata, "rows": self.rows, "ratios": self.ratios,
                   "classifications": self.classifications, "error": self.error}
        text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o))


def _res_string(res) -> str:
    if isinstance(res, (list, tuple)):
        return "x".join(str(int(r)) for r in res)
    return str(int(res))


def _kernel(cfg: ScenarioConfig, space):
    op = cfg.operator
    kind = op.get("kind", "hilbert")
    if kind == "hilbert":
        return hilbert_kernel()
    if kind == "riesz":
        return riesz_kernel(space.dim, int(op.get("component", 1)))
    if kind == "bessel":
        return None
    raise ConfigError(f"unknown operator kind {kind!r}")


def _weighted(cfg: ScenarioConfig, T, space):
    if cfg.operator.get("weight"):
        return apply_weight(T, WeightSpec.from_dict(cfg.operator["weight"]), space.points)
    return T


def _build_operator(cfg: ScenarioConfig, space):
    op = cfg.operator
    K = _kernel(cfg, space)
    if K is None:
        T = bessel_riesz_operator(BesselSpec(float(op.get("lambda", 0.0)),
                                             int(op.get("component", space.dim))), space)
    else:
        T = kernel_matrix(K, space, op.get("diagonal_policy", "principal_value_rowsum"))
    return _weighted(cfg, T, space)


def _commutator_fn(cfg: ScenarioConfig, space):
    """``b -> [b, T]``; kernel operators use the self-cell diagonal."""
    K = _kernel(cfg, space)
    if K is None:
        T = _build_operator(cfg, space)
        return lambda b: commutator(b, T)
    return lambda b: _weighted(cfg, kernel_commutator(b, K, space), space)


def _space_dict(cfg: ScenarioConfig) -> dict:
    sd = dict(cfg.space)
    if cfg.operator.get("kind") == "bessel" and "mu" not in sd:
        dim = space_from_config(sd, 2).dim
        w = bessel_weight(float(cfg.operator.get("lambda", 0.0)), dim)
        sd["mu"] = {"kind": "power", "exponent": w.exponent, "axis": w.axis}
    return sd


def _cell(cfg: ScenarioConfig, ctx: dict, fname: str, b: np.ndarray) -> list[tuple[str, str, float]]:
    """All configured quantities for one (function, resolution) cell."""
    space = ctx["space"]
    out = []
    profile = None
    for q in cfg.quantities:
        p = q.params
        if q.name == "schatten":
            if profile is None:
                profile = singular_values(ctx["commutator"](b))
            val = schatten_norm(profile, LorentzParams(p["p"], p["q"]))
        elif q.name == "osc":
            val = osc_norm(b, space, ctx["system"], LorentzParams(p.get("p", 2.0), p.get("q")),
                           p.get("r", 1.0), p.get("measure", "mu"))
        elif q.name == "osc_adjacent":
            val = osc_norm_family(b, ctx["family"], LorentzParams(p.get("p", 2.0), p.get("q")),
                                  p.get("r", 1.0), p.get("measure", "mu"))
        elif q.name == "besov_adhoc":
            val = besov_adhoc(b, space, p["p"], p.get("measure", "nu"))
        elif q.name == "besov_classical":
            val = besov_classical(b, space, p["p"], p.get("d", float(space.dim)),
                                  p.get("measure", "nu"))
        elif q.name == "hajlasz":
            val = hajlasz_norm(b, space, p.get("p", 2.0), p.get("mode", "convex_program"),
                               p.get("measure", "nu")).objective
        elif q.name == "sobolev":
            val = sobolev_norm_grid(b, space, p.get("p", 2.0))
        else:
            val = mb_weak_norm(b, space, p.get("d", float(space.dim)))
        out.append((q.name, q.param_string, float(val)))
    return out


def _context(cfg: ScenarioConfig, res) -> dict:
    space = space_from_config(_space_dict(cfg), res)
    ctx = {"space": space}
    names = {q.name for q in cfg.quantities}
    if "schatten" in names:
        ctx["commutator"] = _commutator_fn(cfg, space)
    G = int(cfg.dyadic.get("generations", 6))
    c = float(cfg.dyadic.get("expansion", 3.0))
    if "osc" in names:
        ctx["system"] = build_dyadic_system(space, G, expansion=c)
    if "osc_adjacent" in names or cfg.dyadic.get("adjacent"):
        ctx["family"] = build_adjacent_family(space, G, expansion=c)
    return ctx


def _ratio_summaries(cfg: ScenarioConfig, rows: list[dict]) -> list[dict]:
    by_key = {(r["function"], r["resolution"], f"{r['quantity']}[{r['params']}]"): r["value"]
              for r in rows}
    out = []
    for num, den in cfg.ratios:
        vals = []
        for (fn, res, lab), v in by_key.items():
            if lab == num and (fn, res, den) in by_key:
                d = by_key[(fn, res, den)]
                vals.append(v / d if d != 0 else (math.nan if v == 0 else math.inf))
        finite = [v for v in vals if math.isfinite(v)]
        lo, hi = (min(finite), max(finite)) if finite else (math.nan, math.nan)
        out.append({"numerator": num, "denominator": den, "count": len(vals),
                    "min": lo, "max": hi, "band": hi / lo if finite and lo > 0 else math.inf})
    return out


def _metadata(cfg: ScenarioConfig) -> dict:
    return {"version": __version__, "scenario": cfg.id, "config_hash": cfg.config_hash(),
            "seed": cfg.seed, "thresholds": cfg.thresholds}


def run_scenario(cfg: ScenarioConfig | dict, threads: int = 1) -> NormReport:
    """Evaluate every configured quantity for every function and resolution.

    A failing module aborts the scenario; the report then carries a
    structured error entry and ``report.ok`` is false.
    """
    if isinstance(cfg, dict):
        cfg = ScenarioConfig.from_dict(cfg)
    seed = cfg.seed if cfg.seed is not None else 0
    fns = families.family_from_config(cfg.functions, seed)
    report = NormReport(metadata=_metadata(cfg))
    if not fns:
        return report
    try:
        for res in cfg.resolutions:
            ctx = _context(cfg, res)
            P = ctx["space"].points
            jobs = [(name, fn(P)) for name, fn in fns]
            if threads > 1:
                with ThreadPoolExecutor(threads) as pool:
                    cells = list(pool.map(lambda job: _cell(cfg, ctx, *job), jobs))
            else:
                cells = [_cell(cfg, ctx, *job) for job in jobs]
            for (name, _), cell in zip(jobs, cells):
                for qname, params, val in cell:
                    report.rows.append({"scenario": cfg.id, "function": name,
                                        "resolution": _res_string(res), "quantity": qname,
                                        "params": params, "value": val})
    except ConfigError:
        raise
    except Exception as err:  # noqa: BLE001 - any module error becomes an error row
        log.error("scenario %s failed: %s", cfg.id, err)
        report.error = {"scenario": cfg.id, "type": type(err).__name__, "message": str(err)}
        return report
    report.ratios = _ratio_summaries(cfg, report.rows)
    return report


def classify(values: Sequence[float], growth_step: float = 0.10,
             stable_total: float = 0.10) -> str:
    """``growth`` if every step rises by at least ``growth_step``, ``stable`` if the
    total relative change is at most ``stable_total``, else ``inconclusive``."""
    v = np.asarray(values, dtype=float)
    if np.all(v == 0):
        return "stable"
    if v[0] > 0 and np.all(v[1:] >= (1 + growth_step) * v[:-1]):
        return "growth"
    if v[0] != 0 and abs(v[-1] - v[0]) <= stable_total * abs(v[0]):
        return "stable"
    return "inconclusive"


def refinement_study(cfg: ScenarioConfig | dict, threads: int = 1) -> NormReport:
    """Run a scenario over at least three resolutions and classify each sequence."""
    if isinstance(cfg, dict):
        cfg = ScenarioConfig.from_dict(cfg)
    if len(cfg.resolutions) < 3:
        raise ConfigError("refinement study needs at least three resolutions")
    report = run_scenario(cfg, threads)
    if not report.ok:
        return report
    order = [_res_string(r) for r in cfg.resolutions]
    seqs: dict[tuple[str, str, str], dict[str, float]] = {}
    for r in report.rows:
        seqs.setdefault((r["function"], r["quantity"], r["params"]), {})[r["resolution"]] = r["value"]
    th = cfg.thresholds
    for (fn, q, params), by_res in seqs.items():
        vals = [by_res[k] for k in order]
        report.classifications.append({
            "function": fn, "quantity": q, "params": params, "values": vals,
            "steps": [b / a - 1 if a else math.nan for a, b in zip(vals, vals[1:])],
            "class": classify(vals, th["growth_step"], th["stable_total"]),
        })
    return report
