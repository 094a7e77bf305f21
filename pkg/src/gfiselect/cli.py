"""Batch command-line front end.

Modes: ``select`` (weights, p_o by CV unless fixed, main chain), ``cv`` (p_o
only), ``sim1``/``sim2`` (simulation setups), ``oracle`` (exhaustive
enumeration, small p). Every run writes one JSON result document; simulation
modes also write ``<output>.plot.csv``.

Exit status: 0 success, 1 input error, 2 numerical or initialization failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from .design import RankDeficient, StandardizedDesign, fit_model, standardize
from .enet import ElasticNetConfig, elastic_net_weights
from .experiments import (
    MethodConfig,
    Setup1Config,
    Setup2Config,
    aggregate,
    records,
    run_setup,
    select,
)
from .fiducial import Degenerate
from .oracle import enumerate_posterior
from .sampler import ChainConfig, InitializationFailed
from .tuning import CvConfig, select_p_o

log = logging.getLogger("gfiselect")

MODES = ("select", "cv", "sim1", "sim2", "oracle")


class InputError(ValueError):
    pass


def ingest_csv(path) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Read a CSV whose first column is the response and the rest numeric covariates."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise InputError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if len(header) < 2:
        raise InputError(f"{path}: need a response column and at least one covariate")
    if not body:
        raise InputError(f"{path}: no data rows")
    data = np.empty((len(body), len(header)))
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise InputError(f"{path}: row {i} has {len(row)} fields, expected {len(header)}")
        for j, cell in enumerate(row):
            try:
                data[i - 2, j] = float(cell)
            except ValueError:
                raise InputError(f"{path}: non-numeric value {cell!r} at row {i}, column {j + 1} ({header[j]})") from None
    return data[:, 0].copy(), data[:, 1:].copy(), [h.strip() for h in header[1:]]


def write_csv(path, y, X, names=None, response: str = "y") -> None:
    """Inverse of :func:`ingest_csv`; floats are written with full round-trip precision."""
    X = np.asarray(X, dtype=float)
    names = names or [f"x{j + 1}" for j in range(X.shape[1])]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([response, *names])
        for yi, row in zip(np.asarray(y, dtype=float), X):
            w.writerow([repr(float(yi)), *(repr(float(v)) for v in row)])


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


@dataclass(frozen=True)
class RunConfig:
    mode: str
    output: str
    input: str | None = None
    steps: int = 15000
    burn_in: int = 5000
    n_importance: int = 100
    p_o: int | None = None
    max_model_size: int | None = None
    center: bool | None = None  # None: on for data modes, off for simulations
    seed: int = 0
    threads: int = 1
    replicates: int | None = None
    p: tuple[int, ...] = (100,)
    rho: float = 0.0
    n_ref: int = 10000
    top_k: int = 10

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}")
        if self.mode in ("select", "cv", "oracle") and not self.input:
            raise InputError(f"mode {self.mode} requires --input")
        if not self.steps > self.burn_in >= 0:
            raise InputError("need steps > burn-in >= 0")
        if self.n_importance < 1:
            raise InputError("--n-importance must be >= 1")
        if self.p_o is not None and self.p_o < 0:
            raise InputError("--p-o must be >= 0")
        if self.max_model_size is not None and self.max_model_size < 1:
            raise InputError("--max-model-size must be >= 1")
        if self.threads < 1:
            raise InputError("--threads must be >= 1")
        if self.replicates is not None and self.replicates < 1:
            raise InputError("--replicates must be >= 1")
        if not 0 <= self.rho < 1:
            raise InputError("--rho must lie in [0, 1)")
        if any(v < 8 for v in self.p):
            raise InputError("--p must be >= 8 (setup 1 has eight true covariates)")
        if self.mode == "oracle" and self.n_ref < 1000:
            raise InputError("--n-ref must be >= 1000")

    @property
    def centered(self) -> bool:
        return self.center if self.center is not None else self.mode in ("select", "cv", "oracle")

    def method(self) -> MethodConfig:
        return MethodConfig(
            steps=self.steps,
            burn_in=self.burn_in,
            n_importance=self.n_importance,
            p_o=self.p_o,
            max_size=self.max_model_size,
            cv=CvConfig(max_size=self.max_model_size),
        )

    def echo(self) -> dict:
        out = {f: getattr(self, f) for f in self.__dataclass_fields__}
        out["p"] = list(self.p)
        out["center"] = self.centered
        return out


def _names(M, names):
    return [names[j] for j in M]


def _model_report(d: StandardizedDesign, M, names) -> dict:
    fit = fit_model(d, M)
    raw = fit.beta_hat / d.col_norms[list(M)]
    report = {
        "indices": list(M),
        "names": _names(M, names),
        "coefficients": {names[j]: float(b) for j, b in zip(M, raw)},
    }
    if d.centered:
        report["intercept"] = float(d.y_mean - d.col_means[list(M)] @ raw)
    return report


def _cv_report(cv) -> dict:
    return {
        "grid": list(cv.grid),
        "p_o_star": cv.p_o_star,
        "bic_table": [[None if math.isnan(v) else float(v) for v in row] for row in cv.bic_table],
        "mean_bic": [None if math.isnan(v) else float(v) for v in cv.mean_bic],
    }


def _run_select(cfg: RunConfig, d, names) -> dict:
    chain, p_o, cv, weights = select(d, cfg.method(), cfg.seed)
    s = chain.summary
    out = {
        "p_o": p_o,
        "proposal_weights": [float(v) for v in weights.w],
        "acceptance_rate": chain.acceptance_rate,
        "top_models": [{"indices": list(M), "names": _names(M, names), "r_hat": r} for M, r in s.top(cfg.top_k)],
        "map_model": {**_model_report(d, s.map_model, names), "r_hat": s.r_hat[s.map_model]},
        "inclusion_probabilities": {n: float(v) for n, v in zip(names, s.inclusion_prob)},
    }
    if cv is not None:
        out["cv"] = _cv_report(cv)
    return out


def _run_cv(cfg: RunConfig, d) -> dict:
    ss = np.random.SeedSequence(cfg.seed)
    s_enet, s_cv = (int(s.generate_state(1)[0]) for s in ss.spawn(2))
    weights = elastic_net_weights(d, ElasticNetConfig(seed=s_enet))
    cv = select_p_o(d, weights, CvConfig(max_size=cfg.max_model_size, seed=s_cv))
    return {"p_o": cv.p_o_star, "cv": _cv_report(cv)}


def _run_oracle(cfg: RunConfig, d, names) -> dict:
    p_o = 1 if cfg.p_o is None else cfg.p_o
    max_size = ChainConfig(max_size=cfg.max_model_size).resolved_max_size(d.n, d.p)
    post = enumerate_posterior(d, p_o, max_size, cfg.n_ref, np.random.default_rng(cfg.seed))
    table = sorted(post.table.items(), key=lambda kv: (-kv[1].prob, kv[0]))
    return {
        "p_o": p_o,
        "max_size": max_size,
        "N_ref": post.N_ref,
        "total_probability": float(sum(e.prob for e in post.table.values())),
        "table": [
            {"indices": list(M), "names": _names(M, names), "log_base": e.log_base, "e_h_ref": e.e_h_ref, "prob": e.prob}
            for M, e in table
        ],
    }


def _run_sim(cfg: RunConfig):
    method = cfg.method()
    payload, plot_rows = {"setups": []}, []
    if cfg.mode == "sim2":
        setups = [Setup2Config(replicates=cfg.replicates or 200, seed=cfg.seed)]
    else:
        setups = [Setup1Config(p=p, rho=cfg.rho, replicates=cfg.replicates or 50, seed=cfg.seed) for p in cfg.p]
    for setup in setups:
        results = run_setup(setup, method, workers=cfg.threads)
        rows = records(setup, results)
        payload["setups"].append({"setup": {f: getattr(setup, f) for f in setup.__dataclass_fields__},
                                  "summary": aggregate(results), "replicates": rows})
        plot_rows.extend(rows)
    return payload, plot_rows


def run(cfg: RunConfig) -> dict:
    """Execute one run and write its result document (and plot data for simulations)."""
    result: dict = {"mode": cfg.mode, "seed": cfg.seed, "config": cfg.echo()}
    if cfg.mode in ("select", "cv", "oracle"):
        y, X, names = ingest_csv(cfg.input)
        d = standardize(y, X, center=cfg.centered)
        result["data"] = {"n": d.n, "p": d.p, "columns": names}
        if cfg.mode == "select":
            result.update(_run_select(cfg, d, names))
        elif cfg.mode == "cv":
            result.update(_run_cv(cfg, d))
        else:
            result.update(_run_oracle(cfg, d, names))
    else:
        payload, plot_rows = _run_sim(cfg)
        result.update(payload)
        _write_plot(cfg.output + ".plot.csv", plot_rows)
    _atomic_write(cfg.output, json.dumps(result, indent=2, sort_keys=True) + "\n")
    return result


PLOT_FIELDS = ["p", "replicate", "r_true", "correct_selection", "rmse_test", "r_map", "map_size"]


def _write_plot(path: str, rows: list[dict]) -> None:
    lines = [",".join(PLOT_FIELDS)]
    for r in rows:
        lines.append(",".join(repr(r[f]) if isinstance(r[f], float) else str(r[f]) for f in PLOT_FIELDS))
    _atomic_write(path, "\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gfiselect", description=__doc__.split("\n\n")[0])
    ap.add_argument("--mode", choices=MODES, required=True)
    ap.add_argument("--input", help="CSV with header; first column is the response")
    ap.add_argument("--output", required=True, help="result JSON path")
    ap.add_argument("--steps", type=int, default=15000)
    ap.add_argument("--burn-in", type=int, default=5000)
    ap.add_argument("--n-importance", type=int, default=100)
    ap.add_argument("--p-o", type=int, default=None, help="fixed p_o; skips cross-validation")
    ap.add_argument("--max-model-size", type=int, default=None)
    ap.add_argument("--center", dest="center", action="store_true", default=None)
    ap.add_argument("--no-center", dest="center", action="store_false")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--replicates", type=int, default=None)
    ap.add_argument("--p", type=int, nargs="+", default=[100])
    ap.add_argument("--rho", type=float, default=0.0)
    ap.add_argument("--n-ref", type=int, default=10000, help="importance samples per model (oracle mode)")
    ap.add_argument("--top-k", type=int, default=10)
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig(
            mode=args.mode, output=args.output, input=args.input, steps=args.steps, burn_in=args.burn_in,
            n_importance=args.n_importance, p_o=args.p_o, max_model_size=args.max_model_size,
            center=args.center, seed=args.seed, threads=args.threads, replicates=args.replicates,
            p=tuple(args.p), rho=args.rho, n_ref=args.n_ref, top_k=args.top_k,
        )
        run(cfg)
    except (RankDeficient, Degenerate, InitializationFailed, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"gfiselect: numerical failure ({type(exc).__module__}.{type(exc).__name__}): {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"gfiselect: input error ({type(exc).__module__}.{type(exc).__name__}): {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
