"""Benchmark harness CLI.

Subcommands:

* ``run --config cfg.json --out DIR`` -- execute every configured
  (solver, instance) pair, write ``trace.csv`` and ``summary.json``.
* ``verify --trace trace.csv --config cfg.json [--strict]`` -- re-check the
  configured certificates against a trace file; exit 0 only if none is
  violated (with --strict, skipped certificates also fail).
* ``figure --config cfg.json --out figure.csv`` -- gap-vs-iteration data for
  the four-method quadratic comparison (AM, accelerated AM with mu=0 and
  mu=mu*, fast gradient).

The config is a single JSON object; see README for the schema. The
environment variable BLOCKMIN_OUT_DIR overrides the output directory of
``run`` (nothing else).

Exit codes: 0 pass, 1 certificate violation, 2 input/config error,
3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import certificates as certs
from .errors import BlockminError, ConfigError, MissingL, TraceParseError
from .problems import (make_composite, make_nonlinear_pl, make_quadratic,
                       make_rank_deficient)
from .solvers import (IterationRecord, SolverConfig, SolverTrace, run_aam,
                      run_am, run_fgm)

CSV_HEADER = ["k", "solver", "f_gap", "grad_norm", "block", "beta", "a", "A",
              "tau", "bound_aam_main", "bound_am_linear", "wall_ms"]

GAP_FLOOR = -1e-12

# certificates computable from a CSV trace (the rest need iterate vectors)
CSV_CERTIFICATES = ("am_linear_pl", "nearly_pl_combined", "aam_main",
                    "aam_Ak_growth", "aam_adaptive", "am_sublinear",
                    "nonacc_max_bound")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    if "instance" not in cfg:
        raise ConfigError("config needs an 'instance' section")
    solvers = cfg.get("solvers", [])
    if not solvers:
        raise ConfigError("config needs a non-empty 'solvers' list")
    names = [s.get("name", s.get("method")) for s in solvers]
    if len(set(names)) != len(names):
        raise ConfigError("solver names must be unique")
    return cfg


class InstanceInfo:
    """Resolved problem plus the constants certificates need."""

    def __init__(self, spec: dict):
        kind = spec.get("kind")
        seed = int(spec.get("seed", 0))
        if kind == "quadratic":
            prob = make_quadratic(seed, int(spec.get("dim", 32)),
                                  float(spec.get("cond_number", 100.0)))
        elif kind == "rank_deficient":
            prob = make_rank_deficient(seed, int(spec.get("dim", 32)),
                                       int(spec.get("rank", int(spec.get("dim", 32)) * 3 // 4)))
        elif kind == "composite":
            prob = make_composite(seed, int(spec.get("dim", 32)),
                                  float(spec.get("gamma", 0.5)),
                                  kinds=tuple(spec.get("kinds", ("l1", "zero"))),
                                  box_bounds=tuple(spec.get("box_bounds", (-0.5, 0.5))),
                                  cond_number=float(spec.get("cond_number", 50.0)))
        elif kind == "nonlinear_pl":
            prob = make_nonlinear_pl(seed, int(spec.get("n", 20)),
                                     int(spec.get("m", 10)),
                                     eps=float(spec.get("eps", 0.25)))
        else:
            raise ConfigError(f"unknown instance kind {kind!r}")
        self.spec = spec
        self.kind = kind
        self.problem = prob
        self.handle = prob.handle()
        self.x0 = np.asarray(prob.default_start, dtype=float)
        self.n_blocks = self.handle.n_blocks
        if kind == "nonlinear_pl":
            self.f_star = 0.0
            self.l_global = None
            self.mu_global = None
            self.l_blocks = None
            self.mu_blocks = None
            self.mu_true = prob.pl_constant
            self.radius = float(np.linalg.norm(self.x0 - prob.x_solution))
            self.sublevel_radius = None
        else:
            self.f_star = prob.f_star
            self.l_global = prob.l_global
            self.mu_global = prob.mu_global
            self.l_blocks = prob.l_blocks
            self.mu_blocks = prob.mu_blocks
            self.mu_true = prob.mu_global
            self.radius = float(np.linalg.norm(self.x0 - prob.x_star))
            self.sublevel_radius = (prob.sublevel_radius(self.x0)
                                    if hasattr(prob, "sublevel_radius") else None)

    def resolve_mu(self, raw) -> float:
        if raw in ("optimal", "true"):
            if not self.mu_true:
                raise ConfigError("instance has no strong convexity constant to resolve")
            return float(self.mu_true)
        return float(raw)

    def resolve_l(self, raw):
        if raw is None:
            return None
        if raw in ("optimal", "true"):
            if self.l_global is None:
                raise ConfigError("instance has no smoothness constant to resolve")
            return float(self.l_global)
        return float(raw)


def _solver_config(entry: dict, info: InstanceInfo) -> SolverConfig:
    known = {"name", "method", "max_iters", "target_gap", "grad_tolerance",
             "mu_assumed", "l_known", "line_search_tol", "rng_seed",
             "momentum_rule"}
    unknown = set(entry) - known
    if unknown:
        raise ConfigError(f"unknown solver option(s): {sorted(unknown)}")
    try:
        return SolverConfig(
            max_iters=int(entry.get("max_iters", 100)),
            target_gap=entry.get("target_gap"),
            grad_tolerance=float(entry.get("grad_tolerance", 1e-13)),
            mu_assumed=info.resolve_mu(entry.get("mu_assumed", 0.0)),
            l_known=info.resolve_l(entry.get("l_known")),
            line_search_tol=float(entry.get("line_search_tol", 1e-10)),
            rng_seed=int(entry.get("rng_seed", 0)),
            momentum_rule=str(entry.get("momentum_rule", "proof")))
    except ValueError as exc:
        raise ConfigError(f"bad solver options: {exc}") from exc


def _run_one(method: str, info: InstanceInfo, cfg: SolverConfig) -> SolverTrace:
    if method == "am":
        return run_am(info.handle, info.x0, cfg)
    if method == "aam":
        return run_aam(info.handle, info.x0, cfg)
    if method == "fgm":
        if cfg.l_known is None and info.l_global is None:
            raise MissingL("fgm needs l_known or an instance with a known L")
        return run_fgm(info.handle, info.x0, cfg)
    raise ConfigError(f"unknown solver method {method!r}")


# ---------------------------------------------------------------------------
# trace CSV
# ---------------------------------------------------------------------------

def _bound_columns(method: str, rec: IterationRecord, info: InstanceInfo,
                   cfg: SolverConfig, gap0: float):
    bound_main = None
    bound_linear = None
    if method == "aam" and rec.k >= 1 and info.l_global is not None:
        nl = info.n_blocks * info.l_global
        geo = 1.0 - np.sqrt(cfg.mu_assumed / nl)
        bound_main = nl * info.radius ** 2 * min(4.0 / rec.k ** 2, geo ** (rec.k - 1))
    if (method == "am" and rec.k >= 1 and rec.k % info.n_blocks == 0
            and info.mu_blocks and min(info.mu_blocks) > 0):
        factor = 1.0
        for li, mi in zip(info.l_blocks, info.mu_blocks):
            factor *= 1.0 - mi / li
        bound_linear = gap0 * factor ** (rec.k // info.n_blocks)
    return bound_main, bound_linear


def write_trace_csv(path, runs, info: InstanceInfo, record_wall: bool):
    rows = []
    for name, method, cfg, trace in runs:
        composite = method == "am"
        gap0 = (trace.records[0].composite_value if composite
                else trace.records[0].f_value) - info.f_star
        for rec in trace.records:
            gap = (rec.composite_value if composite else rec.f_value) - info.f_star
            bound_main, bound_linear = _bound_columns(method, rec, info, cfg, gap0)
            rows.append([
                rec.k, name, _fmt(gap), _fmt(rec.grad_norm),
                "" if rec.block is None else str(rec.block),
                _fmt(rec.beta), _fmt(rec.a), _fmt(rec.a_sum), _fmt(rec.tau),
                _fmt(bound_main), _fmt(bound_linear),
                _fmt(rec.wall_time * 1e3 if record_wall else 0.0)])
    rows.sort(key=lambda r: (r[1], r[0]))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow([str(r[0])] + [str(c) for c in r[1:]])


def read_trace_csv(path) -> dict[str, list[dict]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != CSV_HEADER:
                raise TraceParseError(f"unexpected trace header {header!r}")
            per_solver: dict[str, list[dict]] = {}
            for line in reader:
                if len(line) != len(CSV_HEADER):
                    raise TraceParseError(f"malformed row: {line!r}")
                row = dict(zip(CSV_HEADER, line))
                try:
                    parsed = {
                        "k": int(row["k"]),
                        "f_gap": float(row["f_gap"]),
                        "grad_norm": float(row["grad_norm"]),
                        "block": int(row["block"]) if row["block"] else None,
                        "beta": float(row["beta"]) if row["beta"] else None,
                        "a": float(row["a"]) if row["a"] else None,
                        "A": float(row["A"]) if row["A"] else None,
                        "tau": float(row["tau"]) if row["tau"] else None,
                    }
                except ValueError as exc:
                    raise TraceParseError(f"non-numeric field in row {row!r}") from exc
                per_solver.setdefault(row["solver"], []).append(parsed)
    except OSError as exc:
        raise TraceParseError(f"cannot read trace {path}: {exc}") from exc
    for rows in per_solver.values():
        rows.sort(key=lambda r: r["k"])
    return per_solver


def _trace_from_rows(rows: list[dict], method: str, info: InstanceInfo) -> SolverTrace:
    records = []
    for r in rows:
        val = r["f_gap"] + info.f_star
        records.append(IterationRecord(
            k=r["k"], x=None, f_value=val, composite_value=val,
            grad_norm=r["grad_norm"], block=r["block"], beta=r["beta"],
            a=r["a"], a_sum=r["A"], tau=r["tau"]))
    return SolverTrace(method, records, "from_csv", SolverConfig(), info.n_blocks)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_run(config_path, out_dir) -> int:
    cfg = load_config(config_path)
    info = InstanceInfo(cfg["instance"])
    out = Path(os.environ.get("BLOCKMIN_OUT_DIR", out_dir))
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output path {out} is not writable: {exc}") from exc
    runs = []
    for entry in cfg["solvers"]:
        method = entry.get("method", entry.get("name"))
        name = entry.get("name", method)
        scfg = _solver_config(entry, info)
        trace = _run_one(method, info, scfg)
        runs.append((name, method, scfg, trace))
    write_trace_csv(out / "trace.csv", runs, info, bool(cfg.get("record_wall", False)))
    summary = {
        "instance": cfg["instance"],
        "runs": [{
            "solver": name,
            "method": method,
            "final_gap": (trace.final.composite_value if method == "am"
                          else trace.final.f_value) - info.f_star,
            "iterations": trace.final.k,
            "status": trace.status,
            "wall_ms": trace.final.wall_time * 1e3,
        } for name, method, _, trace in runs],
    }
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out / 'trace.csv'} and {out / 'summary.json'}")
    return 0


def _verify_one(kind: str, method: str, trace: SolverTrace, info: InstanceInfo,
                mu_run: float):
    if kind == "am_linear_pl":
        return certs.check_am_linear(trace, info.l_blocks, info.mu_blocks, info.f_star)
    if kind == "nearly_pl_combined":
        return certs.check_nearly_pl(trace, info.l_blocks, info.mu_blocks, info.f_star)
    if kind == "aam_main":
        return certs.check_aam_main(trace, info.l_global, mu_run, info.n_blocks,
                                    info.radius, info.f_star)
    if kind == "aam_Ak_growth":
        return certs.check_aam_Ak(trace, info.l_global, mu_run, info.n_blocks)
    if kind == "aam_adaptive":
        return certs.check_aam_adaptive(trace, info.mu_true, info.f_star)
    if kind in ("am_sublinear", "nonacc_max_bound"):
        return certs.check_am_sublinear(trace, info.l_blocks, info.sublevel_radius,
                                        info.f_star)
    raise ConfigError(f"certificate {kind!r} cannot be verified from a CSV trace")


_CERT_METHOD = {
    "am_linear_pl": "am", "nearly_pl_combined": "am", "am_sublinear": "am",
    "nonacc_max_bound": "am", "aam_main": "aam", "aam_Ak_growth": "aam",
    "aam_adaptive": "aam",
}


def _applicable(kind: str, method: str, info: InstanceInfo, mu_run: float) -> str | None:
    """Return a skip reason, or None when the certificate applies."""
    if _CERT_METHOD.get(kind) != method:
        return "method mismatch"
    if kind in ("am_linear_pl", "nearly_pl_combined"):
        if not info.mu_blocks or min(info.mu_blocks) <= 0:
            return "missing constants: positive per-block strong convexity"
    if kind in ("am_sublinear", "nonacc_max_bound") and info.sublevel_radius is None:
        return "missing constants: sublevel radius"
    if kind in ("aam_main", "aam_Ak_growth") and info.l_global is None:
        return "missing constants: L"
    if kind == "aam_adaptive":
        if mu_run != 0.0:
            return "applies to mu_assumed = 0 runs only"
        if not info.mu_true:
            return "missing constants: true strong convexity / PL modulus"
    return None


def cmd_verify(trace_path, config_path, strict: bool = False) -> int:
    cfg = load_config(config_path)
    info = InstanceInfo(cfg["instance"])
    per_solver = read_trace_csv(trace_path)
    requested = cfg.get("certificates", [])
    for kind in requested:
        if kind not in certs.BOUND_KINDS:
            raise ConfigError(f"unknown certificate kind {kind!r}")
    results = []
    violations = 0
    skipped = 0
    for entry in cfg["solvers"]:
        method = entry.get("method", entry.get("name"))
        name = entry.get("name", method)
        if name not in per_solver:
            raise TraceParseError(f"trace has no rows for solver {name!r}")
        rows = per_solver[name]
        trace = _trace_from_rows(rows, method, info)
        mu_run = info.resolve_mu(entry.get("mu_assumed", 0.0)) if method == "aam" else 0.0
        # built-in sanity certificate: gaps never dip below the floor
        bad = [r["k"] for r in rows if r["f_gap"] < GAP_FLOOR * (1.0 + abs(info.f_star))]
        results.append({"certificate": "gap_nonnegative", "solver": name,
                        "passed": not bad,
                        "first_failure_k": bad[0] if bad else None,
                        "worst_slack": min((r["f_gap"] for r in rows), default=0.0)})
        if bad:
            violations += 1
        for kind in requested:
            if kind not in CSV_CERTIFICATES:
                results.append({"certificate": kind, "solver": name,
                                "skipped": "needs full iterate vectors (library-level only)"})
                skipped += 1
                continue
            reason = _applicable(kind, method, info, mu_run)
            if reason == "method mismatch":
                continue  # certificate simply targets another solver
            if reason is not None:
                results.append({"certificate": kind, "solver": name, "skipped": reason})
                skipped += 1
                continue
            report = _verify_one(kind, method, trace, info, mu_run)
            results.append({
                "certificate": kind, "solver": name, "passed": report.passed,
                "worst_slack": report.worst_slack,
                "first_failure_k": report.first_failure,
                "rows": len(report.rows), "warnings": report.n_warnings})
            if not report.passed:
                violations += 1
    report = {"trace": str(trace_path), "violations": violations,
              "skipped": skipped, "results": results}
    print(json.dumps(report, indent=2, sort_keys=True, default=float))
    if violations or (strict and skipped):
        return 1
    return 0


def cmd_figure(config_path, out_path) -> int:
    cfg = load_config(config_path)
    inst = cfg["instance"]
    if inst.get("kind") not in ("quadratic",):
        raise ConfigError("figure needs a quadratic instance")
    info = InstanceInfo(inst)
    iters = int(cfg.get("figure_iters", 200))
    base = {"max_iters": iters}
    methods = [
        ("am", "am", dict(base)),
        ("aam_mu0", "aam", dict(base, mu_assumed=0.0)),
        ("aam_mu_star", "aam", dict(base, mu_assumed="optimal")),
        ("fgm", "fgm", dict(base, l_known="optimal")),
    ]
    columns: dict[str, list[float]] = {}
    for name, method, entry in methods:
        scfg = _solver_config(entry, info)
        trace = _run_one(method, info, scfg)
        gaps = [r.f_value - info.f_star for r in trace.records]
        gaps += [gaps[-1]] * (iters + 1 - len(gaps))  # pad early-stopped runs
        columns[name] = gaps
    out = Path(out_path)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "am", "aam_mu0", "aam_mu_star", "fgm"])
            for k in range(iters + 1):
                writer.writerow([str(k)] + [_fmt(columns[n][k])
                                            for n in ("am", "aam_mu0", "aam_mu_star", "fgm")])
    except OSError as exc:
        raise ConfigError(f"cannot write figure data to {out}: {exc}") from exc
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockmin",
                                     description="block-structured solver benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run configured solvers, write trace + summary")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True, help="output directory")
    p_ver = sub.add_parser("verify", help="check certificates against a trace CSV")
    p_ver.add_argument("--trace", required=True)
    p_ver.add_argument("--config", required=True)
    p_ver.add_argument("--strict", action="store_true",
                       help="treat skipped certificates as failures")
    p_fig = sub.add_parser("figure", help="write the four-method comparison data")
    p_fig.add_argument("--config", required=True)
    p_fig.add_argument("--out", required=True, help="output CSV file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.config, args.out)
        if args.command == "verify":
            return cmd_verify(args.trace, args.config, strict=args.strict)
        if args.command == "figure":
            return cmd_figure(args.config, args.out)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, TraceParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BlockminError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
