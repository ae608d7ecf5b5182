"""Experiment driver: config files, task runner, command-line entry.

A config file describes one problem plus any number of verification
tasks.  Two interchangeable formats are accepted: a flat text format
with one ``section.key = value`` assignment per line, and a JSON file
with the same field names nested by section.  Parsing either format and
writing it back is a fixed point, so configs can be round-tripped
between the two.

Each task writes one JSON result file into the output directory.  Every
run also writes a trajectory CSV for solver tasks, a human-readable
``summary.txt`` and a ``manifest.json`` listing the sha256 of every
written file; the manifest timestamp is the only thing that varies
between reruns with the same seed.

Exit codes: 0 success, 1 invalid config or hypothesis violation,
2 a required solve failed to converge.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field as dc_field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from .analysis import (
    classify_decay_regime,
    convolution_limit_check,
    decay_fit,
    glue_energy_gap,
    pohozaev_check,
)
from .grid import Grid, make_grid, radial_profile, write_field_csv
from .inequalities import (
    check_elementary_p3,
    check_lemma34i,
    check_lemma34ii,
    min_constant_34i,
    min_constant_34ii,
    sufficient_constant_34ii,
)
from .model import PotentialSpec, ProblemSpec, validate
from .solver import (
    SolverConfig,
    default_grid,
    minimize,
    minimize_scalar,
    scan_subadditivity,
)

__all__ = [
    "ExperimentConfig",
    "parse_flat",
    "format_flat",
    "load_config",
    "save_config",
    "run",
    "emit_plot_data",
    "main",
]

THREADS_ENV = "BINORM_GS_THREADS"

TASK_NAMES = (
    "solve",
    "scan_subadd",
    "decay_fit",
    "glue_test",
    "pohozaev",
    "check_inequalities",
    "conv_limit",
    "emit_plots",
)
SOLVER_TASKS = ("solve", "scan_subadd", "decay_fit", "glue_test", "pohozaev")


# ---------------------------------------------------------------------------
# flat config format


def _parse_scalar(text: str) -> Any:
    t = text.strip()
    if t == "true":
        return True
    if t == "false":
        return False
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        pass
    return t


def _parse_value(text: str) -> Any:
    t = text.strip()
    if "," in t:
        return [_parse_scalar(part) for part in t.split(",")]
    return _parse_scalar(t)


def _format_scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _format_value(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return ", ".join(_format_scalar(v) for v in value)
    return _format_scalar(value)


def parse_flat(text: str) -> dict:
    """Parse 'section.key = value' lines into a nested dict.

    Blank lines and lines starting with '#' are skipped.  Values are
    typed: true/false, integers, floats, comma-separated lists, else
    strings.
    """
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'section.key = value'")
        key, _, value = line.partition("=")
        path = [part.strip() for part in key.strip().split(".")]
        if not all(path):
            raise ValueError(f"line {lineno}: empty key component in {key!r}")
        node = out
        for part in path[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ValueError(f"line {lineno}: {key!r} nests under a scalar")
        node[path[-1]] = _parse_value(value)
    return out


def format_flat(nested: dict) -> str:
    """Serialize a nested dict back to sorted 'section.key = value' lines.

    Empty strings, empty lists and None are omitted (they cannot be
    represented faithfully in the flat format).
    """
    lines = []

    def walk(prefix: str, node: dict) -> None:
        for key in sorted(node):
            value = node[key]
            dotted = f"{prefix}.{key}" if prefix else key
            if isinstance(value, dict):
                walk(dotted, value)
            elif value is None or value == "" or value == []:
                continue
            else:
                lines.append(f"{dotted} = {_format_value(value)}")

    walk("", nested)
    return "\n".join(lines) + "\n"


def _as_list(value: Any) -> list:
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


@dataclass
class ExperimentConfig:
    """One experiment: a problem, solver knobs, grid, and a task list."""

    problem: ProblemSpec
    solver: SolverConfig = SolverConfig()
    grid_n: int = 0
    grid_length: float = 0.0
    tasks: list[str] = dc_field(default_factory=lambda: ["solve"])
    output_dir: str = "out"
    required: list[str] | None = None
    task_params: dict[str, dict] = dc_field(default_factory=dict)

    def grid(self) -> Grid:
        if self.grid_n:
            return make_grid(self.problem.dim, self.grid_n, self.grid_length)
        return default_grid(self.problem.dim)

    def required_tasks(self) -> set[str]:
        if self.required is None:
            return set(self.tasks) & set(SOLVER_TASKS)
        return set(self.required)


# Near-decoupled symmetric cubic system: total energy is 2 x (-1/96) up
# to O(beta), a closed-form check for minimal configs.
_DEFAULT_PROBLEM = ProblemSpec(
    dim=1,
    p1=1.0,
    p2=1.0,
    p3=1.0,
    mu1=1.0,
    mu2=1.0,
    beta=1e-6,
    alpha1=1.0,
    alpha2=1.0,
)


def _potential_from(node: dict) -> PotentialSpec:
    node = dict(node)
    node["center"] = tuple(_as_list(node.get("center")))
    return PotentialSpec(**node)


def config_from_dict(nested: dict) -> ExperimentConfig:
    """Build a validated config from a nested dict, applying defaults."""
    prob_node = dict(nested.get("problem", {}))
    if "potential1" in nested:
        prob_node["v1"] = _potential_from(nested["potential1"])
    if "potential2" in nested:
        prob_node["v2"] = _potential_from(nested["potential2"])
    if prob_node:
        base = _DEFAULT_PROBLEM.to_dict()
        base["v1"] = _DEFAULT_PROBLEM.v1
        base["v2"] = _DEFAULT_PROBLEM.v2
        base.update(prob_node)
        problem = ProblemSpec(**base)
    else:
        problem = _DEFAULT_PROBLEM
    solver = SolverConfig(**nested.get("solver", {}))
    grid_node = nested.get("grid", {})
    run_node = nested.get("run", {})
    tasks = [str(t) for t in _as_list(run_node.get("tasks", ["solve"]))]
    if not tasks:
        raise ValueError("config must list at least one task")
    for t in tasks:
        if t not in TASK_NAMES:
            raise ValueError(f"unknown task {t!r}; known: {', '.join(TASK_NAMES)}")
    required = run_node.get("required")
    task_params = {
        name: dict(params) for name, params in nested.get("task", {}).items()
    }
    glue = task_params.get("glue_test", {})
    for key, alpha in (("gamma1", problem.alpha1), ("gamma2", problem.alpha2)):
        if key in glue and not (0.0 <= float(glue[key]) <= alpha):
            raise ValueError(
                f"glue_test.{key} = {glue[key]} must lie in [0, {alpha}] "
                f"(componentwise split of the problem masses)"
            )
    return ExperimentConfig(
        problem=problem,
        solver=solver,
        grid_n=int(grid_node.get("n", 0)),
        grid_length=float(grid_node.get("length", 0.0)),
        tasks=tasks,
        output_dir=str(run_node.get("output_dir", "out")),
        required=[str(t) for t in _as_list(required)] if required is not None else None,
        task_params=task_params,
    )


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Nested-dict form of a config (drops redundant potential defaults)."""
    prob = cfg.problem.to_dict()
    v1 = prob.pop("v1")
    v2 = prob.pop("v2")
    out: dict = {
        "problem": prob,
        "potential1": v1,
        "potential2": v2,
        "solver": {
            "dt": cfg.solver.dt,
            "tol_residual": cfg.solver.tol_residual,
            "tol_energy": cfg.solver.tol_energy,
            "max_iters": cfg.solver.max_iters,
            "multi_start": cfg.solver.multi_start,
            "symmetrize_every": cfg.solver.symmetrize_every,
            "rng_seed": cfg.solver.rng_seed,
        },
        "run": {"tasks": list(cfg.tasks), "output_dir": cfg.output_dir},
    }
    if cfg.grid_n:
        out["grid"] = {"n": cfg.grid_n, "length": cfg.grid_length}
    if cfg.required is not None:
        out["run"]["required"] = list(cfg.required)
    if cfg.task_params:
        out["task"] = {k: dict(v) for k, v in cfg.task_params.items()}
    return out


def load_config(path: str | Path) -> ExperimentConfig:
    """Load a config from flat text or JSON (detected by content)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        nested = json.loads(text)
    else:
        nested = parse_flat(text)
    return config_from_dict(nested)


def save_config(cfg: ExperimentConfig, path: str | Path) -> None:
    """Write a config in the format implied by the filename suffix."""
    nested = config_to_dict(cfg)
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(_dumps(nested))
    else:
        path.write_text(format_flat(nested))


# ---------------------------------------------------------------------------
# result serialization


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _dumps(obj: Any) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


class _OutputTray:
    """Collects written files and their hashes for the manifest."""

    def __init__(self, out_dir: Path) -> None:
        self.out_dir = out_dir
        self.files: dict[str, str] = {}
        out_dir.mkdir(parents=True, exist_ok=True)

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.write_text(text)
        self.files[name] = hashlib.sha256(text.encode()).hexdigest()
        return path

    def write_json(self, name: str, obj: Any) -> Path:
        return self.write_text(name, _dumps(obj))

    def add_existing(self, name: str) -> None:
        digest = hashlib.sha256((self.out_dir / name).read_bytes()).hexdigest()
        self.files[name] = digest


# ---------------------------------------------------------------------------
# task implementations


class _Runner:
    def __init__(self, cfg: ExperimentConfig, out_dir: Path, threads: int) -> None:
        self.cfg = cfg
        self.grid = cfg.grid()
        self.threads = threads
        self.tray = _OutputTray(out_dir)
        self.summary: list[str] = []
        self.failed_required: list[str] = []
        self._solve_cache = None

    def params(self, task: str) -> dict:
        return self.cfg.task_params.get(task, {})

    def note(self, line: str) -> None:
        self.summary.append(line)

    def main_solve(self):
        if self._solve_cache is None:
            self._solve_cache = minimize(
                self.cfg.problem, config=self.cfg.solver, grid=self.grid
            )
        return self._solve_cache

    def mark(self, task: str, converged: bool) -> None:
        if not converged and task in self.cfg.required_tasks():
            self.failed_required.append(task)

    # -- tasks --------------------------------------------------------------

    def task_solve(self) -> None:
        res = self.main_solve()
        lam = res.multipliers
        payload = {
            "total": res.report.total,
            "kinetic1": res.report.kinetic1,
            "kinetic2": res.report.kinetic2,
            "potential1": res.report.potential1,
            "potential2": res.report.potential2,
            "self1": res.report.self1,
            "self2": res.report.self2,
            "cross": res.report.cross,
            "lambda1": lam.lambda1,
            "lambda2": lam.lambda2,
        }
        self.tray.write_json("solve.json", payload)
        rows = ["iter,energy,residual"]
        for it, e, r in res.trajectory_energies:
            r_text = repr(r) if math.isfinite(r) else "inf"
            rows.append(f"{it},{e!r},{r_text}")
        self.tray.write_text("trajectory.csv", "\n".join(rows) + "\n")
        for name, comp in (("solve_u1.csv", res.state.u1), ("solve_u2.csv", res.state.u2)):
            write_field_csv(comp, str(self.tray.out_dir / name))
            self.tray.add_existing(name)
        self.mark("solve", res.converged)
        self.note(
            f"solve: energy {res.report.total:.9g}, multipliers "
            f"({lam.lambda1:.6g}, {lam.lambda2:.6g}), "
            f"{res.iterations} iterations, converged={res.converged}"
        )

    def task_scan_subadd(self) -> None:
        p = self.params("scan_subadd")
        steps = int(p.get("steps", 5))
        thetas = [
            (float(t1), float(t2))
            for t1 in np.linspace(0.0, 1.0, steps)
            for t2 in np.linspace(0.0, 1.0, steps)
        ]
        report = scan_subadditivity(
            self.cfg.problem,
            thetas,
            config=self.cfg.solver,
            grid=self.grid,
            threads=self.threads,
        )
        payload = {
            "e_total": report.e_total,
            "points": [
                {
                    "theta1": pt.theta1,
                    "theta2": pt.theta2,
                    "e_inner": pt.e_inner,
                    "e_outer": pt.e_outer,
                    "gap": pt.gap,
                    "trusted": pt.trusted,
                }
                for pt in report.points
            ],
        }
        self.tray.write_json("scan_subadd.json", payload)
        trusted = [pt for pt in report.points if pt.trusted]
        worst = max((pt.gap for pt in trusted), default=math.nan)
        self.mark("scan_subadd", len(trusted) == len(report.points))
        self.note(
            f"scan_subadd: {len(report.points)} splits, "
            f"{len(trusted)} trusted, worst trusted gap {worst:.6g}"
        )

    def task_decay_fit(self) -> None:
        p = self.params("decay_fit")
        res = self.main_solve()
        length = self.grid.length
        window = (
            float(p.get("r1", 0.15 * length)),
            float(p.get("r2", 0.35 * length)),
        )
        lam = (res.multipliers.lambda1, res.multipliers.lambda2)
        order = (0, 1) if lam[0] <= lam[1] else (1, 0)
        lo, hi = lam[order[0]], lam[order[1]]
        fits = []
        ok = res.converged
        for comp_index, comp in ((0, res.state.u1), (1, res.state.u2)):
            fit = decay_fit(comp, window, component=comp_index + 1)
            role = 1 if comp_index == order[0] else 2
            regime = classify_decay_regime(self.cfg.problem.p3, lo, hi, role)
            radii, maxima = radial_profile(comp)
            keep = (radii >= window[0]) & (radii <= window[1]) & (maxima > 1e-14)
            log_vals = np.log(maxima[keep])
            fit_vals = fit.const - fit.rate * radii[keep] + fit.poly_exponent * np.log1p(radii[keep])
            fits.append(
                {
                    "component": comp_index + 1,
                    "rate": fit.rate,
                    "poly": fit.poly_exponent,
                    "r_squared": fit.r_squared,
                    "window": list(fit.window),
                    "n_shells": fit.n_shells,
                    "expected": regime.expected_rate,
                    "tag": regime.tag,
                    "profile": {
                        "r": [float(x) for x in radii[keep]],
                        "log_value": [float(x) for x in log_vals],
                        "fit_value": [float(x) for x in fit_vals],
                    },
                }
            )
        payload = {"lambda1": lam[0], "lambda2": lam[1], "fits": fits}
        self.tray.write_json("decay_fit.json", payload)
        self.mark("decay_fit", ok)
        for f in fits:
            self.note(
                f"decay_fit: component {f['component']} rate {f['rate']:.6g} "
                f"expected {f['expected']:.6g} ({f['tag']})"
            )

    def task_glue_test(self) -> None:
        p = self.params("glue_test")
        prob = self.cfg.problem
        gamma1 = float(p.get("gamma1", 0.5 * prob.alpha1))
        gamma2 = float(p.get("gamma2", 0.5 * prob.alpha2))
        n_cells = [int(n) for n in _as_list(p.get("n_cells"))]
        if not n_cells:
            n_cells = [int(round(f * self.grid.n)) for f in (0.125, 0.1875, 0.25)]
        inner = minimize(
            prob.with_masses(gamma1, gamma2), config=self.cfg.solver, grid=self.grid
        )
        outer = minimize(
            prob.without_potentials().with_masses(
                prob.alpha1 - gamma1, prob.alpha2 - gamma2
            ),
            config=self.cfg.solver,
            grid=self.grid,
        )
        ledgers = glue_energy_gap(prob, inner, outer, n_cells)
        payload = [
            {
                "n": lg.n_cells,
                "kappa1": lg.kappa1,
                "kappa2": lg.kappa2,
                "tau1": lg.tau1,
                "tau2": lg.tau2,
                "gap": lg.gap,
            }
            for lg in ledgers
        ]
        self.tray.write_json("glue_test.json", payload)
        self.mark("glue_test", inner.converged and outer.converged)
        worst = max(lg.gap for lg in ledgers)
        self.note(
            f"glue_test: {len(ledgers)} shifts, worst gap {worst:.6g} "
            f"(negative favours gluing)"
        )

    def task_pohozaev(self) -> None:
        p = self.params("pohozaev")
        prob = self.cfg.problem
        mu = float(p.get("mu", prob.mu1))
        pexp = float(p.get("p", prob.p1))
        gamma = float(p.get("gamma", prob.alpha1))
        res = minimize_scalar(
            mu,
            pexp,
            gamma,
            dim=prob.dim,
            config=self.cfg.solver,
            grid=self.grid,
        )
        lam1 = res.multipliers.lambda1
        check = pohozaev_check(res.state.u1, lam1, mu, pexp)
        payload = {
            "mu": mu,
            "p": pexp,
            "gamma": gamma,
            "lambda": lam1,
            "residual": check.residual,
            "kinetic_term": check.kinetic_term,
            "mass_term": check.mass_term,
            "focusing_term": check.focusing_term,
            "degenerate": check.degenerate,
            "converged": res.converged,
        }
        self.tray.write_json("pohozaev.json", payload)
        self.mark("pohozaev", res.converged)
        self.note(f"pohozaev: residual {check.residual:.3g} at p={pexp}, mu={mu}")

    def task_check_inequalities(self) -> None:
        p = self.params("check_inequalities")
        p_exp = float(p.get("p", self.cfg.problem.p1))
        eta = float(p.get("eta", 0.5 * p_exp))
        reports = []
        c_min = min_constant_34i(p_exp, resolution=float(p.get("resolution", 1e-3)))
        rep_i = replace(check_lemma34i(p_exp, c_min), min_constant_estimate=c_min)
        reports.append(("min constant", rep_i))
        c_suf = sufficient_constant_34ii(p_exp, eta)
        c_min_ii = min_constant_34ii(p_exp, eta)
        rep_ii = replace(
            check_lemma34ii(p_exp, eta, c_suf), min_constant_estimate=c_min_ii
        )
        reports.append(("sufficient constant", rep_ii))
        rep_el = check_elementary_p3(p_exp)
        reports.append(("", rep_el))
        payload = {
            "reports": [
                {
                    "which": rep.which,
                    "note": note,
                    "constant_tested": rep.constant_tested,
                    "min_constant_estimate": rep.min_constant_estimate,
                    "points": rep.points,
                    "worst_defect": rep.worst_defect,
                    "violations": len(rep.violations),
                    "holds": rep.holds,
                    "params": rep.params,
                }
                for note, rep in reports
            ]
        }
        self.tray.write_json("check_inequalities.json", payload)
        viol_rows = ["which,x,y,defect"]
        for _, rep in reports:
            for tup in rep.violations:
                if len(tup) == 3 and isinstance(tup[0], str):
                    tag, a, d = tup
                    viol_rows.append(f"{rep.which}:{tag},{a!r},1.0,{d!r}")
                else:
                    x, y, d = tup
                    viol_rows.append(f"{rep.which},{x!r},{y!r},{d!r}")
        if len(viol_rows) > 1:
            self.tray.write_text("violations.csv", "\n".join(viol_rows) + "\n")
        for note, rep in reports:
            self.note(
                f"check_inequalities: {rep.which} ({note or 'scan'}) "
                f"constant {rep.constant_tested:.6g}: "
                f"{'holds' if rep.holds else 'VIOLATED'}"
            )

    def task_conv_limit(self) -> None:
        p = self.params("conv_limit")
        f_rate = float(p.get("f_rate", 2.0))
        g_rate = float(p.get("g_rate", 1.0))
        poly_power = float(p.get("poly_power", 0.0))
        r_values = [float(r) for r in _as_list(p.get("r_values"))] or [
            0.125 * self.grid.length,
            0.25 * self.grid.length,
        ]
        if f_rate <= g_rate:
            raise ValueError(
                f"conv_limit needs f decaying strictly faster: f_rate {f_rate} "
                f"<= g_rate {g_rate}"
            )

        def f(*coords):
            r = np.sqrt(sum(c**2 for c in coords))
            return np.exp(-f_rate * r)

        def g(*coords):
            r = np.sqrt(sum(c**2 for c in coords))
            return (1.0 + r) ** (-poly_power) * np.exp(-g_rate * r)

        rows = convolution_limit_check(
            f, g, poly_power, g_rate, 1.0, self.grid, r_values, f_rate=f_rate
        )
        payload = {
            "rows": [
                {
                    "r": row.r,
                    "omega": list(row.omega),
                    "scaled": row.scaled,
                    "limit": row.limit,
                    "ratio": row.ratio,
                }
                for row in rows
            ],
            "max_ratio_error": max(abs(row.ratio - 1.0) for row in rows),
        }
        self.tray.write_json("conv_limit.json", payload)
        self.note(
            f"conv_limit: max |ratio - 1| = {payload['max_ratio_error']:.3g} "
            f"over {len(rows)} samples"
        )

    def task_emit_plots(self) -> None:
        written = emit_plot_data(self.tray.out_dir)
        for name in written:
            self.tray.add_existing(name)
        self.note(f"emit_plots: wrote {', '.join(written) if written else 'nothing'}")

    def run_tasks(self, tasks: list[str]) -> None:
        handlers = {
            "solve": self.task_solve,
            "scan_subadd": self.task_scan_subadd,
            "decay_fit": self.task_decay_fit,
            "glue_test": self.task_glue_test,
            "pohozaev": self.task_pohozaev,
            "check_inequalities": self.task_check_inequalities,
            "conv_limit": self.task_conv_limit,
            "emit_plots": self.task_emit_plots,
        }
        for task in tasks:
            handlers[task]()

    def finish(self, seed: int) -> int:
        self.tray.write_text("summary.txt", "\n".join(self.summary) + "\n")
        manifest = {
            "seed": seed,
            "threads": self.threads,
            "files": dict(sorted(self.tray.files.items())),
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        (self.tray.out_dir / "manifest.json").write_text(_dumps(manifest))
        if self.failed_required:
            return 2
        return 0


def run(
    config_path: str | Path,
    tasks: list[str] | None = None,
    out_dir: str | Path | None = None,
    seed: int | None = None,
    threads: int | None = None,
) -> int:
    """Execute a config's tasks; returns the process exit code.

    tasks, out_dir, seed and threads override the config when given.
    """
    cfg = load_config(config_path)
    if seed is not None:
        cfg = replace(cfg, solver=replace(cfg.solver, rng_seed=seed))
    violations = validate(cfg.problem)
    if violations:
        for v in violations:
            print(f"hypothesis violation: {v}", file=sys.stderr)
        return 1
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1"))
    out = Path(out_dir) if out_dir is not None else Path(cfg.output_dir)
    runner = _Runner(cfg, out, threads)
    runner.run_tasks(tasks if tasks is not None else cfg.tasks)
    return runner.finish(cfg.solver.rng_seed)


# ---------------------------------------------------------------------------
# plot data


def emit_plot_data(out_dir: str | Path) -> list[str]:
    """Derive plot-ready CSVs from the result JSONs in a directory.

    Produces subadd_heatmap.csv (theta1,theta2,e_inner,e_outer,gap),
    decay_fits.csv (component,r1,r2,rate,poly,expected,r2), one
    decay_profile_c<i>.csv (r,log_value,fit_value) per fitted component,
    and gap_vs_n.csv (n,kappa1,kappa2,tau1,tau2,gap) for whichever
    inputs exist; returns the names written.
    """
    out = Path(out_dir)
    written = []
    scan = out / "scan_subadd.json"
    if scan.exists():
        data = json.loads(scan.read_text())
        rows = ["theta1,theta2,e_inner,e_outer,gap"]
        for pt in data["points"]:
            rows.append(
                f"{pt['theta1']!r},{pt['theta2']!r},{pt['e_inner']!r},"
                f"{pt['e_outer']!r},{pt['gap']!r}"
            )
        (out / "subadd_heatmap.csv").write_text("\n".join(rows) + "\n")
        written.append("subadd_heatmap.csv")
    decay = out / "decay_fit.json"
    if decay.exists():
        data = json.loads(decay.read_text())
        rows = ["component,r1,r2,rate,poly,expected,r2"]
        for f in data["fits"]:
            rows.append(
                f"{f['component']},{f['window'][0]!r},{f['window'][1]!r},"
                f"{f['rate']!r},{f['poly']!r},{f['expected']!r},{f['r_squared']!r}"
            )
        (out / "decay_fits.csv").write_text("\n".join(rows) + "\n")
        written.append("decay_fits.csv")
        for f in data["fits"]:
            prof = f.get("profile")
            if not prof:
                continue
            name = f"decay_profile_c{f['component']}.csv"
            rows = ["r,log_value,fit_value"]
            for r, lv, fv in zip(prof["r"], prof["log_value"], prof["fit_value"]):
                rows.append(f"{r!r},{lv!r},{fv!r}")
            (out / name).write_text("\n".join(rows) + "\n")
            written.append(name)
    glue = out / "glue_test.json"
    if glue.exists():
        data = json.loads(glue.read_text())
        rows = ["n,kappa1,kappa2,tau1,tau2,gap"]
        for lg in data:
            rows.append(
                f"{lg['n']},{lg['kappa1']!r},{lg['kappa2']!r},"
                f"{lg['tau1']!r},{lg['tau2']!r},{lg['gap']!r}"
            )
        (out / "gap_vs_n.csv").write_text("\n".join(rows) + "\n")
        written.append("gap_vs_n.csv")
    return written


# ---------------------------------------------------------------------------
# command line


_SUBCOMMANDS = {
    "solve": ["solve"],
    "scan-subadd": ["scan_subadd"],
    "decay-fit": ["decay_fit"],
    "glue-test": ["glue_test"],
    "pohozaev": ["pohozaev"],
    "check-inequalities": ["check_inequalities"],
    "conv-limit": ["conv_limit"],
    "emit-plots": ["emit_plots"],
    "run": None,  # full task list from the config
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="binorm-gs",
        description="Two-component constrained ground states and structural checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name)
        if name == "emit-plots":
            p.add_argument("--config")
        else:
            p.add_argument("--config", required=True)
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--seed", type=int, help="solver rng seed override")
        p.add_argument(
            "--threads",
            type=int,
            help=f"worker threads for independent solves (or ${THREADS_ENV})",
        )
    args = parser.parse_args(argv)

    try:
        if args.command == "emit-plots" and args.config is None:
            if args.out is None:
                print("emit-plots needs --config or --out", file=sys.stderr)
                return 1
            emit_plot_data(args.out)
            return 0
        return run(
            args.config,
            tasks=_SUBCOMMANDS[args.command],
            out_dir=args.out,
            seed=args.seed,
            threads=args.threads,
        )
    except (ValueError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
