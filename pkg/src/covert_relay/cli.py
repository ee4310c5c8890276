"""Command-line front end: scenario files, figure-style sweeps, CSV output.

Scenario files are flat ``key = value`` text with an optional ``[sweep]``
block. Keys with the ``_db`` suffix are decibels and are converted at this
boundary (x_linear = 10**(x_db/10)); bare keys are linear. CSV output uses
comma separation, a header row and 12 significant digits; missing values are
rendered empty, never as 0.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Optional

import numpy as np

from . import kernels
from .covert_rate import effective_rate
from .detection import optimal_threshold
from .errors import DegenerateSample, InfeasibleRate, PowerBudgetExceeded
from .montecarlo import SimConfig, simulate_detection
from .optimizer import maximize_power_control, maximize_rate_control
from .scenario import (
    ChannelDraw,
    PowerControl,
    RateControl,
    SystemParams,
    derived_constants,
)

_DB_KEYS = ("p_s", "p_r_max", "sigma_r_sq", "sigma_d_sq", "sigma_s_sq")
_LINEAR_KEYS = ("r_sd", "epsilon", "h_sr_sq", "h_rs_sq", "q", "p_delta")
_ALL_VALUE_KEYS = tuple(k + "_db" for k in _DB_KEYS) + _DB_KEYS + _LINEAR_KEYS
_SWEEPABLE = _ALL_VALUE_KEYS


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    points: int
    spacing: str  # "linear" | "log"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass
class Scenario:
    entries: dict = field(default_factory=dict)  # raw keys -> float, plus "scheme"
    sweep: Optional[SweepSpec] = None

    @property
    def scheme_name(self) -> str:
        return self.entries["scheme"]

    def linear(self, key: str, default: Optional[float] = None) -> Optional[float]:
        """Linear-unit value for a canonical (bare) key."""
        if key in self.entries:
            return float(self.entries[key])
        if key in _DB_KEYS and key + "_db" in self.entries:
            return 10.0 ** (float(self.entries[key + "_db"]) / 10.0)
        return default

    def with_value(self, raw_key: str, value: float) -> "Scenario":
        ent = dict(self.entries)
        ent[raw_key] = value
        return Scenario(entries=ent, sweep=self.sweep)

    def system_params(self) -> SystemParams:
        return SystemParams(
            p_s=self.linear("p_s"),
            p_r_max=self.linear("p_r_max"),
            sigma_r_sq=self.linear("sigma_r_sq"),
            sigma_d_sq=self.linear("sigma_d_sq"),
            sigma_s_sq=self.linear("sigma_s_sq"),
            r_sd=self.linear("r_sd"),
            epsilon=self.linear("epsilon"),
        )

    def channel(self) -> ChannelDraw:
        h_sr = self.linear("h_sr_sq")
        if h_sr is None:
            raise ScenarioError("scenario omits h_sr_sq")
        h_rs = self.linear("h_rs_sq", h_sr)
        return ChannelDraw(h_sr_sq=h_sr, h_rd_sq=1.0, h_rs_sq=h_rs)

    def scheme(self):
        name = self.scheme_name
        if name == "rate":
            return RateControl(self.linear("q"))
        if name == "power":
            return PowerControl(self.linear("p_delta"))
        raise ScenarioError(f"scheme '{name}' has no single configuration")


def parse_scenario(text: str) -> Scenario:
    """Parse flat key-value scenario text; errors carry line numbers."""
    entries: dict = {}
    sweep_raw: dict = {}
    section = "main"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[sweep]":
            if section == "sweep":
                raise ScenarioError(f"line {lineno}: duplicate [sweep] block")
            section = "sweep"
            continue
        if line.startswith("["):
            raise ScenarioError(f"line {lineno}: unknown section {line!r}")
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        target = entries if section == "main" else sweep_raw
        if key in target:
            raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
        if section == "main":
            if key == "scheme":
                if value not in ("rate", "power", "both"):
                    raise ScenarioError(
                        f"line {lineno}: scheme must be rate, power or both"
                    )
                entries[key] = value
                continue
            if key not in _ALL_VALUE_KEYS:
                raise ScenarioError(f"line {lineno}: unknown key {key!r}")
            try:
                entries[key] = float(value)
            except ValueError:
                raise ScenarioError(f"line {lineno}: bad number {value!r} for {key}")
        else:
            if key not in ("variable", "start", "stop", "start_db", "stop_db",
                           "points", "spacing"):
                raise ScenarioError(f"line {lineno}: unknown sweep key {key!r}")
            sweep_raw[key] = value

    if "scheme" not in entries:
        raise ScenarioError("missing required key 'scheme'")
    for key in _DB_KEYS:
        if key in entries and key + "_db" in entries:
            raise ScenarioError(f"both {key} and {key}_db given")
        if key not in entries and key + "_db" not in entries:
            raise ScenarioError(f"missing required key {key} (or {key}_db)")
    for key in ("r_sd", "epsilon"):
        if key not in entries:
            raise ScenarioError(f"missing required key {key}")
    scheme = entries["scheme"]
    if "q" in entries and "p_delta" in entries:
        raise ScenarioError("exactly one of q / p_delta may be present")
    if scheme == "rate" and "p_delta" in entries:
        raise ScenarioError("scheme rate takes q, not p_delta")
    if scheme == "power" and "q" in entries:
        raise ScenarioError("scheme power takes p_delta, not q")

    sweep = None
    if sweep_raw:
        for need in ("variable", "points"):
            if need not in sweep_raw:
                raise ScenarioError(f"sweep block missing {need!r}")
        var = sweep_raw["variable"]
        if var not in _SWEEPABLE:
            raise ScenarioError(f"sweep variable {var!r} not a scenario key")
        spacing = sweep_raw.get("spacing", "linear")
        if spacing not in ("linear", "log"):
            raise ScenarioError("sweep spacing must be linear or log")

        def _endpoint(name):
            if name in sweep_raw and name + "_db" in sweep_raw:
                raise ScenarioError(f"both {name} and {name}_db in sweep block")
            if name in sweep_raw:
                return float(sweep_raw[name])
            if name + "_db" in sweep_raw:
                if var.endswith("_db"):
                    raise ScenarioError(
                        f"{name}_db is redundant for dB variable {var!r}"
                    )
                return 10.0 ** (float(sweep_raw[name + "_db"]) / 10.0)
            raise ScenarioError(f"sweep block missing {name!r}")

        start = _endpoint("start")
        stop = _endpoint("stop")
        points = int(sweep_raw["points"])
        if points < 2:
            raise ScenarioError("sweep needs at least 2 points")
        if spacing == "log" and (start <= 0 or stop <= 0):
            raise ScenarioError("log spacing needs positive start/stop")
        sweep = SweepSpec(var, start, stop, points, spacing)
    return Scenario(entries=entries, sweep=sweep)


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def serialize_scenario(sc: Scenario) -> str:
    lines = []
    for key, value in sc.entries.items():
        if key == "scheme":
            lines.append(f"scheme = {value}")
        else:
            lines.append(f"{key} = {value!r}")
    if sc.sweep is not None:
        sw = sc.sweep
        lines.append("")
        lines.append("[sweep]")
        lines.append(f"variable = {sw.variable}")
        lines.append(f"start = {sw.start!r}")
        lines.append(f"stop = {sw.stop!r}")
        lines.append(f"points = {sw.points}")
        lines.append(f"spacing = {sw.spacing}")
    return "\n".join(lines) + "\n"


def scenario_path(name: str) -> str:
    """Filesystem path of a shipped scenario file."""
    return str(resources.files("covert_relay").joinpath("scenarios", name))


# ---------------------------------------------------------------------------
# row evaluation
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isnan(x):
        return ""
    return "%.12g" % x


def _closed_form_row(sc: Scenario, warn) -> dict:
    """Analytic columns for a single scenario point."""
    params = sc.system_params()
    h = sc.channel()
    try:
        dc = derived_constants(params, h.h_sr_sq)
        scheme = sc.scheme()
        report = optimal_threshold(scheme, params, dc, h.h_rs_sq)
        rr = effective_rate(scheme, params, dc)
    except (InfeasibleRate, PowerBudgetExceeded) as exc:
        warn(f"transmission infeasible ({exc}); emitting xi_star = 0, r_c = 0")
        return {"xi_star": 0.0, "r_c": 0.0, "tau_star": None, "alpha": None,
                "beta": None, "omega": None, "p_b": None, "p_c": None,
                "_infeasible": True}
    from .scenario import opportunity_probs

    p_b, p_c, _ = opportunity_probs(scheme, params, dc.mu)
    return {
        "xi_star": report.xi_star, "tau_star": report.tau_star,
        "alpha": report.alpha, "beta": report.beta, "omega": report.omega,
        "p_b": p_b, "p_c": p_c, "r_c": rr.r_c, "_infeasible": False,
    }


_EVAL_COLS = ["xi_star", "tau_star", "alpha", "beta", "omega", "p_b", "p_c", "r_c"]
_SWEEP_COLS = ["xi_star", "tau_star", "alpha", "beta", "omega", "r_c"]
_MC_COLS = [
    "alpha_hat", "se_alpha", "beta_hat", "se_beta", "omega_hat", "se_omega",
    "p_b_hat", "se_p_b", "p_c_hat", "se_p_c", "r_c_hat", "se_r_c",
    "xi_hat", "se_xi",
]


def _sweep_scenarios(sc: Scenario):
    """(label_value, scenario) pairs; a single base point when no sweep."""
    if sc.sweep is None:
        yield None, sc
        return
    for value in sc.sweep.values():
        yield float(value), sc.with_value(sc.sweep.variable, float(value))


def cmd_eval(sc: Scenario, warn) -> tuple[list[str], list[list[str]]]:
    if sc.scheme_name == "both":
        raise ScenarioError("eval needs scheme = rate or power")
    row = _closed_form_row(sc, warn)
    return _EVAL_COLS, [[_fmt(row.get(c)) for c in _EVAL_COLS]]


def cmd_sweep(sc: Scenario, warn) -> tuple[list[str], list[list[str]]]:
    if sc.sweep is None:
        raise ScenarioError("sweep command needs a [sweep] block")
    if sc.scheme_name == "both":
        raise ScenarioError("sweep needs scheme = rate or power")
    header = [sc.sweep.variable] + _SWEEP_COLS
    rows = []
    for value, point in _sweep_scenarios(sc):
        row = _closed_form_row(point, lambda m: warn(f"{sc.sweep.variable}={value:g}: {m}"))
        rows.append([_fmt(value)] + [_fmt(row.get(c)) for c in _SWEEP_COLS])
    return header, rows


def _optimize_point(sc: Scenario, which: str):
    """(x_star, r_c_star, report) for one scheme at one scenario point."""
    params = sc.system_params()
    h = sc.channel()
    if which == "rate":
        return maximize_rate_control(params, h)
    return maximize_power_control(params, h)


def cmd_optimize(sc: Scenario, warn) -> tuple[list[str], list[list[str]]]:
    name = sc.scheme_name
    var_cols = [] if sc.sweep is None else [sc.sweep.variable]
    if name == "both":
        header = var_cols + ["q_star", "r_c_star_rate", "p_delta_star", "r_c_star_power"]
    elif name == "rate":
        header = var_cols + ["q_star", "r_c_star", "xi_star", "tau_star",
                             "alpha", "beta", "omega"]
    else:
        header = var_cols + ["p_delta_star", "r_c_star", "xi_star", "tau_star",
                             "alpha", "beta", "omega"]
    rows = []
    for value, point in _sweep_scenarios(sc):
        cells = [] if sc.sweep is None else [_fmt(value)]
        if name == "both":
            q_star, rc_rate, _ = _optimize_point(point, "rate")
            pd_star, rc_power, _ = _optimize_point(point, "power")
            cells += [_fmt(q_star), _fmt(rc_rate), _fmt(pd_star), _fmt(rc_power)]
        else:
            x_star, rc_star, report = _optimize_point(point, name)
            if report is None:
                cells += [_fmt(x_star), _fmt(rc_star), "", "", "", "", ""]
            else:
                cells += [
                    _fmt(x_star), _fmt(rc_star), _fmt(report.xi_star),
                    _fmt(report.tau_star), _fmt(report.alpha), _fmt(report.beta),
                    _fmt(report.omega),
                ]
        rows.append(cells)
    return header, rows


def cmd_verify(sc: Scenario, trials: int, seed: int, warn):
    """Closed-form columns plus Monte Carlo columns; False when a 3-sigma check fails."""
    if sc.scheme_name == "both":
        raise ScenarioError("verify needs scheme = rate or power")
    var_cols = [] if sc.sweep is None else [sc.sweep.variable]
    header = var_cols + _SWEEP_COLS + _MC_COLS
    rows = []
    all_ok = True
    for value, point in _sweep_scenarios(sc):
        row = _closed_form_row(point, warn)
        cells = ([] if sc.sweep is None else [_fmt(value)]) + [
            _fmt(row.get(c)) for c in _SWEEP_COLS
        ]
        if row["_infeasible"]:
            rows.append(cells + [""] * len(_MC_COLS))
            continue
        params = point.system_params()
        h = point.channel()
        sim = SimConfig(n_trials=trials, seed=seed, scheme=point.scheme(),
                        tau=row["tau_star"])
        try:
            emp = simulate_detection(params, sim, h.h_sr_sq, h.h_rs_sq)
        except DegenerateSample as exc:
            warn(f"skipping Monte Carlo columns: {exc}")
            rows.append(cells + [""] * len(_MC_COLS))
            continue
        dc = derived_constants(params, h.h_sr_sq)
        rr = effective_rate(point.scheme(), params, dc)
        from .scenario import opportunity_probs

        p_b, p_c, _ = opportunity_probs(point.scheme(), params, dc.mu)
        checks = [
            ("alpha", row["alpha"], emp.alpha_hat, emp.std_errs["alpha_hat"]),
            ("beta", row["beta"], emp.beta_hat, emp.std_errs["beta_hat"]),
            ("omega", row["omega"], emp.omega_hat, emp.std_errs["omega_hat"]),
            ("p_b", p_b, emp.p_b_hat, emp.std_errs["p_b_hat"]),
            ("p_c", p_c, emp.p_c_hat, emp.std_errs["p_c_hat"]),
            ("r_c", rr.r_c, emp.r_c_hat, emp.std_errs["r_c_hat"]),
        ]
        for label, closed, hat, se in checks:
            if abs(closed - hat) > 3.0 * se + 1e-12:
                warn(f"3-sigma check failed for {label}: closed {closed:.6g} "
                     f"vs empirical {hat:.6g} (se {se:.3g})")
                all_ok = False
        cells += [
            _fmt(emp.alpha_hat), _fmt(emp.std_errs["alpha_hat"]),
            _fmt(emp.beta_hat), _fmt(emp.std_errs["beta_hat"]),
            _fmt(emp.omega_hat), _fmt(emp.std_errs["omega_hat"]),
            _fmt(emp.p_b_hat), _fmt(emp.std_errs["p_b_hat"]),
            _fmt(emp.p_c_hat), _fmt(emp.std_errs["p_c_hat"]),
            _fmt(emp.r_c_hat), _fmt(emp.std_errs["r_c_hat"]),
            _fmt(emp.xi_hat), _fmt(emp.std_errs["xi_hat"]),
        ]
        rows.append(cells)
    return header, rows, all_ok


def cmd_average(sc: Scenario, draws: int, seed: int, warn):
    """Mean optimized covert rate over source-channel draws (unit-mean exponential)."""
    if sc.linear("h_sr_sq") is not None or sc.linear("h_rs_sq") is not None:
        raise ScenarioError("average needs a scenario without h_sr_sq / h_rs_sq")
    if draws < 1:
        raise ScenarioError("average needs at least one draw")
    name = sc.scheme_name
    schemes = ("rate", "power") if name == "both" else (name,)
    var_cols = [] if sc.sweep is None else [sc.sweep.variable]
    if name == "both":
        header = var_cols + ["r_c_star_rate_mean", "r_c_star_rate_se",
                             "r_c_star_power_mean", "r_c_star_power_se"]
    else:
        header = var_cols + ["r_c_star_mean", "r_c_star_se"]
    h_sr = kernels.exponential_draws(seed, draws, sub=2)
    rows = []
    for value, point in _sweep_scenarios(sc):
        params = point.system_params()
        cells = [] if sc.sweep is None else [_fmt(value)]
        for which in schemes:
            vals = np.empty(draws)
            for i in range(draws):
                draw = ChannelDraw.reciprocal(float(h_sr[i]), 1.0)
                if which == "rate":
                    _, vals[i], _ = maximize_rate_control(params, draw)
                else:
                    _, vals[i], _ = maximize_power_control(params, draw)
            mean = float(np.mean(vals))
            se = float(np.std(vals, ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0
            cells += [_fmt(mean), _fmt(se)]
        rows.append(cells)
    return header, rows


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------


def _emit_csv(header, rows, csv_path: Optional[str]):
    text = ",".join(header) + "\n" + "".join(",".join(r) + "\n" for r in rows)
    if csv_path:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


_PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Generated plot script: {csv} -> {png}."""
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

with open({csv!r}, newline="") as fh:
    reader = csv.reader(fh)
    header = next(reader)
    rows = list(reader)

x = [float(r[0]) if r[0] else None for r in rows]
fig, ax = plt.subplots(figsize=(7, 5))
for j, name in enumerate(header[1:], start=1):
    pairs = [(xi, float(r[j])) for xi, r in zip(x, rows) if xi is not None and r[j]]
    if pairs:
        ax.plot([p[0] for p in pairs], [p[1] for p in pairs], marker="o",
                markersize=3, label=name)
ax.set_xlabel(header[0])
ax.grid(True, alpha=0.3)
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
print("wrote {png}")
'''


def _emit_plot_script(path: str, csv_path: str):
    png = csv_path + ".png"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_PLOT_TEMPLATE.format(csv=csv_path, png=png))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="covert-relay",
        description="Covert-communication analysis for amplify-and-forward relays",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("eval", "single closed-form evaluation"),
        ("sweep", "closed-form sweep over the [sweep] block"),
        ("optimize", "covert-constrained rate maximization"),
        ("verify", "closed forms vs Monte Carlo at 3 sigma"),
        ("average", "optimized rate averaged over source-channel draws"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--scenario", required=True, help="scenario file path")
        p.add_argument("--trials", type=int, default=100_000,
                       help="Monte Carlo trials (verify) or draws (average)")
        p.add_argument("--seed", type=int, default=12345, help="64-bit RNG seed")
        p.add_argument("--csv", default=None, help="write CSV here instead of stdout")
        p.add_argument("--plot-script", default=None,
                       help="also write a matplotlib script for the CSV")
    args = parser.parse_args(argv)

    def warn(msg):
        print(f"covert-relay: {msg}", file=sys.stderr)

    try:
        sc = load_scenario(args.scenario)
        ok = True
        if args.command == "eval":
            header, rows = cmd_eval(sc, warn)
        elif args.command == "sweep":
            header, rows = cmd_sweep(sc, warn)
        elif args.command == "optimize":
            header, rows = cmd_optimize(sc, warn)
        elif args.command == "verify":
            header, rows, ok = cmd_verify(sc, args.trials, args.seed, warn)
        else:
            header, rows = cmd_average(sc, args.trials, args.seed, warn)
    except (ScenarioError, OSError, ValueError) as exc:
        warn(str(exc))
        return 2
    if args.plot_script and not args.csv:
        warn("--plot-script needs --csv so the script has a file to read")
        return 2
    _emit_csv(header, rows, args.csv)
    if args.plot_script:
        _emit_plot_script(args.plot_script, args.csv)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
