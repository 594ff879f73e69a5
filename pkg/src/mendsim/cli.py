"""Command-line surface: simulate, figure, bounds, compare, integrated.

Exit codes: 0 success, 2 usage error, 3 configuration error, 4 runtime
failure.  Options merge with precedence command line > config file (JSON,
keys mirror the option names) > built-in defaults; unknown config keys are
hard errors so a typo cannot silently change a figure.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from .bounds import bound_report, distillation_rate, van_trees_distance_floor, yield_comparison
from .closed_forms import no_update_estimator_and_distance
from .estimation import ADAPTIVE, ALTERNATING, FIXED, ROTATING, StrategySpec
from .integrated import DEFAULT_EPSILON, run_integrated
from .output import Curve, emit_csv, emit_svg
from .phase_space import TwoParamQutrit
from .runner import (
    FAILURE_BRANCH,
    NAIVE,
    STORED,
    BudgetError,
    CurvePoint,
    TrialConfig,
    average_over_prior,
    enumerate_exact,
    run_failure_branch_trial,
    run_naive_trial,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4

STRATEGY_CHOICES = (FIXED, ALTERNATING, ROTATING, ADAPTIVE)
MODE_CHOICES = (FAILURE_BRANCH, NAIVE)
FORMAT_CHOICES = ("csv", "csv+svg")

FIGURE_A_SWEEP = (0.3, 0.5, 2.0 ** -0.5, 0.9)
EXACT_FIXED_MAX_K = 12
DEFAULT_TARGET = 0.038
# Seed stride separating per-curve substreams of one master seed.
SEED_STRIDE = 1_000_003


class UsageError(Exception):
    pass


class ConfigError(Exception):
    pass


_PI_PATTERN = re.compile(r"^([+-]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?$")


def parse_angle(value: object) -> float:
    """Angle in radians; accepts decimals and pi fractions like 'pi/4' or '3pi/8'."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value).strip().lower()
    m = _PI_PATTERN.match(text)
    if m:
        coef_text, den_text = m.groups()
        coef = 1.0 if coef_text in ("", "+") else (-1.0 if coef_text == "-" else float(coef_text))
        den = float(den_text) if den_text else 1.0
        if den == 0.0:
            raise ConfigError(f"zero denominator in angle {value!r}")
        return coef * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse angle {value!r}")


def parse_fraction(value: object) -> float:
    """Plain number or a fraction like '4/15'."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value).strip()
    if "/" in text:
        num_text, _, den_text = text.partition("/")
        try:
            num, den = float(num_text), float(den_text)
        except ValueError:
            raise ConfigError(f"cannot parse fraction {value!r}")
        if den == 0.0:
            raise ConfigError(f"zero denominator in {value!r}")
        return num / den
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse number {value!r}")


def _as_int(value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"expected an integer, got {value!r}")
    try:
        out = int(value)
    except ValueError:
        raise ConfigError(f"expected an integer, got {value!r}")
    if isinstance(value, float) and value != out:
        raise ConfigError(f"expected an integer, got {value!r}")
    return out


def _as_choice(choices: tuple[str, ...]):
    def convert(value: object) -> str:
        text = str(value)
        if text not in choices:
            raise ConfigError(f"{text!r} is not one of {choices}")
        return text
    return convert


_CONVERTERS = {
    "a": parse_fraction,
    "alpha_cos2": parse_fraction,
    "beta": parse_angle,
    "step": parse_angle,
    "epsilon": parse_fraction,
    "target": parse_fraction,
    "k": parse_fraction,
    "k_e_naive": parse_fraction,
    "k_e_optimal": parse_fraction,
    "copies": _as_int,
    "parties": _as_int,
    "grid_size": _as_int,
    "seed": _as_int,
    "trials": _as_int,
    "id": _as_int,
    "strategy": _as_choice(STRATEGY_CHOICES),
    "mode": _as_choice(MODE_CHOICES),
    "format": _as_choice(FORMAT_CHOICES),
    "output_dir": str,
}

_COMMON_DEFAULTS = {
    "output_dir": ".",
    "format": "csv+svg",
    "grid_size": 1024,
    "seed": 0,
}

_DEFAULTS = {
    "simulate": _COMMON_DEFAULTS | {
        "a": None, "alpha_cos2": None, "beta": None, "parties": 2, "copies": 20,
        "strategy": ADAPTIVE, "step": math.pi / 8.0, "mode": FAILURE_BRANCH, "trials": 1,
    },
    "figure": _COMMON_DEFAULTS | {"id": None, "copies": 20, "trials": 20000},
    "bounds": {
        "alpha_cos2": 4.0 / 15.0, "beta": math.pi / 4.0, "k": 100.0,
        "target": DEFAULT_TARGET,
    },
    "compare": {
        "alpha_cos2": 4.0 / 15.0, "beta": math.pi / 4.0, "k": 100.0,
        "k_e_naive": 9.0, "k_e_optimal": 7.5,
    },
    "integrated": _COMMON_DEFAULTS | {
        "alpha_cos2": 4.0 / 15.0, "beta": math.pi / 4.0, "copies": 100,
        "epsilon": DEFAULT_EPSILON, "trials": 200,
    },
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mendsim",
        description="Phase-estimation-assisted entanglement conversion simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, keys: dict) -> None:
        p.add_argument("--config", default=None, help="JSON config file")
        for key in keys:
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, default=None, dest=key)

    for name in _DEFAULTS:
        p = sub.add_parser(name)
        add_common(p, _DEFAULTS[name])
    return parser


def merged_options(args: argparse.Namespace, command: str) -> dict:
    defaults = _DEFAULTS[command]
    values = dict(defaults)
    if args.config is not None:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}")
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in raw.items():
            if key not in defaults:
                raise ConfigError(f"unknown config key {key!r} for command {command!r}")
            values[key] = value
    for key in defaults:
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            values[key] = cli_value
    out = {}
    for key, value in values.items():
        if value is None:
            out[key] = None
        else:
            out[key] = _CONVERTERS[key](value)
    return out


def _vendor_params(opts: dict) -> TwoParamQutrit:
    if opts.get("alpha_cos2") is None or opts.get("beta") is None:
        raise ConfigError("need both --alpha-cos2 and --beta")
    try:
        return TwoParamQutrit.from_cos2_alpha(opts["alpha_cos2"], opts["beta"])
    except ValueError as exc:
        raise ConfigError(str(exc))


def _emit(points: list[CurvePoint], curves: list[Curve], stem: str,
          opts: dict, written: list[Path]) -> None:
    out_dir = Path(opts["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    written.append(emit_csv(points, out_dir / f"{stem}.csv"))
    if opts["format"] == "csv+svg":
        written.append(emit_svg(curves, out_dir / f"{stem}.svg"))


def _run_simulate(opts: dict, written: list[Path]) -> None:
    mode = opts["mode"]
    params = None
    if opts["alpha_cos2"] is not None or opts["beta"] is not None:
        params = _vendor_params(opts)
    if mode == FAILURE_BRANCH and (opts["a"] is None) == (params is None):
        raise ConfigError("failure-branch mode needs either --a or the vendor angles")
    if mode == NAIVE and params is None:
        raise ConfigError("naive mode needs the vendor angles")
    strategy = StrategySpec(opts["strategy"], opts["step"])
    try:
        cfg = TrialConfig(
            mode=mode, copies=opts["copies"], strategy=strategy,
            a=opts["a"], params=params, parties=opts["parties"],
            grid_size=opts["grid_size"], master_seed=opts["seed"], trials=opts["trials"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc))
    label = strategy.kind if mode == FAILURE_BRANCH else NAIVE
    if cfg.trials == 1:
        rng = np.random.default_rng(cfg.master_seed)
        true_phi = float(rng.uniform(0.0, 2.0 * math.pi))
        seed = int(rng.integers(2 ** 63))
        run = run_failure_branch_trial if mode == FAILURE_BRANCH else run_naive_trial
        record = run(cfg, true_phi, seed)
        points = [CurvePoint(0, 2.0 / 3.0, 0.0, label)]
        points += [CurvePoint(i + 1, d, 0.0, label) for i, d in enumerate(record.distances)]
        print(f"copies processed: {len(record.entries)}  "
              f"successes: {record.success_count}  failures: {record.failure_count}  "
              f"final distance: {record.final_distance:.12g}")
    else:
        points = average_over_prior(cfg, label)
    _emit(points, [Curve(label, points)], f"simulate-{label}", opts, written)


def _figure_2(opts: dict) -> tuple[list[CurvePoint], list[Curve]]:
    all_points: list[CurvePoint] = []
    curves = []
    for idx, a in enumerate(FIGURE_A_SWEEP):
        label = f"a={a:.4g}"
        cfg = TrialConfig(
            mode=FAILURE_BRANCH, copies=opts["copies"], strategy=StrategySpec(ADAPTIVE),
            a=a, grid_size=opts["grid_size"],
            master_seed=opts["seed"] + SEED_STRIDE * idx, trials=opts["trials"],
        )
        points = average_over_prior(cfg, label)
        all_points += points
        curves.append(Curve(label, points))
    return all_points, curves


def _figure_3(opts: dict) -> tuple[list[CurvePoint], list[Curve]]:
    a = 2.0 ** -0.5
    all_points: list[CurvePoint] = []
    curves = []
    for idx, kind in enumerate((ADAPTIVE, ROTATING, ALTERNATING)):
        label = kind if kind != ROTATING else "rotating(pi/8)"
        cfg = TrialConfig(
            mode=FAILURE_BRANCH, copies=opts["copies"], strategy=StrategySpec(kind),
            a=a, grid_size=opts["grid_size"],
            master_seed=opts["seed"] + SEED_STRIDE * idx, trials=opts["trials"],
        )
        points = average_over_prior(cfg, label)
        all_points += points
        curves.append(Curve(label, points))
    fixed_points = fixed_strategy_curve(opts["copies"], a, opts["grid_size"])
    all_points += fixed_points
    curves.append(Curve("fixed", fixed_points))
    return all_points, curves


def fixed_strategy_curve(copies: int, a: float, grid_size: int,
                         label: str = "fixed") -> list[CurvePoint]:
    """Exact fixed-strategy curve: outcome-tree enumeration while affordable,
    the analytic no-update expressions beyond."""
    exact_k = min(copies, EXACT_FIXED_MAX_K)
    cfg = TrialConfig(mode=FAILURE_BRANCH, copies=exact_k,
                      strategy=StrategySpec(FIXED), a=a, grid_size=grid_size)
    points = enumerate_exact(cfg, label)
    for k in range(exact_k + 1, copies + 1):
        _, dist = no_update_estimator_and_distance(k, a)
        points.append(CurvePoint(k, dist, 0.0, label))
    return points


def _figure_4(opts: dict) -> tuple[list[CurvePoint], list[Curve]]:
    params = TwoParamQutrit.from_cos2_alpha(4.0 / 15.0, math.pi / 4.0)
    naive_cfg = TrialConfig(
        mode=NAIVE, copies=opts["copies"], params=params,
        grid_size=opts["grid_size"], master_seed=opts["seed"], trials=opts["trials"],
    )
    naive_points = average_over_prior(naive_cfg, "naive")
    fb_cfg = TrialConfig(
        mode=FAILURE_BRANCH, copies=opts["copies"], strategy=StrategySpec(ADAPTIVE),
        params=params, grid_size=opts["grid_size"],
        master_seed=opts["seed"] + SEED_STRIDE, trials=opts["trials"],
    )
    fb_points = average_over_prior(fb_cfg, "failure-branch")
    report = bound_report(params)
    bound_points = [
        CurvePoint(k, report.distance_floor(k), 0.0, "bound")
        for k in range(1, opts["copies"] + 1)
    ]
    all_points = naive_points + fb_points + bound_points
    curves = [
        Curve("naive", naive_points),
        Curve("failure-branch", fb_points),
        Curve("bound", bound_points, dotted=True),
    ]
    return all_points, curves


def _run_figure(opts: dict, written: list[Path]) -> None:
    fig_id = opts["id"]
    if fig_id is None:
        raise UsageError("figure requires --id")
    builders = {2: _figure_2, 3: _figure_3, 4: _figure_4}
    if fig_id not in builders:
        raise ConfigError("figure id must be 2, 3 or 4")
    points, curves = builders[fig_id](opts)
    _emit(points, curves, f"figure-{fig_id}", opts, written)


def _run_bounds(opts: dict) -> None:
    params = _vendor_params(opts)
    report = bound_report(params)
    k = opts["k"]
    lines = [
        f"p_success = {report.p_success:.12g}",
        f"qfi_per_copy = {report.qfi_per_copy:.12g}",
        f"distillation_rate = {report.distillation_rate:.12g}",
        f"vidal_rate = {report.vidal_rate:.12g}",
        f"sigma_sq(k={k:g}) = {report.sigma_sq(k):.12g}",
        f"distance_floor(k={k:g}) = {report.distance_floor(k):.12g}",
        f"approximation_regime(k={k:g}) = {report.in_approximation_regime(k)}",
        f"crossing k at target {opts['target']:g} = {report.crossing(opts['target']):.12g}",
    ]
    print("\n".join(lines))


def _run_compare(opts: dict) -> None:
    params = _vendor_params(opts)
    report = bound_report(params)
    k = opts["k"]
    yields = yield_comparison(k, report.p_success, opts["k_e_naive"], opts["k_e_optimal"])
    distill = (k - opts["k_e_optimal"]) * distillation_rate(params.amps)
    print(f"failure-branch yield: {yields.failure_branch_yield:.12g}")
    print(f"naive yield: {yields.naive_yield:.12g}")
    print(f"optimal-naive ceiling: {yields.optimal_naive_yield:.12g}")
    print(f"distillation ceiling: {distill:.12g}")


def _run_integrated(opts: dict, written: list[Path]) -> None:
    params = _vendor_params(opts)
    copies = opts["copies"]
    trials = opts["trials"]
    if copies < 1 or trials < 1:
        raise ConfigError("copies and trials must be positive")
    rng = np.random.default_rng(opts["seed"])
    stored_flags = np.zeros((trials, copies))
    for t in range(trials):
        true_phi = float(rng.uniform(0.0, 2.0 * math.pi))
        run_seed = int(rng.integers(2 ** 63))
        _, record = run_integrated(copies, opts["epsilon"], params, true_phi,
                                   run_seed, grid_size=opts["grid_size"])
        for i, entry in enumerate(record.entries):
            stored_flags[t, i] = 1.0 if entry.branch == STORED else 0.0
    label = "stored"
    points = []
    for i in range(copies):
        col = stored_flags[:, i]
        se = float(col.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        points.append(CurvePoint(i + 1, float(col.mean()), se, label))
    first, second = np.mean(stored_flags[:, : copies // 2]), np.mean(stored_flags[:, copies // 2:])
    print(f"stored fraction: first half {first:.6g}, second half {second:.6g}")
    _emit(points, [Curve(label, points)], "integrated-stored", opts, written)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return code if code in (EXIT_OK, EXIT_USAGE) else EXIT_USAGE
    written: list[Path] = []
    try:
        opts = merged_options(args, args.command)
        if args.command == "simulate":
            _run_simulate(opts, written)
        elif args.command == "figure":
            _run_figure(opts, written)
        elif args.command == "bounds":
            _run_bounds(opts)
        elif args.command == "compare":
            _run_compare(opts)
        else:
            _run_integrated(opts, written)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BudgetError, RuntimeError, OSError, ValueError) as exc:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
