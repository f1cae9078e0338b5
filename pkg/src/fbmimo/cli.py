"""Command-line front end: figure presets, generic sweeps, tables, validation.

Output CSV schema (one row per curve point, schema-stable):
experiment,curve,M,K,policy,precoder,B_bits,snr_db,throughput_bps_hz,std_err,trials,seed,resamples
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import bounds as bd
from . import simulate as sim
from .bounds import ScalingPolicy, ThroughputCurve
from .errors import CapacityError, ConfigError, DomainError
from .precoder import RZF, ZF

CSV_COLUMNS = ["experiment", "curve", "M", "K", "policy", "precoder", "B_bits",
               "snr_db", "throughput_bps_hz", "std_err", "trials", "seed", "resamples"]

FIGURE_IDS = ("miso4x1", "fixed5x5", "scaled5x5", "scaled6x6", "mux4x4",
              "reg5x5", "compare44", "compare44b", "compare88")

_PATH_ALIASES = {
    "brute": sim.BRUTE_FORCE, "brute_force": sim.BRUTE_FORCE,
    "fast": sim.FAST_DECOMPOSITION, "fast_decomposition": sim.FAST_DECOMPOSITION,
}


@dataclass(frozen=True)
class ExperimentSpec:
    """Fully resolved description of one CLI run."""

    command: str
    figure_id: str | None = None
    table_kind: str | None = None
    validate_target: str | None = None
    grid: str = "default"
    M: int = 4
    K: int | None = None
    engine: str = "mu"
    csit: str = "quantized"
    precoder: str = ZF
    scaling: str = "fixed"
    B: int | str | None = None
    b_gap: float | None = None
    alpha: float | None = None
    path: str | None = None
    trials: int = sim.DEFAULT_TRIALS
    seed: int = sim.DEFAULT_SEED
    snr: str | None = None
    out: str | None = None


def parse_snr_grid(text: str) -> tuple:
    """Parse 'lo:step:hi' into an inclusive strictly increasing grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"snr must look like lo:step:hi, got {text!r}")
    try:
        lo, step, hi = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"snr must contain numbers, got {text!r}") from None
    if step <= 0.0 or hi < lo:
        raise ConfigError(f"snr needs step > 0 and hi >= lo, got {text!r}")
    return tuple(np.arange(lo, hi + step / 2.0, step))


def parse_bit_range(value) -> list[int]:
    """Accept an int, 'N', or 'lo..hi' and return the list of bit counts."""
    if isinstance(value, int):
        return [value]
    text = str(value)
    if ".." in text:
        lo_s, _, hi_s = text.partition("..")
        try:
            lo, hi = int(lo_s), int(hi_s)
        except ValueError:
            raise ConfigError(f"B range must look like lo..hi, got {text!r}") from None
        if hi < lo:
            raise ConfigError(f"B range must be increasing, got {text!r}")
        return list(range(lo, hi + 1))
    try:
        return [int(text)]
    except ValueError:
        raise ConfigError(f"B must be an integer or lo..hi range, got {text!r}") from None


def parse_config(text: str) -> ExperimentSpec:
    """Build a spec from JSON text; unknown keys are rejected by name."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return build_spec(raw, {})


def build_spec(file_values: dict, flag_values: dict) -> ExperimentSpec:
    """Merge config-file values with CLI flags (flags win) and validate."""
    allowed = {f.name for f in fields(ExperimentSpec)}
    for key in file_values:
        if key not in allowed:
            raise ConfigError(f"unknown config field {key!r}")
    merged = dict(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    if "command" not in merged or not merged["command"]:
        raise ConfigError("missing required field 'command'")
    spec = ExperimentSpec(**merged)
    _validate_spec(spec)
    return spec


def _validate_spec(spec: ExperimentSpec) -> None:
    if spec.command not in ("sweep", "figure", "table", "validate"):
        raise ConfigError(f"unknown command {spec.command!r}")
    if spec.command == "figure":
        if not spec.figure_id:
            raise ConfigError("command 'figure' requires field 'figure_id'")
        if spec.figure_id not in FIGURE_IDS:
            raise ConfigError(
                f"unknown figure_id {spec.figure_id!r}; expected one of {', '.join(FIGURE_IDS)}")
    elif spec.figure_id is not None:
        raise ConfigError("field 'figure_id' is only valid with command 'figure'")
    if spec.command == "table" and spec.table_kind not in ("quantizer",):
        raise ConfigError(f"unknown table_kind {spec.table_kind!r}; expected 'quantizer'")
    if spec.command == "validate" and spec.validate_target not in ("bounds",):
        raise ConfigError(f"unknown validate_target {spec.validate_target!r}; expected 'bounds'")
    if not isinstance(spec.trials, int) or spec.trials < 1:
        raise ConfigError(f"trials must be a positive integer, got {spec.trials!r}")
    if not isinstance(spec.seed, int):
        raise ConfigError(f"seed must be an integer, got {spec.seed!r}")
    if spec.path is not None and spec.path not in _PATH_ALIASES:
        raise ConfigError(f"path must be one of {sorted(_PATH_ALIASES)}, got {spec.path!r}")
    if spec.snr is not None:
        parse_snr_grid(spec.snr)


def _resolved_path(spec: ExperimentSpec, default: str) -> str:
    return _PATH_ALIASES[spec.path] if spec.path else default


def _grid(spec: ExperimentSpec, default: str) -> tuple:
    return parse_snr_grid(spec.snr if spec.snr else default)


def _analytic_curve(label: str, grid: tuple, M: int, values, seed: int,
                    b_bits: float = math.nan) -> ThroughputCurve:
    n = len(grid)
    return ThroughputCurve(
        label=label, snr_db=np.array(grid), mean_bps_hz=np.asarray(values, dtype=float),
        std_err=np.zeros(n), trials=np.zeros(n, dtype=int), M=M, K=1,
        policy="analytic", precoder="BF", seed=seed, b_bits=np.full(n, b_bits))


def _mu_cfg(spec: ExperimentSpec, M: int, grid: tuple, policy: ScalingPolicy | None,
            precoder: str, csit: str, default_path: str) -> sim.SimConfig:
    return sim.SimConfig(M=M, K=M, snr_grid_db=grid, policy=policy, precoder=precoder,
                         csit=csit, path=_resolved_path(spec, default_path),
                         trials=spec.trials, seed=spec.seed)


def _preset_miso4x1(spec: ExperimentSpec) -> list[ThroughputCurve]:
    M, B = 4, 3
    grid = _grid(spec, "0:5:30")
    refs = [bd.miso_reference(10.0 ** (s / 10.0), M, B) for s in grid]
    curves = [
        _analytic_curve("miso_csit_reference", grid, M, [r.c_csit for r in refs], spec.seed),
        _analytic_curve("miso_nocsit_reference", grid, M, [r.c_nocsit for r in refs], spec.seed),
        _analytic_curve("miso_fb_approx_reference", grid, M,
                        [r.r_fb_approx for r in refs], spec.seed, b_bits=float(B)),
    ]
    cfg = sim.SimConfig(M=M, K=1, snr_grid_db=grid, policy=ScalingPolicy.fixed(B),
                        csit="quantized", path=_resolved_path(spec, sim.BRUTE_FORCE),
                        trials=spec.trials, seed=spec.seed)
    curves.append(sim.miso_feedback_throughput(cfg))
    return curves


def _preset_fixed5x5(spec: ExperimentSpec) -> list[ThroughputCurve]:
    M = 5
    grid = _grid(spec, "0:5:50")
    curves = [sim.mu_throughput(
        _mu_cfg(spec, M, grid, None, ZF, "perfect", sim.FAST_DECOMPOSITION), label="zf_perfect")]
    for B in (10, 15, 20):
        cfg = _mu_cfg(spec, M, grid, ScalingPolicy.fixed(B), ZF, "quantized", sim.FAST_DECOMPOSITION)
        curves.append(sim.mu_throughput(cfg, label=f"zf_quantized_B{B}"))
    return curves


def _preset_scaled5x5(spec: ExperimentSpec) -> list[ThroughputCurve]:
    M = 5
    grid = _grid(spec, "0:5:25")
    perfect = sim.mu_throughput(
        _mu_cfg(spec, M, grid, None, ZF, "perfect", sim.FAST_DECOMPOSITION), label="zf_perfect")
    quant = sim.mu_throughput(
        _mu_cfg(spec, M, grid, ScalingPolicy.approx_3db(2.0), ZF, "quantized",
                sim.FAST_DECOMPOSITION), label="zf_quantized_scaled")
    offset = bd.zf_dpc_power_offset_db(M)
    shifted_grid = tuple(s + offset for s in grid)
    shifted = sim.mu_throughput(
        _mu_cfg(spec, M, shifted_grid, None, ZF, "perfect", sim.FAST_DECOMPOSITION))
    reference = replace(shifted, label="sum_capacity_offset_reference",
                        snr_db=np.array(grid), policy=f"zf_perfect shifted {offset:.2f} dB")
    return [perfect, quant, reference]


def _preset_scaled6x6(spec: ExperimentSpec) -> list[ThroughputCurve]:
    M = 6
    grid = _grid(spec, "0:5:30")
    curves = [sim.mu_throughput(
        _mu_cfg(spec, M, grid, None, ZF, "perfect", sim.FAST_DECOMPOSITION), label="zf_perfect")]
    for b_gap in (2.0, 4.0):
        cfg = _mu_cfg(spec, M, grid, ScalingPolicy.approx_3db(b_gap), ZF, "quantized",
                      sim.FAST_DECOMPOSITION)
        curves.append(sim.mu_throughput(cfg, label=f"zf_quantized_b{b_gap:g}"))
    return curves


def _preset_mux4x4(spec: ExperimentSpec) -> list[ThroughputCurve]:
    M = 4
    grid = _grid(spec, "0:5:40")
    curves = [sim.mu_throughput(
        _mu_cfg(spec, M, grid, None, ZF, "perfect", sim.FAST_DECOMPOSITION), label="zf_perfect")]
    for frac in (0.5, 1.3):
        alpha = frac * (M - 1)
        cfg = _mu_cfg(spec, M, grid, ScalingPolicy.alpha_scaled(alpha), ZF, "quantized",
                      sim.FAST_DECOMPOSITION)
        curves.append(sim.mu_throughput(cfg, label=f"zf_quantized_alpha{alpha:g}"))
    return curves


def _preset_reg5x5(spec: ExperimentSpec) -> list[ThroughputCurve]:
    M = 5
    grid = _grid(spec, "0:5:30")
    policy = ScalingPolicy.approx_3db(2.0)
    return [
        sim.mu_throughput(_mu_cfg(spec, M, grid, None, ZF, "perfect",
                                  sim.FAST_DECOMPOSITION), label="zf_perfect"),
        sim.mu_throughput(_mu_cfg(spec, M, grid, None, RZF, "perfect",
                                  sim.FAST_DECOMPOSITION), label="rzf_perfect"),
        sim.mu_throughput(_mu_cfg(spec, M, grid, policy, ZF, "quantized",
                                  sim.FAST_DECOMPOSITION), label="zf_quantized_scaled"),
        sim.mu_throughput(_mu_cfg(spec, M, grid, policy, RZF, "quantized",
                                  sim.FAST_DECOMPOSITION), label="rzf_quantized_scaled"),
    ]


def _baselines(spec: ExperimentSpec, M: int, grid: tuple) -> list[ThroughputCurve]:
    base = sim.SimConfig(M=M, K=M, snr_grid_db=grid, csit="perfect",
                         trials=spec.trials, seed=spec.seed)
    return [sim.tdma_throughput(base), sim.random_bf_throughput(base)]


def _preset_compare44(spec: ExperimentSpec) -> list[ThroughputCurve]:
    M = 4
    grid = _grid(spec, "0:5:20")
    cfg = _mu_cfg(spec, M, grid, ScalingPolicy.approx_3db(2.0), RZF, "quantized",
                  sim.FAST_DECOMPOSITION)
    return [sim.mu_throughput(cfg, label="rzf_quantized_scaled")] + _baselines(spec, M, grid)


def _preset_compare44b(spec: ExperimentSpec) -> list[ThroughputCurve]:
    M = 4
    grid = _grid(spec, "0:5:20")
    curves = []
    for B in (5, 10, 15, 20):
        cfg = _mu_cfg(spec, M, grid, ScalingPolicy.fixed(B), RZF, "quantized",
                      sim.FAST_DECOMPOSITION)
        curves.append(sim.mu_throughput(cfg, label=f"rzf_quantized_B{B}"))
    return curves + _baselines(spec, M, grid)


def _preset_compare88(spec: ExperimentSpec) -> list[ThroughputCurve]:
    M = 8
    grid = _grid(spec, "0:5:20")
    scaled = _mu_cfg(spec, M, grid, ScalingPolicy.approx_3db(2.0), RZF, "quantized",
                     sim.FAST_DECOMPOSITION)
    fixed = _mu_cfg(spec, M, grid, ScalingPolicy.fixed(20), RZF, "quantized",
                    sim.FAST_DECOMPOSITION)
    return [sim.mu_throughput(scaled, label="rzf_quantized_scaled"),
            sim.mu_throughput(fixed, label="rzf_quantized_B20")] + _baselines(spec, M, grid)


_PRESETS = {
    "miso4x1": _preset_miso4x1,
    "fixed5x5": _preset_fixed5x5,
    "scaled5x5": _preset_scaled5x5,
    "scaled6x6": _preset_scaled6x6,
    "mux4x4": _preset_mux4x4,
    "reg5x5": _preset_reg5x5,
    "compare44": _preset_compare44,
    "compare44b": _preset_compare44b,
    "compare88": _preset_compare88,
}


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def curves_to_rows(experiment: str, curves: list[ThroughputCurve]) -> list[list[str]]:
    rows = []
    for c in curves:
        for j in range(len(c.snr_db)):
            rows.append([
                experiment, c.label, str(c.M), str(c.K), c.policy, c.precoder,
                _fmt(float(c.b_bits[j])), _fmt(float(c.snr_db[j])),
                _fmt(float(c.mean_bps_hz[j])), _fmt(float(c.std_err[j])),
                str(int(c.trials[j])), str(c.seed), str(int(c.resamples[j])),
            ])
    return rows


def _write_csv(out: str | None, experiment: str, header: list[str], rows: list[list[str]]) -> None:
    if out == "-":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    target = out or f"{experiment}.csv"
    with open(target, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _run_figure(spec: ExperimentSpec) -> int:
    curves = _PRESETS[spec.figure_id](spec)
    _write_csv(spec.out, spec.figure_id, CSV_COLUMNS, curves_to_rows(spec.figure_id, curves))
    return 0


def _sweep_policy(spec: ExperimentSpec) -> ScalingPolicy | None:
    if spec.csit == "perfect":
        return None
    if spec.scaling == "fixed":
        if spec.B is None:
            raise ConfigError("fixed scaling requires field 'B'")
        bits = parse_bit_range(spec.B)
        if len(bits) != 1:
            raise ConfigError("sweep takes a single B value, not a range")
        return ScalingPolicy.fixed(bits[0])
    if spec.scaling == "exact":
        if spec.b_gap is None:
            raise ConfigError("exact scaling requires field 'b_gap'")
        return ScalingPolicy.exact_scaled(spec.b_gap)
    if spec.scaling == "approx3":
        if spec.b_gap is None:
            raise ConfigError("approx3 scaling requires field 'b_gap'")
        return ScalingPolicy.approx_3db(spec.b_gap)
    if spec.scaling == "alpha":
        if spec.alpha is None:
            raise ConfigError("alpha scaling requires field 'alpha'")
        return ScalingPolicy.alpha_scaled(spec.alpha)
    raise ConfigError(f"unknown scaling {spec.scaling!r}")


def _run_sweep(spec: ExperimentSpec) -> int:
    grid = _grid(spec, "0:5:40")
    K = spec.K if spec.K is not None else (1 if spec.engine == "miso" else spec.M)
    if spec.engine == "mu":
        cfg = sim.SimConfig(M=spec.M, K=K, snr_grid_db=grid, policy=_sweep_policy(spec),
                            precoder=spec.precoder, csit=spec.csit,
                            path=_resolved_path(spec, sim.FAST_DECOMPOSITION),
                            trials=spec.trials, seed=spec.seed)
        curves = [sim.mu_throughput(cfg)]
    elif spec.engine == "miso":
        cfg = sim.SimConfig(M=spec.M, K=K, snr_grid_db=grid, policy=_sweep_policy(spec),
                            csit="quantized", path=_resolved_path(spec, sim.BRUTE_FORCE),
                            trials=spec.trials, seed=spec.seed)
        curves = [sim.miso_feedback_throughput(cfg)]
    elif spec.engine in ("tdma", "random_bf"):
        cfg = sim.SimConfig(M=spec.M, K=K, snr_grid_db=grid, csit="perfect",
                            trials=spec.trials, seed=spec.seed)
        runner = sim.tdma_throughput if spec.engine == "tdma" else sim.random_bf_throughput
        curves = [runner(cfg)]
    else:
        raise ConfigError(f"unknown engine {spec.engine!r}")
    _write_csv(spec.out, "sweep", CSV_COLUMNS, curves_to_rows("sweep", curves))
    return 0


def _run_table(spec: ExperimentSpec) -> int:
    from .quantizer import (error_upper_bound, expected_error,
                            expected_neg_log2_error, expected_optimal_error)
    if spec.B is None:
        raise ConfigError("table requires field 'B' (single value or lo..hi)")
    header = ["B", "expected_error", "upper_bound", "optimal_lower_mean", "neg_log2_mean"]
    rows = []
    for B in parse_bit_range(spec.B):
        rows.append([str(B), _fmt(expected_error(spec.M, B)), _fmt(error_upper_bound(spec.M, B)),
                     _fmt(expected_optimal_error(spec.M, B)),
                     _fmt(expected_neg_log2_error(spec.M, B))])
    _write_csv(spec.out, f"table_{spec.table_kind}", header, rows)
    return 0


def _run_validate(spec: ExperimentSpec) -> int:
    if spec.grid != "default":
        raise ConfigError(f"unknown validation grid {spec.grid!r}; expected 'default'")
    trials = spec.trials
    seed = spec.seed
    ok = True

    # rate-gap bound dominance over the (M, B, SNR) grid
    grid = parse_snr_grid("0:5:30")
    worst = -math.inf
    violations = 0
    points = 0
    for M in (3, 4, 5, 6):
        for B in (4, 8, 12):
            cfg = sim.SimConfig(M=M, K=M, snr_grid_db=grid, policy=ScalingPolicy.fixed(B),
                                path=sim.FAST_DECOMPOSITION, trials=trials, seed=seed)
            gap = sim.rate_gap(cfg)
            for snr, dr, se in zip(gap.snr_db, gap.mean_bps_hz, gap.std_err):
                bound = bd.rate_gap_bound(10.0 ** (snr / 10.0), M, B)
                points += 1
                slack = dr - (bound + 3.0 * se)
                worst = max(worst, slack)
                if slack > 0.0:
                    violations += 1
    line_ok = violations == 0
    ok &= line_ok
    print(f"rate_gap_dominance: {'PASS' if line_ok else 'FAIL'} "
          f"({points - violations}/{points} points, worst slack {worst:+.4f})")

    # fixed-B ceiling at high SNR
    cfg = sim.SimConfig(M=5, K=5, snr_grid_db=(40.0,), policy=ScalingPolicy.fixed(10),
                        path=sim.FAST_DECOMPOSITION, trials=trials, seed=seed)
    curve = sim.mu_throughput(cfg)
    _, exact = bd.ceiling_fixed_B(5, 10)
    line_ok = bool(curve.mean_bps_hz[0] <= exact)
    ok &= line_ok
    print(f"fixed_bits_ceiling: {'PASS' if line_ok else 'FAIL'} "
          f"(throughput {curve.mean_bps_hz[0]:.2f} <= ceiling {exact:.2f})")

    # scaled feedback keeps the per-user gap under log2(b_gap)
    cfg = sim.SimConfig(M=5, K=5, snr_grid_db=grid, policy=ScalingPolicy.exact_scaled(2.0),
                        path=sim.FAST_DECOMPOSITION, trials=trials, seed=seed)
    gap = sim.rate_gap(cfg)
    line_ok = bool(np.all(gap.mean_bps_hz < 1.0))
    ok &= line_ok
    print(f"scaled_bits_gap: {'PASS' if line_ok else 'FAIL'} "
          f"(max per-user gap {gap.mean_bps_hz.max():.3f} < 1.0)")

    # multiplexing gain follows the alpha prediction
    line_ok = True
    details = []
    for frac in (0.5, 1.3):
        alpha = frac * 3.0
        cfg = sim.SimConfig(M=4, K=4, snr_grid_db=parse_snr_grid("0:5:40"),
                            policy=ScalingPolicy.alpha_scaled(alpha),
                            path=sim.FAST_DECOMPOSITION, trials=trials, seed=seed)
        slope = bd.fit_multiplexing_gain(sim.mu_throughput(cfg))
        predicted = bd.mux_gain_prediction(alpha, 4)
        details.append(f"alpha={alpha:g}: slope {slope:.2f} vs {predicted:g}")
        line_ok &= abs(slope - predicted) <= 0.3
    ok &= line_ok
    print(f"multiplexing_gain: {'PASS' if line_ok else 'FAIL'} ({'; '.join(details)})")

    return 0 if ok else 1


def run(spec: ExperimentSpec) -> int:
    """Execute a resolved spec; returns a process exit code."""
    try:
        if spec.command == "figure":
            return _run_figure(spec)
        if spec.command == "sweep":
            return _run_sweep(spec)
        if spec.command == "table":
            return _run_table(spec)
        return _run_validate(spec)
    except (ConfigError, CapacityError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--trials", type=int, help="Monte Carlo trials per SNR point")
    p.add_argument("--seed", type=int, help="base random seed")
    p.add_argument("--out", help="output CSV path ('-' for stdout)")
    p.add_argument("--snr", help="SNR grid as lo:step:hi in dB")
    p.add_argument("--path", choices=sorted(_PATH_ALIASES), help="quantization path")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbmimo",
        description="Throughput experiments for quantized-feedback multiuser MIMO downlinks")
    subs = parser.add_subparsers(dest="command", required=True)

    p_fig = subs.add_parser("figure", help="run a named experiment preset")
    p_fig.add_argument("figure_id", choices=FIGURE_IDS)
    _add_common_flags(p_fig)

    p_sweep = subs.add_parser("sweep", help="run a single configurable curve")
    _add_common_flags(p_sweep)
    p_sweep.add_argument("--engine", choices=("mu", "miso", "tdma", "random_bf"), default=None)
    p_sweep.add_argument("--M", type=int, dest="M")
    p_sweep.add_argument("--K", type=int, dest="K")
    p_sweep.add_argument("--csit", choices=("perfect", "quantized"))
    p_sweep.add_argument("--precoder", choices=(ZF, RZF))
    p_sweep.add_argument("--scaling", choices=("fixed", "exact", "approx3", "alpha"))
    p_sweep.add_argument("--B", dest="B")
    p_sweep.add_argument("--b-gap", type=float, dest="b_gap")
    p_sweep.add_argument("--alpha", type=float, dest="alpha")

    p_table = subs.add_parser("table", help="tabulate closed-form quantizer statistics")
    p_table.add_argument("table_kind", choices=("quantizer",))
    _add_common_flags(p_table)
    p_table.add_argument("--M", type=int, dest="M")
    p_table.add_argument("--B", dest="B", help="bit count or lo..hi range")

    p_val = subs.add_parser("validate", help="check analytic bounds against simulation")
    p_val.add_argument("validate_target", choices=("bounds",))
    _add_common_flags(p_val)
    p_val.add_argument("--grid", default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = vars(_build_parser().parse_args(argv))
    config_path = args.pop("config", None)
    file_values: dict = {}
    try:
        if config_path:
            try:
                with open(config_path) as fh:
                    text = fh.read()
            except OSError as exc:
                print(f"i/o error: {exc}", file=sys.stderr)
                return 3
            try:
                raw = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from None
            if not isinstance(raw, dict):
                raise ConfigError("config must be a JSON object")
            file_values = raw
        spec = build_spec(file_values, {k: v for k, v in args.items() if v is not None})
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
