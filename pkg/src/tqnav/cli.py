"""Command-line harness: simulate, run, compare, selftest.

``run`` propagates the selected algorithms over the configured scenario,
compares them against the analytic truth at window boundaries, and writes one
error CSV per algorithm (plus rendered figures) into the output directory.
Output is deterministic for a fixed configuration.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import baseline, chebyshev, kinematics, report, tqfilter, trajectory
from .algebra import Quaternion
from .config import ALGORITHMS, RunConfig, load_config, preset
from .earth import EarthModel
from .errors import TqnavError
from .kinematics import NavState, TwistVariant, embed_state, make_twists, recover_state
from .plots import render_error_figures
from .report import ErrorRecord, error_record, format_summary, summarize, write_summary_json
from .testing import random_unit_quaternion, random_unit_trident
from .tqfilter import ImuWindow


# ---------------------------------------------------------------------------
# propagation drivers
# ---------------------------------------------------------------------------

def _run_tq(windows, s0, cfg: RunConfig):
    out = []
    for t, state, rep in tqfilter.solve_trajectory(windows, s0, cfg.earth, cfg.solver):
        out.append((t, state, rep.converged))
    return out


def _run_twosample(windows, s0, cfg: RunConfig):
    return [(t, s, True) for t, s in baseline.two_sample_trajectory(windows, s0, cfg.earth)]


def _run_rk4(windows, s0, cfg: RunConfig):
    omega_fn = lambda t: trajectory.angular_rate_body(t, cfg.scenario, cfg.earth)
    force_fn = lambda t: trajectory.specific_force_body(t, cfg.scenario, cfg.earth)
    state = s0
    out = []
    for w in windows:
        t0 = w.t_start
        t1 = w.t_start + w.t_N
        step = (1.0 / cfg.scenario.imu_rate) / cfg.rk4_substeps
        state = kinematics.propagate_traditional(
            state, omega_fn, force_fn, cfg.earth, t0, t1, step
        )
        out.append((t1, state, True))
    return out


_DRIVERS = {"tq": _run_tq, "twosample": _run_twosample, "rk4": _run_rk4}


def run_scenario(cfg: RunConfig) -> dict:
    """Propagate all selected algorithms and write error CSVs (+ figures).

    Returns {algorithm: [ErrorRecord, ...]}; the t = 0 record is the exact
    initialization and therefore all-zero.
    """
    windows = trajectory.synthesize_imu(
        cfg.scenario, cfg.earth, cfg.samples_per_window, mode=cfg.imu_mode
    )
    s0 = trajectory.truth_to_eframe(0.0, cfg.scenario, cfg.earth)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records_by_algo = {}
    for algo in cfg.algos:
        results = _DRIVERS[algo](windows, s0, cfg)
        # the t = 0 record is exact by construction; a zero-length scenario
        # produces a header-only CSV
        records = [error_record(0.0, s0, s0, cfg.earth, True)] if windows else []
        for t, state, conv in results:
            truth = trajectory.truth_to_eframe(t, cfg.scenario, cfg.earth)
            records.append(error_record(t, truth, state, cfg.earth, conv))
        records = records[:: cfg.decimate] if cfg.decimate > 1 else records
        records_by_algo[algo] = records
        report.write_error_csv(out_dir / f"{algo}_errors.csv", records)
    if cfg.figures:
        render_error_figures(records_by_algo, out_dir)
    return records_by_algo


# ---------------------------------------------------------------------------
# simulate: write IMU + truth files
# ---------------------------------------------------------------------------

def write_imu_csv(path, windows) -> Path:
    """IMU increments file: ``t,dthx,dthy,dthz,dvx,dvy,dvz`` per sample."""
    lines = []
    for w in windows:
        for k in range(w.n_samples):
            t = w.t_start + w.sample_times[k]
            vals = [t, *w.gyro[k], *w.accel[k]]
            lines.append(",".join(repr(float(v)) for v in vals))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def load_imu_csv(path, samples_per_window: int) -> list[ImuWindow]:
    """Read an increments file back into windows of the given length."""
    rows = []
    for line in Path(path).read_text().strip().split("\n"):
        if not line:
            continue
        rows.append([float(x) for x in line.split(",")])
    data = np.array(rows)
    n_windows = data.shape[0] // samples_per_window
    windows = []
    for i in range(n_windows):
        chunk = data[i * samples_per_window : (i + 1) * samples_per_window]
        t_start = chunk[0, 0] - (chunk[1, 0] - chunk[0, 0]) if samples_per_window > 1 else 0.0
        windows.append(
            ImuWindow(
                t_start=t_start,
                sample_times=chunk[:, 0] - t_start,
                gyro=chunk[:, 1:4],
                accel=chunk[:, 4:7],
                mode=tqfilter.INCREMENTS,
            )
        )
    return windows


def write_truth_csv(path, cfg: RunConfig) -> Path:
    """Truth state at window boundaries: quaternion, velocity, position (e-frame)."""
    t_N = cfg.samples_per_window / cfg.scenario.imu_rate
    n_windows = int(round(cfg.scenario.duration * cfg.scenario.imu_rate)) // cfg.samples_per_window
    lines = ["t,qw,qx,qy,qz,vx,vy,vz,rx,ry,rz"]
    for j in range(n_windows + 1):
        t = j * t_N
        s = trajectory.truth_to_eframe(t, cfg.scenario, cfg.earth)
        vals = [t, *s.q_eb.wxyz, *s.v_e, *s.r_e]
        lines.append(",".join(repr(float(v)) for v in vals))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------

def _selftest() -> int:
    failures = 0

    def check(name, ok):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failures += 0 if ok else 1

    rng = np.random.default_rng(20260809)

    # group axioms on unit trident quaternions
    worst = 0.0
    for _ in range(300):
        a = random_unit_trident(rng)
        b = random_unit_trident(rng)
        c = random_unit_trident(rng)
        ab_c = a.mul(b).mul(c)
        a_bc = a.mul(b.mul(c))
        worst = max(worst, float(np.max(np.abs(ab_c.packed - a_bc.packed))))
        ident = a.mul(a.conjugate())
        worst = max(
            worst,
            float(np.max(np.abs(ident.packed - np.array([[1, 0, 0, 0], [0] * 4, [0] * 4], dtype=float)))),
        )
        if not a.mul(b).is_unit(1e-12):
            worst = np.inf
    check(f"trident group axioms (residual {worst:.1e})", worst < 1e-12)

    # Chebyshev product/integration identities against quadrature
    taus = np.linspace(-1.0, 1.0, 20001)
    ok = True
    for i in range(0, 9):
        vals = chebyshev.chebyshev_values(taus, i)[i]
        quad = np.trapezoid(vals, taus)  # trapezoid-limited accuracy ~1e-7
        closed = chebyshev.cheb_definite_integral(i, -1.0, 1.0)
        ok = ok and abs(quad - closed) < 1e-5
    check("Chebyshev integral closed forms vs quadrature", ok)

    # embedding round trip
    model = EarthModel.wgs84()
    worst = 0.0
    for _ in range(100):
        q = random_unit_quaternion(rng)
        s = NavState(q, rng.standard_normal(3) * 100, rng.standard_normal(3) * 1e5 + 7e6)
        back = recover_state(embed_state(s, model), model)
        worst = max(worst, float(np.max(np.abs(back.r_e - s.r_e))))
        worst = max(worst, float(np.max(np.abs(back.v_e - s.v_e))))
    check(f"embed/recover round trip (residual {worst:.1e} m)", worst < 1e-6)

    # twist variants satisfy the defining constraint
    worst = 0.0
    for _ in range(100):
        q = random_unit_quaternion(rng)
        total_e = rng.standard_normal(3) * 500
        for variant in TwistVariant:
            tv = q.rotate_frame(total_e) if variant is TwistVariant.EARTH_SIDE else total_e
            body, earth = make_twists(
                rng.standard_normal(3), rng.standard_normal(3), rng.standard_normal(3),
                tv, variant, model,
            )
            lhs = q.mul(body.e2) - earth.e2.mul(q)
            rhs = Quaternion.vector(total_e).mul(q)
            worst = max(worst, float(np.max(np.abs(lhs.wxyz - rhs.wxyz))))
    check(f"twist-variant constraint (residual {worst:.1e})", worst < 1e-12)

    print("selftest:", "OK" if failures == 0 else f"{failures} failure(s)")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _resolve_config(args) -> RunConfig:
    cfg = preset(args.preset)
    if args.config:
        cfg = load_config(args.config, base=cfg)
    updates = {}
    if getattr(args, "algos", None):
        updates["algos"] = tuple(a.strip() for a in args.algos.split(",") if a.strip())
    if getattr(args, "out", None):
        updates["out_dir"] = args.out
    if getattr(args, "decimate", None):
        updates["decimate"] = args.decimate
    if getattr(args, "strict", False):
        updates["strict"] = True
    if getattr(args, "no_figures", False):
        updates["figures"] = False
    if updates:
        import dataclasses

        cfg = dataclasses.replace(cfg, **updates)
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tqnav",
        description="Trident-quaternion strapdown navigation: simulation, "
        "spectral-iterative integration and classical baselines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=str, default=None, help="key = value config file")
        p.add_argument("--preset", type=str, default="paper-vi", help="base preset")
        p.add_argument("--out", type=str, default=None, help="output directory")

    p_sim = sub.add_parser("simulate", help="write synthesized IMU and truth files")
    add_common(p_sim)

    p_run = sub.add_parser("run", help="propagate algorithms and write error CSVs")
    add_common(p_run)
    p_run.add_argument("--algos", type=str, default=None, help=f"comma list from {ALGORITHMS}")
    p_run.add_argument("--decimate", type=int, default=None, help="keep every K-th record")
    p_run.add_argument("--strict", action="store_true", help="fail on unconverged windows")
    p_run.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    p_cmp = sub.add_parser("compare", help="summarize error CSVs")
    p_cmp.add_argument("csvs", nargs="+", help="error CSVs named <algo>_errors.csv")
    p_cmp.add_argument("--out", type=str, default=None, help="summary.json location")

    sub.add_parser("selftest", help="run the built-in property suites")

    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            return _selftest()
        if args.command == "simulate":
            cfg = _resolve_config(args)
            out_dir = Path(cfg.out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            windows = trajectory.synthesize_imu(
                cfg.scenario, cfg.earth, cfg.samples_per_window, mode=cfg.imu_mode
            )
            imu_path = write_imu_csv(out_dir / "imu.csv", windows)
            truth_path = write_truth_csv(out_dir / "truth.csv", cfg)
            print(f"wrote {imu_path} and {truth_path}")
            return 0
        if args.command == "run":
            cfg = _resolve_config(args)
            records = run_scenario(cfg)
            paths = {a: Path(cfg.out_dir) / f"{a}_errors.csv" for a in records}
            summary = summarize(paths)
            print(format_summary(summary))
            if cfg.strict:
                bad = sum(
                    s["unconverged_windows"] for s in summary["algorithms"].values()
                )
                if bad:
                    print(f"{bad} window(s) did not converge", file=sys.stderr)
                    return 1
            return 0
        if args.command == "compare":
            paths = {}
            for c in args.csvs:
                name = Path(c).name.replace("_errors.csv", "")
                paths[name] = Path(c)
            summary = summarize(paths)
            print(format_summary(summary))
            out = Path(args.out) if args.out else Path(args.csvs[0]).parent
            out.mkdir(parents=True, exist_ok=True)
            write_summary_json(out / "summary.json", summary)
            return 0
    except TqnavError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
