"""Error metrics, CSV serialization and run summaries.

The CSV schema is the stable machine contract:

    t,att_err_rad,verr_n,verr_u,verr_e,perr_n,perr_u,perr_e,converged

with floats printed as their shortest round-trip decimal, which makes output
byte-reproducible across runs of the same configuration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import Quaternion
from .earth import EarthModel, c_en, ecef_to_geodetic
from .errors import GridMismatch, NonUnitQuaternion
from .kinematics import NavState

CSV_HEADER = "t,att_err_rad,verr_n,verr_u,verr_e,perr_n,perr_u,perr_e,converged"


def principal_angle_error(q_true: Quaternion, q_est: Quaternion) -> float:
    """Rotation angle of the relative quaternion, in [0, pi].

    Equal to 2*arccos(|scalar(q_true* o q_est)|), but evaluated through
    atan2 of the vector part so that angles near zero keep full floating
    precision (arccos quantizes at ~1e-8 next to 1). Insensitive to the
    q/-q double cover.
    """
    for q in (q_true, q_est):
        if not q.is_unit():
            raise NonUnitQuaternion("principal angle needs unit quaternions")
    rel = q_true.conjugate().mul(q_est)
    return float(2.0 * math.atan2(float(np.linalg.norm(rel.v)), abs(rel.s)))


@dataclass(frozen=True)
class ErrorRecord:
    """Errors of one algorithm sample against truth, in the local-level frame."""

    t: float
    att_err: float  # principal angle, rad
    vel_err: np.ndarray  # (north, up, east), m/s
    pos_err: np.ndarray  # (north, up, east), m
    converged: bool = True


def error_record(
    t: float,
    truth: NavState,
    estimate: NavState,
    model: EarthModel,
    converged: bool = True,
) -> ErrorRecord:
    """Compare an estimate against truth; vector errors in (north, up, east)."""
    q_en = c_en(ecef_to_geodetic(truth.r_e, model))
    vel = q_en.rotate_frame(estimate.v_e - truth.v_e)
    pos = q_en.rotate_frame(estimate.r_e - truth.r_e)
    att = principal_angle_error(truth.q_eb, estimate.q_eb.normalized())
    return ErrorRecord(t, att, vel, pos, converged)


# ---------------------------------------------------------------------------
# CSV I/O
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def write_error_csv(path, records) -> Path:
    path = Path(path)
    lines = [CSV_HEADER]
    for r in records:
        fields = [
            _fmt(r.t),
            _fmt(r.att_err),
            *(_fmt(v) for v in r.vel_err),
            *(_fmt(v) for v in r.pos_err),
            "1" if r.converged else "0",
        ]
        lines.append(",".join(fields))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_error_csv(path) -> list[ErrorRecord]:
    lines = Path(path).read_text().strip().split("\n")
    if lines[0] != CSV_HEADER:
        raise ValueError(f"unexpected CSV header in {path}")
    records = []
    for line in lines[1:]:
        f = line.split(",")
        records.append(
            ErrorRecord(
                t=float(f[0]),
                att_err=float(f[1]),
                vel_err=np.array([float(f[2]), float(f[3]), float(f[4])]),
                pos_err=np.array([float(f[5]), float(f[6]), float(f[7])]),
                converged=f[8] == "1",
            )
        )
    return records


# ---------------------------------------------------------------------------
# summaries
# ---------------------------------------------------------------------------

def _channel_stats(records) -> dict:
    if not records:
        return {c: {"max": 0.0, "rms": 0.0} for c in ("attitude", "velocity", "position")}
    att = np.array([r.att_err for r in records])
    vel = np.array([np.linalg.norm(r.vel_err) for r in records])
    pos = np.array([np.linalg.norm(r.pos_err) for r in records])
    out = {}
    for name, series in (("attitude", att), ("velocity", vel), ("position", pos)):
        out[name] = {
            "max": float(np.max(series)),
            "rms": float(np.sqrt(np.mean(series**2))),
        }
    return out


def _orders(err: float, ref: float) -> float:
    if err == ref:
        return 0.0
    if ref == 0.0:
        return math.inf
    if err == 0.0:
        return -math.inf
    return math.log10(err / ref)


def summarize(csv_paths: dict) -> dict:
    """Aggregate error CSVs into per-channel max/RMS plus log10 ratios.

    ``csv_paths`` maps algorithm name to CSV path. All series must share the
    time grid. Ratios are reported against the reference algorithm ("tq" when
    present, otherwise the one with the smallest max attitude error) as
    orders of magnitude; they are omitted for single-algorithm summaries.
    """
    records = {name: read_error_csv(p) for name, p in csv_paths.items()}
    grids = [tuple(r.t for r in recs) for recs in records.values()]
    if len(set(grids)) > 1:
        raise GridMismatch("error series do not share a time grid")
    summary = {
        "algorithms": {
            name: {
                **_channel_stats(recs),
                "unconverged_windows": sum(1 for r in recs if not r.converged),
            }
            for name, recs in records.items()
        }
    }
    if len(records) > 1:
        if "tq" in records:
            ref = "tq"
        else:
            ref = min(
                summary["algorithms"],
                key=lambda n: summary["algorithms"][n]["attitude"]["max"],
            )
        ratios = {}
        for name in records:
            if name == ref:
                continue
            ratios[name] = {
                ch: _orders(
                    summary["algorithms"][name][ch]["max"],
                    summary["algorithms"][ref][ch]["max"],
                )
                for ch in ("attitude", "velocity", "position")
            }
        summary["reference"] = ref
        summary["orders_vs_reference"] = ratios
    return summary


def format_summary(summary: dict) -> str:
    """Human-readable table of a :func:`summarize` result."""
    lines = []
    header = f"{'algorithm':>12} {'att max [rad]':>14} {'vel max [m/s]':>14} {'pos max [m]':>13} {'n/conv':>7}"
    lines.append(header)
    for name, stats in summary["algorithms"].items():
        lines.append(
            f"{name:>12} {stats['attitude']['max']:>14.3e} "
            f"{stats['velocity']['max']:>14.3e} {stats['position']['max']:>13.3e} "
            f"{stats['unconverged_windows']:>7d}"
        )
    if "orders_vs_reference" in summary:
        ref = summary["reference"]
        lines.append(f"orders of magnitude above '{ref}' (log10 of max-error ratio):")
        for name, chans in summary["orders_vs_reference"].items():
            lines.append(
                f"{name:>12} attitude {chans['attitude']:+.1f}  "
                f"velocity {chans['velocity']:+.1f}  position {chans['position']:+.1f}"
            )
    return "\n".join(lines)


def write_summary_json(path, summary: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(summary, indent=2, allow_nan=True) + "\n")
    return path
