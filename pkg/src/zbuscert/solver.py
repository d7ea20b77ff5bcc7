"""Z-bus fixed-point iteration with tracing and rate measurement.

One sweep maps v to Z @ (i_pq(v) + i_i(v)) + w.  Constant-impedance load
parts live inside Z, so only the power and current injections are
re-evaluated per iteration.  The iteration itself never depends on the
diagonal scaling; the scaling enters through the scaled successive-
difference norms used for empirical contraction ratios and through the
contraction-ball membership test.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .assembly import SystemMatrices
from .errors import SingularLoadVoltageError
from .linalg import inf_norm_vector
from .loads import DeltaZip, WyeZip, network_injection_parts
from .network import PHASES

# A stalled run is flagged when the geometric mean of the last ratios
# reaches this level.
NON_CONTRACTING_GEOMEAN = 0.999
NON_CONTRACTING_WINDOW = 10

STATUS_CONVERGED = "converged"
STATUS_MAX_ITERS = "max_iters_reached"
STATUS_DIVERGED = "diverged"
STATUS_SINGULAR = "singular_voltage"


@dataclass(frozen=True, eq=False)
class LambdaChoice:
    """Invertible diagonal scaling used by ball membership and rate norms.

    ``identity`` leaves voltages unscaled; ``diag_w`` scales by the no-load
    voltage so the ball center becomes the all-ones vector; ``custom``
    supplies the diagonal directly.
    """

    mode: str = "identity"
    custom: np.ndarray | None = None

    def __post_init__(self):
        if self.mode not in ("identity", "diag_w", "custom"):
            raise ValueError(f"unknown scaling mode {self.mode!r}")
        if self.mode == "custom":
            if self.custom is None:
                raise ValueError("custom scaling needs an entry vector")
            arr = np.asarray(self.custom, dtype=complex)
            if np.any(np.abs(arr) == 0.0):
                raise ValueError("scaling entries must all be nonzero")
            object.__setattr__(self, "custom", arr)

    def vector(self, system: SystemMatrices) -> np.ndarray:
        if self.mode == "identity":
            return np.ones(system.size, dtype=complex)
        if self.mode == "diag_w":
            if np.any(np.abs(system.w) < 1e-12):
                raise ValueError(
                    "diag_w scaling needs a nonzero no-load voltage on every index"
                )
            return system.w.copy()
        if self.custom.shape != (system.size,):
            raise ValueError(
                f"custom scaling has {self.custom.shape[0]} entries, system has {system.size}"
            )
        return self.custom.copy()


IDENTITY_SCALING = LambdaChoice()


@dataclass(frozen=True, eq=False)
class SolveConfig:
    max_iters: int = 100
    tol: float = 1e-10
    divergence_threshold: float = 1e6
    init: str = "no_load"  # no_load | flat | custom
    init_vector: np.ndarray | None = None
    scaling: LambdaChoice = IDENTITY_SCALING

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.init not in ("no_load", "flat", "custom"):
            raise ValueError(f"unknown initialization {self.init!r}")
        if self.init == "custom" and self.init_vector is None:
            raise ValueError("custom initialization needs a voltage vector")


@dataclass(eq=False)
class SolveTrace:
    """Full record of one fixed-point run."""

    iterates: list[np.ndarray] = field(default_factory=list)
    diffs: list[float] = field(default_factory=list)
    scaled_diffs: list[float] = field(default_factory=list)
    empirical_ratios: list[float] = field(default_factory=list)
    status: str = STATUS_MAX_ITERS
    solution: np.ndarray | None = None
    residual: float | None = None
    non_contracting_tail: bool = False
    failed_at: int | None = None

    @property
    def iterations(self) -> int:
        return len(self.diffs)


def initial_voltage(system: SystemMatrices, config: SolveConfig) -> np.ndarray:
    if config.init == "no_load":
        return system.w.copy()
    if config.init == "flat":
        v = np.empty(system.size, dtype=complex)
        for node in system.network.non_slack:
            sl = system.network.node_slice(node.id)
            v[sl] = [system.v_S[PHASES.index(p)] for p in node.phases]
        return v
    vec = np.asarray(config.init_vector, dtype=complex)
    if vec.shape != (system.size,):
        raise ValueError(
            f"initial voltage has {vec.shape[0]} entries, system has {system.size}"
        )
    return vec.copy()


def zbus_step(
    system: SystemMatrices, wye: WyeZip, delta: DeltaZip, v: np.ndarray
) -> np.ndarray:
    """One sweep of the fixed-point map on plain voltages."""
    i_pq, i_i, _ = network_injection_parts(system.network, wye, delta, v)
    return system.Z @ (i_pq + i_i) + system.w


def scaled_step(
    system: SystemMatrices,
    wye: WyeZip,
    delta: DeltaZip,
    lam: np.ndarray,
    u: np.ndarray,
) -> np.ndarray:
    """One sweep of the equivalent map on scaled voltages u = v / lam."""
    return zbus_step(system, wye, delta, lam * u) / lam


def fixed_point_residual(
    system: SystemMatrices, wye: WyeZip, delta: DeltaZip, v: np.ndarray
) -> float:
    """Nodal current balance error against the direct ZIP evaluation.

    Independent of the iteration's algebra: the loads (all three parts) are
    evaluated directly and compared with the network side of Ohm's law.
    """
    i_pq, i_i, i_z = network_injection_parts(system.network, wye, delta, v)
    balance = system.Y @ v + system.Y_NS @ system.v_S - (i_pq + i_i + i_z)
    return inf_norm_vector(balance)


def solve(
    system: SystemMatrices,
    wye: WyeZip,
    delta: DeltaZip,
    config: SolveConfig = SolveConfig(),
) -> SolveTrace:
    """Run the fixed-point iteration until step tolerance, divergence, or
    the iteration budget is exhausted.

    A converged run additionally records the nodal balance residual of the
    final iterate.  A run that stops on the iteration budget is flagged as
    non-contracting when the recent successive-difference ratios have a
    geometric mean at or above one (up to a small margin).
    """
    lam = config.scaling.vector(system)
    trace = SolveTrace()
    v = initial_voltage(system, config)
    trace.iterates.append(v)
    for t in range(config.max_iters):
        try:
            v_next = zbus_step(system, wye, delta, v)
        except SingularLoadVoltageError:
            trace.status = STATUS_SINGULAR
            trace.failed_at = t
            return trace
        step = v_next - v
        trace.diffs.append(inf_norm_vector(step))
        trace.scaled_diffs.append(inf_norm_vector(step / lam))
        if len(trace.scaled_diffs) >= 2 and trace.scaled_diffs[-2] > 0:
            trace.empirical_ratios.append(
                trace.scaled_diffs[-1] / trace.scaled_diffs[-2]
            )
        trace.iterates.append(v_next)
        v = v_next
        if trace.diffs[-1] <= config.tol:
            trace.status = STATUS_CONVERGED
            trace.solution = v
            trace.residual = fixed_point_residual(system, wye, delta, v)
            return trace
        if not np.all(np.isfinite(v)) or inf_norm_vector(v) > config.divergence_threshold:
            trace.status = STATUS_DIVERGED
            return trace
    trace.status = STATUS_MAX_ITERS
    tail = trace.empirical_ratios[-NON_CONTRACTING_WINDOW:]
    if len(tail) >= NON_CONTRACTING_WINDOW and all(r > 0 for r in tail):
        geomean = math.exp(sum(math.log(r) for r in tail) / len(tail))
        trace.non_contracting_tail = geomean >= NON_CONTRACTING_GEOMEAN
    return trace


def membership_in_ball(
    v: np.ndarray, system: SystemMatrices, scaling: LambdaChoice, radius: float
) -> bool:
    """Whether v lies in the scaled infinity-norm ball of the given radius
    around the no-load voltage (with a small tolerance for roundoff)."""
    lam = scaling.vector(system)
    return inf_norm_vector((v - system.w) / lam) <= radius + 1e-12


def empirical_rate(trace: SolveTrace) -> float:
    """Largest successive-difference ratio of a run, in the scaled norm."""
    if len(trace.iterates) < 3:
        raise ValueError("rate estimation needs at least 3 iterates")
    if not trace.empirical_ratios:
        raise ValueError("no well-defined difference ratios in this trace")
    return max(trace.empirical_ratios)


def write_trace_csv(trace: SolveTrace, fileobj) -> None:
    """Emit the per-iteration record: step norms, ratios, voltage magnitude."""
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(["t", "diff_inf_norm", "empirical_ratio", "max_abs_voltage"])
    for t in range(1, len(trace.iterates)):
        diff = trace.diffs[t - 1]
        if t >= 2 and trace.scaled_diffs[t - 2] > 0:
            ratio = repr(trace.scaled_diffs[t - 1] / trace.scaled_diffs[t - 2])
        else:
            ratio = ""
        writer.writerow(
            [t, repr(diff), ratio, repr(inf_norm_vector(trace.iterates[t]))]
        )
