"""Contraction-ball convergence certificates for the Z-bus iteration.

The certificate asks for a radius R such that, inside the scaled
infinity-norm ball of radius R around the no-load voltage, (1) every
line-to-neutral voltage stays away from zero, (2) every line-to-line
voltage of delta pairs stays away from zero, (3) the fixed-point map sends
the ball into itself, and (4) the map shrinks distances by a uniform
factor below one.  Conditions (1) and (2) are linear in R; (3) and (4)
are rational with poles at the positivity margins.  The feasible radii are
found by a dense scan plus bisection refinement of each boundary, and the
value of condition (4) doubles as the certified contraction modulus
alpha(R).

All condition coefficients are infinity norms of column-scaled slices of
the effective impedance matrix:

    a1   slope of the line-to-neutral positivity margin (c1 = 1 - a1*R)
    a2   slope of the line-to-line positivity margin    (c2 = 1 - a2*R)
    A_*  self-mapping numerators for power loads (wye / delta columns)
    B_*  self-mapping constants for current loads
    C_*  contraction numerators for power loads
    D_*  contraction numerators for current loads

and the two rational conditions read

    c3:  A_Y/c1 + A_D/c2 + B_Y + B_D <= R
    c4:  C_Y/c1^2 + 2*C_D/c2^2 + 2*D_Y/c1 + 4*D_D/c2 < 1.

When the network has no delta indices the line-to-line margin is vacuous:
its reference distance is reported as infinity and a2 as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assembly import SystemMatrices, assemble_system
from .errors import CertificateUndefinedError
from .loads import DeltaZip, IndexedLoads, WyeZip, index_loads
from .solver import IDENTITY_SCALING, LambdaChoice

SCAN_POINTS = 100_000
BOUNDARY_TOL = 1e-9
VANISHING = 1e-12


@dataclass(eq=False)
class CertificateQuantities:
    """Feeder aggregates the conditions are built from."""

    w_min: float                 # smallest no-load voltage magnitude
    lambda_max: float            # largest scaling magnitude
    rho_min: float               # smallest no-load line-to-line magnitude, inf if no delta indices
    s_wye: np.ndarray            # power loads on wye indices
    i_wye: np.ndarray            # current loads on wye indices
    w_wye: np.ndarray            # no-load voltages on wye indices
    z_wye: np.ndarray            # impedance columns of wye indices (J x |wye|)
    lambda_wye: np.ndarray       # scaling entries on wye indices
    s_delta: np.ndarray          # power loads on delta indices (zero where unpaired)
    i_delta: np.ndarray          # current loads on delta indices
    w_delta: np.ndarray          # no-load line-to-line voltages per delta index
    z_delta: np.ndarray          # paired column differences of Z (J x |delta|), zero where unpaired
    lambda_delta: np.ndarray     # per-node scaling maxima on delta indices
    lam: np.ndarray              # full scaling vector


@dataclass(frozen=True)
class ConditionCoefficients:
    """R-independent constants of the four feasibility conditions."""

    a1: float
    a2: float
    A_Y: float
    A_D: float
    B_Y: float
    B_D: float
    C_Y: float
    C_D: float
    D_Y: float
    D_D: float


@dataclass(frozen=True)
class ConditionValues:
    c1: float
    c2: float
    c3_slack: float
    c4_value: float


@dataclass(eq=False)
class CertificateResult:
    feasible: bool
    r_min: float | None
    r_max: float | None
    intervals: list[tuple[float, float]]
    alpha_curve: list[tuple[float, float]]
    alpha_at_rmin: float | None
    coefficients: ConditionCoefficients


def compute_quantities(
    system: SystemMatrices,
    loads: IndexedLoads,
    scaling: LambdaChoice = IDENTITY_SCALING,
) -> CertificateQuantities:
    """Collect the aggregates behind the feasibility conditions.

    Raises CertificateUndefinedError when a loaded index has a vanishing
    no-load (line-to-line) voltage: the conditions divide by it.
    """
    imap = system.network.index_map
    lam = scaling.vector(system)
    w = system.w

    for k in imap.wye:
        if (loads.s[k] != 0 or loads.i[k] != 0) and abs(w[k]) < VANISHING:
            raise CertificateUndefinedError(
                f"no-load voltage vanishes at loaded node {imap.node_of(k)!r} "
                f"phase {imap.phase_of(k)!r}"
            )

    w_delta = np.zeros(len(imap.delta), dtype=complex)
    lambda_delta = np.zeros(len(imap.delta))
    z_delta = np.zeros((imap.size, len(imap.delta)), dtype=complex)
    for pos, k in enumerate(imap.delta):
        node_id = imap.node_of(k)
        sl = system.network.node_slice(node_id)
        w_delta[pos] = loads.selectors[k] @ w[sl]
        lambda_delta[pos] = np.abs(lam[list(imap.node_indices[node_id])]).max()
        mate = loads.partner[k]
        if mate is not None:
            z_delta[:, pos] = system.Z[:, k] - system.Z[:, mate]
        if (loads.s[k] != 0 or loads.i[k] != 0) and abs(w_delta[pos]) < VANISHING:
            raise CertificateUndefinedError(
                f"no-load line-to-line voltage vanishes at loaded node {node_id!r} "
                f"pair {loads.pair_label[k]!r}"
            )

    wye_idx = list(imap.wye)
    return CertificateQuantities(
        w_min=float(np.abs(w).min()),
        lambda_max=float(np.abs(lam).max()),
        rho_min=float(np.abs(w_delta).min()) if len(imap.delta) else math.inf,
        s_wye=loads.s[wye_idx],
        i_wye=loads.i[wye_idx],
        w_wye=w[wye_idx],
        z_wye=system.Z[:, wye_idx],
        lambda_wye=lam[wye_idx],
        s_delta=loads.s[list(imap.delta)],
        i_delta=loads.i[list(imap.delta)],
        w_delta=w_delta,
        z_delta=z_delta,
        lambda_delta=lambda_delta,
        lam=lam,
    )


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Entrywise num/den with the convention 0/0 = 0.

    A zero numerator zeroes the whole column regardless of the divisor;
    nonzero numerators over vanishing divisors are rejected upstream.
    """
    out = np.zeros_like(num)
    mask = num != 0
    out[mask] = num[mask] / den[mask]
    return out


def compute_coefficients(q: CertificateQuantities) -> ConditionCoefficients:
    """Reduce the aggregates to the ten scalar condition coefficients."""
    inv_lam = 1.0 / np.abs(q.lam)

    def scaled_norm(z_block: np.ndarray, col_scale: np.ndarray) -> float:
        if z_block.shape[1] == 0:
            return 0.0
        row_sums = np.abs(z_block) @ np.abs(col_scale)
        return float((row_sums * inv_lam).max())

    abs_w_wye = np.abs(q.w_wye)
    abs_w_delta = np.abs(q.w_delta)
    a1 = q.lambda_max / q.w_min if q.w_min > 0 else math.inf
    # The line-to-line margin only exists when delta indices exist, so the
    # rho sentinel value never leaks into delta-free results.
    if q.s_delta.size == 0:
        a2 = 0.0
    elif q.rho_min > 0:
        a2 = 2.0 * q.lambda_max / q.rho_min
    else:
        a2 = math.inf
    return ConditionCoefficients(
        a1=a1,
        a2=a2,
        A_Y=scaled_norm(q.z_wye, _safe_ratio(np.abs(q.s_wye), abs_w_wye)),
        A_D=scaled_norm(q.z_delta, _safe_ratio(np.abs(q.s_delta), abs_w_delta)),
        B_Y=scaled_norm(q.z_wye, np.abs(q.i_wye)),
        B_D=scaled_norm(q.z_delta, np.abs(q.i_delta)),
        C_Y=scaled_norm(
            q.z_wye, _safe_ratio(np.abs(q.s_wye) * np.abs(q.lambda_wye), abs_w_wye**2)
        ),
        C_D=scaled_norm(
            q.z_delta, _safe_ratio(np.abs(q.s_delta) * q.lambda_delta, abs_w_delta**2)
        ),
        D_Y=scaled_norm(
            q.z_wye, _safe_ratio(np.abs(q.i_wye) * np.abs(q.lambda_wye), abs_w_wye)
        ),
        D_D=scaled_norm(
            q.z_delta, _safe_ratio(np.abs(q.i_delta) * q.lambda_delta, abs_w_delta)
        ),
    )


def condition_values(coeffs: ConditionCoefficients, radius: float) -> ConditionValues:
    """Evaluate the four conditions at one radius.

    Nonpositive positivity margins make the rational conditions report
    violation (slack -inf, modulus +inf) rather than raising.
    """
    c1 = 1.0 - radius * coeffs.a1
    c2 = math.inf if coeffs.a2 == 0.0 else 1.0 - radius * coeffs.a2
    if c1 <= 0 or c2 <= 0:
        return ConditionValues(c1=c1, c2=c2, c3_slack=-math.inf, c4_value=math.inf)
    delta_a = coeffs.A_D / c2 if coeffs.A_D else 0.0
    delta_c = 2.0 * coeffs.C_D / c2**2 if coeffs.C_D else 0.0
    delta_d = 4.0 * coeffs.D_D / c2 if coeffs.D_D else 0.0
    c3_slack = radius - (coeffs.A_Y / c1 + delta_a + coeffs.B_Y + coeffs.B_D)
    c4_value = coeffs.C_Y / c1**2 + delta_c + 2.0 * coeffs.D_Y / c1 + delta_d
    return ConditionValues(c1=c1, c2=c2, c3_slack=c3_slack, c4_value=c4_value)


def conditions_hold(coeffs: ConditionCoefficients, radius: float) -> bool:
    if radius <= 0:
        return False
    values = condition_values(coeffs, radius)
    return (
        values.c1 > 0
        and values.c2 > 0
        and values.c3_slack >= 0
        and values.c4_value < 1
    )


def _bisect_boundary(
    coeffs: ConditionCoefficients, lo: float, hi: float, feasible_side_hi: bool
) -> float:
    """Refine a feasibility boundary between lo and hi to BOUNDARY_TOL."""
    while hi - lo > BOUNDARY_TOL:
        mid = 0.5 * (lo + hi)
        if conditions_hold(coeffs, mid) == feasible_side_hi:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def solve_region(
    coeffs: ConditionCoefficients,
    curve_samples: int = 200,
    scan_points: int = SCAN_POINTS,
) -> CertificateResult:
    """Find all radii where the four conditions hold simultaneously.

    Dense scan over (0, R_cap] followed by bisection of every feasibility
    boundary, where R_cap sits just below the smaller positivity pole.
    Disconnected feasible intervals, should they occur, are all reported;
    the primary (r_min, r_max) is the lowest one.
    """
    caps = [c for c in (coeffs.a1, coeffs.a2) if c > 0]
    r_cap = min(1.0 / c for c in caps) if caps else math.inf
    if not math.isfinite(r_cap) or r_cap <= 0:
        if math.isinf(r_cap):
            r_cap = 1.0  # no positivity pole at all: probe a unit range
        else:
            return CertificateResult(False, None, None, [], [], None, coeffs)
    r_cap *= 1.0 - 1e-9

    grid = np.linspace(r_cap / scan_points, r_cap, scan_points)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        c1 = 1.0 - grid * coeffs.a1
        c2 = np.full_like(grid, math.inf) if coeffs.a2 == 0.0 else 1.0 - grid * coeffs.a2
        open_margin = (c1 > 0) & (c2 > 0)
        safe_c1 = np.where(open_margin, c1, 1.0)
        safe_c2 = np.where(open_margin, c2, 1.0)
        c3 = grid - (
            coeffs.A_Y / safe_c1
            + (coeffs.A_D / safe_c2 if coeffs.A_D else 0.0)
            + coeffs.B_Y
            + coeffs.B_D
        )
        c4 = (
            coeffs.C_Y / safe_c1**2
            + (2.0 * coeffs.C_D / safe_c2**2 if coeffs.C_D else 0.0)
            + 2.0 * coeffs.D_Y / safe_c1
            + (4.0 * coeffs.D_D / safe_c2 if coeffs.D_D else 0.0)
        )
        mask = open_margin & (c3 >= 0) & (c4 < 1)

    intervals: list[tuple[float, float]] = []
    pos = 0
    while pos < scan_points:
        if not mask[pos]:
            pos += 1
            continue
        start = pos
        while pos + 1 < scan_points and mask[pos + 1]:
            pos += 1
        left_lo = 0.0 if start == 0 else grid[start - 1]
        lo = _bisect_boundary(coeffs, left_lo, grid[start], feasible_side_hi=True)
        if pos == scan_points - 1:
            hi = grid[pos]
        else:
            hi = _bisect_boundary(coeffs, grid[pos], grid[pos + 1], feasible_side_hi=False)
        intervals.append((lo, hi))
        pos += 1

    if not intervals:
        return CertificateResult(False, None, None, [], [], None, coeffs)

    r_min, r_max = intervals[0]
    curve_radii = np.linspace(r_min, r_max, max(curve_samples, 2))
    alpha_curve = [
        (float(r), float(condition_values(coeffs, float(r)).c4_value))
        for r in curve_radii
    ]
    return CertificateResult(
        feasible=True,
        r_min=r_min,
        r_max=r_max,
        intervals=intervals,
        alpha_curve=alpha_curve,
        alpha_at_rmin=float(condition_values(coeffs, r_min).c4_value),
        coefficients=coeffs,
    )


def certify_system(
    system: SystemMatrices,
    loads: IndexedLoads,
    scaling: LambdaChoice = IDENTITY_SCALING,
    curve_samples: int = 200,
) -> CertificateResult:
    quantities = compute_quantities(system, loads, scaling)
    return solve_region(compute_coefficients(quantities), curve_samples=curve_samples)


def certify(
    network,
    wye: WyeZip,
    delta: DeltaZip,
    scaling: LambdaChoice = IDENTITY_SCALING,
    v_slack: np.ndarray | None = None,
    curve_samples: int = 200,
) -> CertificateResult:
    """Full pipeline: assemble the system, aggregate, and solve for radii."""
    system = assemble_system(network, wye, delta, v_slack)
    return certify_system(
        system, index_loads(network, wye, delta), scaling, curve_samples
    )
