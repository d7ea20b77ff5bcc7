"""Scratch probe #2: theorem-suite mechanics (not part of the deliverable)."""
import time

import numpy as np

from zbuscert import (
    assemble_system, index_loads, compute_quantities, compute_coefficients,
    solve_region, solve, SolveConfig, empirical_rate, condition_values,
    conditions_hold, membership_in_ball, random_small_network, scaled_step,
    zbus_step,
)
from zbuscert.solver import LambdaChoice, IDENTITY_SCALING

t0 = time.perf_counter()
rng = np.random.default_rng(2024)
networks = []
seed = 0
while len(networks) < 100:
    f = random_small_network(
        seed, node_count=int(rng.integers(1, 5)),
        delta_fraction=[0.0, 0.3, 0.6, 1.0][seed % 4])
    seed += 1
    sysm = assemble_system(f.network, f.wye, f.delta, f.v_slack)
    idx = index_loads(f.network, f.wye, f.delta)
    res = solve_region(compute_coefficients(compute_quantities(sysm, idx)))
    if res.feasible:
        networks.append((f, sysm, res))
print(f"collected 100 certified from {seed} seeds, {time.perf_counter()-t0:.1f}s")

worst_ball = 0.0
worst_rate = -1.0
worst_dom = -1e9
worst_pair = 0.0
endpoint_fail = 0
n_runs = 0
for f, sysm, res in networks:
    r_max = res.r_max
    alpha = condition_values(res.coefficients, r_max).c4_value
    # endpoint consistency
    ok_in = conditions_hold(res.coefficients, res.r_min + 1e-8) and conditions_hold(res.coefficients, r_max - 1e-8)
    out_lo = (res.r_min - 1e-6 <= 0) or not conditions_hold(res.coefficients, res.r_min - 1e-6)
    out_hi = not conditions_hold(res.coefficients, r_max + 1e-6)
    if not (ok_in and out_lo and out_hi):
        endpoint_fail += 1
    radius = min(0.999 * r_max, r_max - 1e-8)
    sols = []
    for i in range(20):
        rho = radius * rng.random(sysm.size)
        phase = np.exp(2j * np.pi * rng.random(sysm.size))
        v0 = sysm.w + rho * phase
        tr = solve(sysm, f.wye, f.delta, SolveConfig(init="custom", init_vector=v0))
        n_runs += 1
        assert tr.status == "converged", (tr.status, res.r_min, r_max)
        for it in tr.iterates:
            norm = np.abs(it - sysm.w).max()
            worst_ball = max(worst_ball, norm - r_max)
        if len(tr.iterates) >= 3 and tr.empirical_ratios:
            worst_rate = max(worst_rate, empirical_rate(tr) - alpha)
        vfin = tr.solution
        B = np.abs(tr.iterates[0] - vfin).max()
        for t, it in enumerate(tr.iterates):
            lhs = np.abs(it - vfin).max()
            worst_dom = max(worst_dom, lhs - B * alpha**t)
        sols.append(vfin)
        assert tr.residual <= 1e-6
    for i in range(len(sols)):
        for j in range(i + 1, len(sols)):
            worst_pair = max(worst_pair, np.abs(sols[i] - sols[j]).max())

print(f"runs={n_runs} worst ball overshoot={worst_ball:.3e} worst rate excess={worst_rate:.3e}")
print(f"worst domination excess={worst_dom:.3e} worst pairwise={worst_pair:.3e} endpoint_fail={endpoint_fail}")
print(f"total {time.perf_counter()-t0:.1f}s")

# scaling equivalence
f = random_small_network(11, node_count=3, delta_fraction=0.5)
sysm = assemble_system(f.network, f.wye, f.delta, f.v_slack)
lam = (0.5 + rng.random(sysm.size)) * np.exp(1j * rng.random(sysm.size))
v = sysm.w.copy()
u = v / lam
worst = 0.0
for _ in range(8):
    v = zbus_step(sysm, f.wye, f.delta, v)
    u = scaled_step(sysm, f.wye, f.delta, lam, u)
    worst = max(worst, np.abs(v - lam * u).max())
print("scaling equivalence worst:", worst)

# unloaded certificate
from zbuscert import WyeZip, DeltaZip
f = random_small_network(3, node_count=2)
sysm = assemble_system(f.network, WyeZip(), DeltaZip())
res = solve_region(compute_coefficients(compute_quantities(sysm, index_loads(f.network, WyeZip(), DeltaZip()))))
print(f"unloaded: feasible={res.feasible} r_min={res.r_min:.2e} r_max={res.r_max:.6f} alpha={res.alpha_at_rmin}")
print(f"  cap=1/a1={1/res.coefficients.a1:.6f}")
