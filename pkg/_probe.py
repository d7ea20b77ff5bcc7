"""Scratch numeric probe (not part of the deliverable)."""
import numpy as np

from zbuscert import (
    ThreeNodeParams, TwoNodeParams, three_node, two_node,
    assemble_system, index_loads, compute_quantities, compute_coefficients,
    solve_region, solve, SolveConfig, empirical_rate, condition_values,
)
from zbuscert.solver import LambdaChoice

# --- three-node checks ---
for theta in (0.05, 0.10):
    f = three_node(ThreeNodeParams(theta=theta))
    sysm = assemble_system(f.network, f.wye, f.delta, f.v_slack)
    q = compute_quantities(sysm, index_loads(f.network, f.wye, f.delta))
    co = compute_coefficients(q)
    print(f"theta={theta}: w_min={q.w_min:.12f} lambda_max={q.lambda_max} "
          f"A_Y={co.A_Y:.6f} A_Y/theta={co.A_Y/theta:.6f} C_Y/theta={co.C_Y/theta:.6f} "
          f"B_Y={co.B_Y} D_Y={co.D_Y}")

# w exactness
f = three_node(ThreeNodeParams(theta=0.08))
sysm = assemble_system(f.network, f.wye, f.delta, f.v_slack)
vs = sysm.v_S
w_expect = np.concatenate([vs, vs])
print("three-node |w - [vS;vS]|_inf =", np.abs(sysm.w - w_expect).max())

q = compute_quantities(sysm, index_loads(f.network, f.wye, f.delta))
co = compute_coefficients(q)
res = solve_region(co)
c = co.A_Y / 0.08
print(f"coef c = {c:.6f}")
rm_cf = (1 - np.sqrt(1 - 4*co.A_Y)) / 2
rp_cf = (1 + np.sqrt(1 - 4*co.A_Y)) / 2
r4 = 1 - np.sqrt(co.C_Y)
print(f"theta=0.08: feasible={res.feasible} r_min={res.r_min:.8f} r_max={res.r_max:.8f}")
print(f"  closed-form c3 interval: [{rm_cf:.8f}, {rp_cf:.8f}], c4 bound: {r4:.8f}")
print(f"  spec closed form (9.4360): [{(1-np.sqrt(1-9.4360*0.08))/2:.8f}, {(1+np.sqrt(1-9.4360*0.08))/2:.8f}]")
print(f"  alpha_at_rmin={res.alpha_at_rmin:.8f}")

# theta threshold bisection
def feasible_at(theta):
    f = three_node(ThreeNodeParams(theta=theta))
    sysm = assemble_system(f.network, f.wye, f.delta, f.v_slack)
    q = compute_quantities(sysm, index_loads(f.network, f.wye, f.delta))
    return solve_region(compute_coefficients(q), curve_samples=2).feasible

lo, hi = 0.09, 0.12
assert feasible_at(lo) and not feasible_at(hi)
while hi - lo > 1e-6:
    mid = 0.5 * (lo + hi)
    if feasible_at(mid):
        lo = mid
    else:
        hi = mid
print(f"theta* = {(0.5*(lo+hi)):.7f}")

# solver statuses across theta with defaults (v0 = w)
for theta in (0.06, 0.10, 0.12, 0.30, 0.60, 1.00):
    f = three_node(ThreeNodeParams(theta=theta))
    sysm = assemble_system(f.network, f.wye, f.delta, f.v_slack)
    tr = solve(sysm, f.wye, f.delta)
    rate = ""
    if len(tr.iterates) >= 3 and tr.empirical_ratios:
        rate = f" rate={empirical_rate(tr):.4f}"
    print(f"theta={theta}: status={tr.status} iters={tr.iterations} "
          f"tail={tr.non_contracting_tail} residual={tr.residual}{rate}")

# theta=0.10 rate vs alpha at r_min
f = three_node(ThreeNodeParams(theta=0.10))
sysm = assemble_system(f.network, f.wye, f.delta, f.v_slack)
q = compute_quantities(sysm, index_loads(f.network, f.wye, f.delta))
res = solve_region(compute_coefficients(q))
tr = solve(sysm, f.wye, f.delta)
print(f"theta=0.10: alpha(r_min)={res.alpha_at_rmin:.6f} empirical={empirical_rate(tr):.6f} "
      f"r_min={res.r_min:.6f} r_max={res.r_max:.6f}")

# --- two-node checks ---
for s_l in (-0.01, -0.1, -0.5):
    f = two_node(TwoNodeParams(s_l=s_l))
    sysm = assemble_system(f.network, f.wye, f.delta, f.v_slack)
    print(f"two-node s_l={s_l}: Z==I err={np.abs(sysm.Z - np.eye(3)).max():.2e} "
          f"w==vS/2 err={np.abs(sysm.w - 0.5*sysm.v_S).max():.2e}")
    q = compute_quantities(sysm, index_loads(f.network, f.wye, f.delta))
    co = compute_coefficients(q)
    res = solve_region(co)
    print(f"  a1={co.a1} A_Y={co.A_Y} B_Y={co.B_Y} C_Y={co.C_Y} D_Y={co.D_Y} feasible={res.feasible}")

f = two_node(TwoNodeParams(s_l=-0.5))
sysm = assemble_system(f.network, f.wye, f.delta, f.v_slack)
tr = solve(sysm, f.wye, f.delta)
print(f"two-node s_l=-0.5 from w: status={tr.status} tail={tr.non_contracting_tail} "
      f"last diffs={[round(d,4) for d in tr.diffs[-4:]]}")

f = two_node(TwoNodeParams(s_l=-0.25))
sysm = assemble_system(f.network, f.wye, f.delta, f.v_slack)
tr = solve(sysm, f.wye, f.delta, SolveConfig(init="custom", init_vector=0.5*sysm.v_S))
sol_mag = abs(tr.solution[0]) if tr.solution is not None else None
print(f"two-node s_l=-0.25 from 0.5vS: status={tr.status} |v_a|={sol_mag}")

# --- random generator feasibility and lemma residuals ---
from zbuscert import random_small_network
feas = 0
tried = 0
for seed in range(60):
    f = random_small_network(seed, node_count=3, delta_fraction=[0.0, 0.3, 0.6, 1.0][seed % 4])
    try:
        sysm = assemble_system(f.network, f.wye, f.delta, f.v_slack)
    except Exception as e:
        print("assembly failed", seed, e)
        continue
    tried += 1
    q = compute_quantities(sysm, index_loads(f.network, f.wye, f.delta))
    res = solve_region(compute_coefficients(q), curve_samples=2)
    feas += res.feasible
print(f"random: {feas}/{tried} feasible")

# lemma residual check on one delta network
from zbuscert.loads import network_injection_parts
f = random_small_network(7, node_count=3, delta_fraction=1.0)
sysm = assemble_system(f.network, f.wye, f.delta, f.v_slack)
idx = index_loads(f.network, f.wye, f.delta)
imap = f.network.index_map
rng = np.random.default_rng(0)
v = sysm.w * (1 + 0.2 * (rng.random(sysm.size) - 0.5) + 0.2j * (rng.random(sysm.size) - 0.5))
ipq, ii, _ = network_injection_parts(f.network, f.wye, f.delta, v)
dl = list(imap.delta)
lhs_pq = sysm.Z[:, dl] @ ipq[dl]
lhs_i = sysm.Z[:, dl] @ ii[dl]
rhs_pq = np.zeros(sysm.size, dtype=complex)
rhs_i = np.zeros(sysm.size, dtype=complex)
for pos, k in enumerate(dl):
    mate = idx.partner[k]
    col = (sysm.Z[:, k] - sysm.Z[:, mate]) if mate is not None else np.zeros(sysm.size, dtype=complex)
    sl = f.network.node_slice(imap.node_of(k))
    u = idx.selectors[k] @ v[sl]
    rhs_pq += -col * np.conj(idx.s[k] / u)
    rhs_i += -col * idx.i[k] * (u / abs(u))
print("lemma1 residual:", np.abs(lhs_pq - rhs_pq).max())
print("lemma2 (sign-corrected) residual:", np.abs(lhs_i - rhs_i).max())
