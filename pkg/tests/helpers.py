"""Shared numeric harnesses for module and acceptance tests."""

import numpy as np

from zbuscert import index_loads, network_injection_parts


def delta_rearrangement_residuals(feeder, system, rng):
    """Residuals of the two delta rearrangement identities on one network.

    Both identities relate the impedance-weighted sum of delta injections
    over the plain linear indices to a sum over paired column differences.
    Returns (power-part residual, current-part residual) in the max norm,
    evaluated at a random voltage with safely nonzero line-to-line values.
    """
    idx = index_loads(feeder.network, feeder.wye, feeder.delta)
    imap = feeder.network.index_map
    size = system.size
    v = system.w * (
        1.0
        + 0.2 * (rng.random(size) - 0.5)
        + 0.2j * (rng.random(size) - 0.5)
    )
    i_pq, i_i, _ = network_injection_parts(feeder.network, feeder.wye, feeder.delta, v)
    delta_idx = list(imap.delta)
    lhs_pq = system.Z[:, delta_idx] @ i_pq[delta_idx]
    lhs_i = system.Z[:, delta_idx] @ i_i[delta_idx]
    rhs_pq = np.zeros(size, dtype=complex)
    rhs_i = np.zeros(size, dtype=complex)
    for k in delta_idx:
        mate = idx.partner[k]
        if mate is None:
            column = np.zeros(size, dtype=complex)
        else:
            column = system.Z[:, k] - system.Z[:, mate]
        u = idx.selectors[k] @ v[feeder.network.node_slice(imap.node_of(k))]
        rhs_pq += -column * np.conj(idx.s[k] / u)
        rhs_i += -column * idx.i[k] * (u / abs(u))
    return float(np.abs(lhs_pq - rhs_pq).max()), float(np.abs(lhs_i - rhs_i).max())


def unit_phasor_difference_bound_violations(rng, count):
    """How many random nonzero complex pairs (x, y) break
    |x/|x| - y/|y|| <= 2|x - y| / |x| (up to float rounding)."""
    x = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    y = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    keep = (np.abs(x) > 1e-12) & (np.abs(y) > 1e-12)
    x, y = x[keep], y[keep]
    lhs = np.abs(x / np.abs(x) - y / np.abs(y))
    rhs = 2.0 * np.abs(x - y) / np.abs(x)
    return int(np.count_nonzero(lhs > rhs + 1e-12)), len(x)
