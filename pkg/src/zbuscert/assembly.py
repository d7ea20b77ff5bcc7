"""Partitioned bus-admittance assembly and the fixed-point system data.

The full nodal admittance matrix is split into four blocks: the non-slack
square block, the two couplings with the slack bus, and the slack square
block.  From these and the load admittance the effective impedance
``Z = inverse(Y + Y_L)`` and the no-load voltage ``w = -Z @ Y_NS @ v_S``
are formed once and shared by the solver and the certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IllPosedNetworkError, SingularMatrixError
from .linalg import invert
from .loads import DeltaZip, WyeZip, check_loads, load_admittance_matrix
from .network import PHASES, NetworkModel

DEFAULT_SLACK_VOLTAGE = np.array(
    [1.0, np.exp(-2j * np.pi / 3), np.exp(2j * np.pi / 3)], dtype=complex
)


@dataclass(eq=False)
class YBlocks:
    """Bus admittance split around the slack bus."""

    Y: np.ndarray      # non-slack x non-slack
    Y_NS: np.ndarray   # non-slack x slack (J x 3)
    Y_SN: np.ndarray   # slack x non-slack (3 x J)
    Y_SS: np.ndarray   # slack x slack (3 x 3)


def assemble_bus_admittance(network: NetworkModel) -> YBlocks:
    """Standard nodal assembly over all branches.

    Each branch adds its series block to both endpoint diagonals and its
    negation to the two couplings; endpoint shunt blocks add to diagonals.
    Phases absent from a branch simply contribute nothing to the affected
    rows and columns.
    """
    imap = network.index_map
    J = imap.size
    total = J + 3
    full = np.zeros((total, total), dtype=complex)

    def global_indices(node_id: str, phases: tuple[str, ...]) -> list[int]:
        if node_id == network.slack.id:
            return [J + PHASES.index(p) for p in phases]
        return [imap.lin(node_id, p) for p in phases]

    for branch in network.branches:
        fi = global_indices(branch.from_node, branch.phases)
        ti = global_indices(branch.to_node, branch.phases)
        block = branch.series
        full[np.ix_(fi, fi)] += block
        full[np.ix_(ti, ti)] += block
        full[np.ix_(fi, ti)] -= block
        full[np.ix_(ti, fi)] -= block
        if branch.shunt_from is not None:
            full[np.ix_(fi, fi)] += branch.shunt_from
        if branch.shunt_to is not None:
            full[np.ix_(ti, ti)] += branch.shunt_to

    return YBlocks(
        Y=full[:J, :J],
        Y_NS=full[:J, J:],
        Y_SN=full[J:, :J],
        Y_SS=full[J:, J:],
    )


@dataclass(eq=False)
class SystemMatrices:
    """Everything the fixed-point iteration and the certificate share.

    Immutable by convention after construction; ``Z @ (Y + Y_L)`` is the
    identity to solver precision and ``w`` is the voltage profile with all
    power and current loads switched off.
    """

    network: NetworkModel
    Y: np.ndarray
    Y_NS: np.ndarray
    Y_SN: np.ndarray
    Y_SS: np.ndarray
    Y_L: np.ndarray
    Z: np.ndarray
    w: np.ndarray
    v_S: np.ndarray

    @property
    def size(self) -> int:
        return self.w.shape[0]


def compute_fixed_point_data(
    network: NetworkModel,
    blocks: YBlocks,
    y_load: np.ndarray,
    v_slack: np.ndarray,
) -> SystemMatrices:
    """Invert the load-augmented admittance and form the no-load voltage."""
    v_slack = np.asarray(v_slack, dtype=complex)
    if v_slack.shape != (3,):
        raise ValueError(f"slack voltage must have 3 entries, got shape {v_slack.shape}")
    try:
        z = invert(blocks.Y + y_load)
    except SingularMatrixError as exc:
        raise IllPosedNetworkError(
            "the load-augmented bus admittance matrix is singular; check for "
            "subnetworks with no connection to ground or to the slack bus "
            "(a small grounding shunt on one of their nodes restores "
            "invertibility)"
        ) from exc
    w = -z @ blocks.Y_NS @ v_slack
    return SystemMatrices(
        network=network,
        Y=blocks.Y,
        Y_NS=blocks.Y_NS,
        Y_SN=blocks.Y_SN,
        Y_SS=blocks.Y_SS,
        Y_L=y_load,
        Z=z,
        w=w,
        v_S=v_slack,
    )


def assemble_system(
    network: NetworkModel,
    wye: WyeZip,
    delta: DeltaZip,
    v_slack: np.ndarray | None = None,
) -> SystemMatrices:
    """Convenience pipeline: validate loads, assemble blocks, invert, cache."""
    check_loads(network, wye, delta)
    blocks = assemble_bus_admittance(network)
    y_load = load_admittance_matrix(network, wye, delta)
    if v_slack is None:
        v_slack = DEFAULT_SLACK_VOLTAGE
    return compute_fixed_point_data(network, blocks, y_load, v_slack)
