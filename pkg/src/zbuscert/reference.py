"""Built-in benchmark networks and a seeded random network generator.

The two-node network is balanced and phase-decoupled, so its load flow
reduces to a scalar quadratic with a closed-form root pair; it is the
standard demonstration that a solution can exist while the fixed-point
iteration oscillates.  The three-node network is unbalanced with phase
couplings and a single scale knob on its power loads; it probes the
feasibility threshold of the convergence certificate.  The random
generator produces small radial feeders with diagonally dominant branch
blocks and light loads, biased so certificates are usually feasible.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .assembly import DEFAULT_SLACK_VOLTAGE
from .feeder import Feeder
from .loads import DeltaZip, WyeZip, ZipEntry
from .network import PHASES, BranchSpec, NetworkModel, NodeSpec


@dataclass(frozen=True)
class TwoNodeParams:
    """Balanced two-node setup: equal real ZIP entries on all three phases.

    The defaults make the closed-form voltage collapse to sqrt(-s_l).
    """

    s_l: float
    y_t: float = 0.5
    y_l: float = 0.5
    i_l: float = 0.5


@dataclass(frozen=True)
class ThreeNodeParams:
    """Load scale for the unbalanced three-node benchmark, in (0, 1]."""

    theta: float


def two_node(params: TwoNodeParams) -> Feeder:
    """Slack bus feeding one three-phase wye bus through a decoupled line."""
    nodes = [NodeSpec("S", "slack", "abc"), NodeSpec("1", "wye", "abc")]
    branches = [
        BranchSpec("S", "1", ("a", "b", "c"), params.y_t * np.eye(3, dtype=complex))
    ]
    entry = ZipEntry(s=params.s_l, i=params.i_l, y=params.y_l)
    wye = WyeZip.from_items([("1", phase, entry) for phase in PHASES])
    return Feeder(
        network=NetworkModel(nodes, branches),
        wye=wye,
        delta=DeltaZip(),
        v_slack=DEFAULT_SLACK_VOLTAGE.copy(),
    )


def two_node_analytic_roots(params: TwoNodeParams) -> tuple[complex, complex]:
    """Roots of the real-voltage balance quadratic of the two-node network.

    Solves (y_t + y_l) v^2 + (i_l - y_t) v + s_l = 0; the returned pair is
    (plus root, minus root).  Only nonnegative real roots correspond to the
    balanced positive-sequence solution ansatz.
    """
    denom = 2.0 * (params.y_t + params.y_l)
    disc = (params.y_t - params.i_l) ** 2 - 4.0 * (params.y_t + params.y_l) * params.s_l
    head = (params.y_t - params.i_l) / denom
    tail = cmath.sqrt(disc) / denom
    return head + tail, head - tail


def _three_node_data() -> dict:
    text = resources.files("zbuscert.data").joinpath("three_node.json").read_text()
    return json.loads(text)


def _pairs_to_matrix(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def three_node(params: ThreeNodeParams) -> Feeder:
    """Two coupled three-phase wye buses behind the slack, power loads only."""
    if not 0.0 < params.theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {params.theta}")
    data = _three_node_data()
    series_s1 = _pairs_to_matrix(data["series_slack_1"])
    series_12 = _pairs_to_matrix(data["series_1_2"])
    power = {
        "1": [complex(re, im) for re, im in data["power_node_1"]],
        "2": [complex(re, im) for re, im in data["power_node_2"]],
    }
    nodes = [
        NodeSpec("S", "slack", "abc"),
        NodeSpec("1", "wye", "abc"),
        NodeSpec("2", "wye", "abc"),
    ]
    branches = [
        BranchSpec("1", "S", ("a", "b", "c"), series_s1),
        BranchSpec("1", "2", ("a", "b", "c"), series_12),
    ]
    wye = WyeZip.from_items(
        [
            (node_id, phase, ZipEntry(s=params.theta * power[node_id][pos]))
            for node_id in ("1", "2")
            for pos, phase in enumerate(PHASES)
        ]
    )
    return Feeder(
        network=NetworkModel(nodes, branches),
        wye=wye,
        delta=DeltaZip(),
        v_slack=DEFAULT_SLACK_VOLTAGE.copy(),
    )


def random_small_network(
    seed: int, node_count: int = 3, delta_fraction: float = 0.0
) -> Feeder:
    """Deterministic small radial feeder for property tests.

    Nodes attach to a random earlier node with their phases drawn from the
    parent's, so every phase has a path to the slack.  Branch blocks are
    diagonally dominant and loads are small, which keeps the system well
    conditioned and the certificate usually feasible.
    """
    if not 1 <= node_count <= 5:
        raise ValueError("node_count must be between 1 and 5")
    rng = np.random.default_rng(seed)
    nodes = [NodeSpec("S", "slack", "abc")]
    branches = []
    for pos in range(node_count):
        parent = nodes[int(rng.integers(0, len(nodes)))]
        wants_delta = bool(rng.random() < delta_fraction)
        make_delta = wants_delta and len(parent.phases) >= 2
        if make_delta:
            size = int(rng.integers(2, len(parent.phases) + 1))
        else:
            size = int(rng.integers(1, len(parent.phases) + 1))
        picked = rng.choice(len(parent.phases), size=size, replace=False)
        phases = tuple(sorted((parent.phases[i] for i in picked), key=PHASES.index))
        node = NodeSpec(str(pos + 1), "delta" if make_delta else "wye", phases)

        p = len(phases)
        coupling = 0.04 * (rng.random((p, p)) - 0.5) - 0.06j * rng.random((p, p))
        coupling = 0.5 * (coupling + coupling.T)
        block = coupling.astype(complex)
        np.fill_diagonal(
            block, (0.5 + rng.random(p)) - 1j * (3.0 + 3.0 * rng.random(p))
        )
        branches.append(BranchSpec(parent.id, node.id, phases, block))
        nodes.append(node)

    def small_complex(magnitude: float) -> complex:
        return magnitude * rng.random() * cmath.exp(1j * rng.uniform(0.0, 1.2))

    wye_items = []
    delta_items = []
    for node in nodes[1:]:
        if node.kind == "wye":
            for phase in node.phases:
                if rng.random() < 0.75:
                    wye_items.append(
                        (
                            node.id,
                            phase,
                            ZipEntry(
                                s=small_complex(0.02),
                                i=small_complex(0.008),
                                y=small_complex(0.03).conjugate(),
                            ),
                        )
                    )
        else:
            pairs = [
                (node.phases[i], node.phases[j])
                for i in range(len(node.phases))
                for j in range(i + 1, len(node.phases))
            ]
            for pair in pairs:
                if rng.random() < 0.75:
                    delta_items.append(
                        (
                            node.id,
                            pair,
                            ZipEntry(
                                s=small_complex(0.02),
                                i=small_complex(0.008),
                                y=small_complex(0.03).conjugate(),
                            ),
                        )
                    )
    return Feeder(
        network=NetworkModel(nodes, branches),
        wye=WyeZip.from_items(wye_items),
        delta=DeltaZip.from_items(delta_items),
        v_slack=DEFAULT_SLACK_VOLTAGE.copy(),
    )
