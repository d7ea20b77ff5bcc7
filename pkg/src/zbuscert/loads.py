"""ZIP load models: injection currents, load admittance, indexed aliases.

A ZIP entry combines a constant-power part (nominal power ``s``), a
constant-current part (nominal current ``i``), and a constant-impedance
part (nominal admittance ``y``).  Wye entries attach to a (node, phase);
delta entries attach to an unordered phase pair of one node and respond to
the line-to-line voltage of that pair.

Sign convention: positive ``s``/``i``/``y`` describe consumption, so every
injection current returned here carries a leading minus.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import SchemaError, SingularLoadVoltageError
from .network import PHASES, NetworkModel, NodeSpec, delta_pairing

# Below this magnitude a driving voltage is treated as zero for s/i loads.
VOLTAGE_GUARD = 1e-12


@dataclass(frozen=True)
class ZipEntry:
    """Nominal power / current / admittance of one ZIP load (per-unit)."""

    s: complex = 0j
    i: complex = 0j
    y: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))
        object.__setattr__(self, "i", complex(self.i))
        object.__setattr__(self, "y", complex(self.y))

    def scaled(self, factor: float) -> "ZipEntry":
        """Scale the power and current parts; the admittance part is fixed."""
        return ZipEntry(self.s * factor, self.i * factor, self.y)


def _normalize_pair(node: str, pair: Iterable[str]) -> tuple[str, tuple[str, str]]:
    pair = tuple(pair)
    if len(pair) != 2 or pair[0] == pair[1]:
        raise SchemaError(f"delta load at node {node!r}: needs two distinct phases, got {pair!r}")
    for p in pair:
        if p not in PHASES:
            raise SchemaError(f"delta load at node {node!r}: unknown phase label {p!r}")
    a, b = sorted(pair, key=PHASES.index)
    return node, (a, b)


class WyeZip:
    """ZIP entries keyed by (node id, phase)."""

    def __init__(self, entries: Mapping[tuple[str, str], ZipEntry] | None = None):
        self._entries: dict[tuple[str, str], ZipEntry] = dict(entries or {})

    @classmethod
    def from_items(cls, items: Iterable[tuple[str, str, ZipEntry]]) -> "WyeZip":
        out: dict[tuple[str, str], ZipEntry] = {}
        for node, phase, entry in items:
            key = (node, phase)
            if key in out and out[key] != entry:
                raise SchemaError(
                    f"contradictory duplicate wye load for node {node!r} phase {phase!r}"
                )
            out[key] = entry
        return cls(out)

    def get(self, node: str, phase: str) -> ZipEntry:
        return self._entries.get((node, phase), ZipEntry())

    def for_node(self, node: str) -> dict[str, ZipEntry]:
        return {phase: e for (n, phase), e in self._entries.items() if n == node}

    def items(self) -> Iterator[tuple[tuple[str, str], ZipEntry]]:
        return iter(self._entries.items())

    def scaled(self, factor: float) -> "WyeZip":
        return WyeZip({k: e.scaled(factor) for k, e in self._entries.items()})

    def __len__(self) -> int:
        return len(self._entries)


class DeltaZip:
    """ZIP entries keyed by (node id, unordered phase pair).

    The pair key is stored in canonical order, so the value for {a, b}
    and {b, a} is the same entry by construction.
    """

    def __init__(self, entries: Mapping[tuple[str, tuple[str, str]], ZipEntry] | None = None):
        normalized: dict[tuple[str, tuple[str, str]], ZipEntry] = {}
        for (node, pair), entry in (entries or {}).items():
            normalized[_normalize_pair(node, pair)] = entry
        self._entries = normalized

    @classmethod
    def from_items(cls, items: Iterable[tuple[str, tuple[str, str], ZipEntry]]) -> "DeltaZip":
        out: dict[tuple[str, tuple[str, str]], ZipEntry] = {}
        for node, pair, entry in items:
            key = _normalize_pair(node, pair)
            if key in out and out[key] != entry:
                raise SchemaError(
                    f"contradictory duplicate delta load for node {node!r} pair {key[1]!r}"
                )
            out[key] = entry
        return cls(out)

    def get(self, node: str, phase: str, other: str) -> ZipEntry:
        return self._entries.get(_normalize_pair(node, (phase, other)), ZipEntry())

    def for_node(self, node: str) -> dict[tuple[str, str], ZipEntry]:
        return {pair: e for (n, pair), e in self._entries.items() if n == node}

    def items(self) -> Iterator[tuple[tuple[str, tuple[str, str]], ZipEntry]]:
        return iter(self._entries.items())

    def scaled(self, factor: float) -> "DeltaZip":
        return DeltaZip({k: e.scaled(factor) for k, e in self._entries.items()})

    def __len__(self) -> int:
        return len(self._entries)


def check_loads(network: NetworkModel, wye: WyeZip, delta: DeltaZip) -> None:
    """Validate that every load entry refers to a legal node/phase target."""
    for (node_id, phase), _ in wye.items():
        node = network.node(node_id)
        if node.kind == "slack":
            raise SchemaError(f"node {node_id!r}: loads on the slack bus are not allowed")
        if node.kind != "wye":
            raise SchemaError(
                f"node {node_id!r}: wye load attached to a {node.kind}-connected node"
            )
        if phase not in node.phases:
            raise SchemaError(f"node {node_id!r}: phase {phase!r} is not available")
    for (node_id, pair), _ in delta.items():
        node = network.node(node_id)
        if node.kind == "slack":
            raise SchemaError(f"node {node_id!r}: loads on the slack bus are not allowed")
        if node.kind != "delta":
            raise SchemaError(
                f"node {node_id!r}: delta load attached to a {node.kind}-connected node"
            )
        for p in pair:
            if p not in node.phases:
                raise SchemaError(f"node {node_id!r}: phase {p!r} is not available")


def wye_injection_parts(
    node: NodeSpec, v_n: np.ndarray, wye: WyeZip
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Constant-power, constant-current, and constant-impedance injection
    currents of a wye node at the line-to-neutral voltages ``v_n``."""
    p = len(node.phases)
    i_pq = np.zeros(p, dtype=complex)
    i_i = np.zeros(p, dtype=complex)
    i_z = np.zeros(p, dtype=complex)
    entries = wye.for_node(node.id)
    for pos, phase in enumerate(node.phases):
        entry = entries.get(phase)
        if entry is None:
            continue
        v = v_n[pos]
        if (entry.s != 0 or entry.i != 0) and abs(v) < VOLTAGE_GUARD:
            raise SingularLoadVoltageError(node.id, f"phase {phase}")
        if entry.s != 0:
            i_pq[pos] = -np.conj(entry.s / v)
        if entry.i != 0:
            i_i[pos] = -(v / abs(v)) * entry.i
        if entry.y != 0:
            i_z[pos] = -entry.y * v
    return i_pq, i_i, i_z


def wye_injection(node: NodeSpec, v_n: np.ndarray, wye: WyeZip) -> np.ndarray:
    i_pq, i_i, i_z = wye_injection_parts(node, v_n, wye)
    return i_pq + i_i + i_z


def delta_injection_parts(
    node: NodeSpec, v_n: np.ndarray, delta: DeltaZip
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-phase injection currents of a delta node.

    Each phase sums the contributions of every incident phase pair; the
    driving quantity of a pair is its line-to-line voltage.
    """
    p = len(node.phases)
    i_pq = np.zeros(p, dtype=complex)
    i_i = np.zeros(p, dtype=complex)
    i_z = np.zeros(p, dtype=complex)
    entries = delta.for_node(node.id)
    for pos, phase in enumerate(node.phases):
        for other_pos, other in enumerate(node.phases):
            if other == phase:
                continue
            entry = entries.get(tuple(sorted((phase, other), key=PHASES.index)))
            if entry is None:
                continue
            u = v_n[pos] - v_n[other_pos]
            if (entry.s != 0 or entry.i != 0) and abs(u) < VOLTAGE_GUARD:
                raise SingularLoadVoltageError(node.id, f"pair {phase}{other}")
            if entry.s != 0:
                i_pq[pos] += -np.conj(entry.s / u)
            if entry.i != 0:
                i_i[pos] += -entry.i * (u / abs(u))
            if entry.y != 0:
                i_z[pos] += -entry.y * u
    return i_pq, i_i, i_z


def delta_injection(node: NodeSpec, v_n: np.ndarray, delta: DeltaZip) -> np.ndarray:
    i_pq, i_i, i_z = delta_injection_parts(node, v_n, delta)
    return i_pq + i_i + i_z


def network_injection_parts(
    network: NetworkModel, wye: WyeZip, delta: DeltaZip, v: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stacked injection parts over all non-slack (node, phase) indices."""
    J = network.index_map.size
    i_pq = np.zeros(J, dtype=complex)
    i_i = np.zeros(J, dtype=complex)
    i_z = np.zeros(J, dtype=complex)
    for node in network.non_slack:
        sl = network.node_slice(node.id)
        if node.kind == "wye":
            parts = wye_injection_parts(node, v[sl], wye)
        else:
            parts = delta_injection_parts(node, v[sl], delta)
        i_pq[sl], i_i[sl], i_z[sl] = parts
    return i_pq, i_i, i_z


def network_injection(
    network: NetworkModel, wye: WyeZip, delta: DeltaZip, v: np.ndarray
) -> np.ndarray:
    i_pq, i_i, i_z = network_injection_parts(network, wye, delta, v)
    return i_pq + i_i + i_z


def load_admittance_matrix(network: NetworkModel, wye: WyeZip, delta: DeltaZip) -> np.ndarray:
    """J x J admittance matrix of the constant-impedance load parts.

    Wye parts sit on the diagonal.  A delta pair admittance adds to both
    endpoint diagonals and subtracts from the two coupling entries, so the
    matrix reproduces the constant-impedance injection as a linear map:
    i_z(v) = -(this matrix) @ v.
    """
    check_loads(network, wye, delta)
    imap = network.index_map
    y_load = np.zeros((imap.size, imap.size), dtype=complex)
    for (node_id, phase), entry in wye.items():
        if entry.y == 0:
            continue
        j = imap.lin(node_id, phase)
        y_load[j, j] += entry.y
    for (node_id, (pa, pb)), entry in delta.items():
        if entry.y == 0:
            continue
        j = imap.lin(node_id, pa)
        k = imap.lin(node_id, pb)
        y_load[j, j] += entry.y
        y_load[k, k] += entry.y
        y_load[j, k] -= entry.y
        y_load[k, j] -= entry.y
    return y_load


@dataclass(eq=False)
class IndexedLoads:
    """Per-linear-index load aliases used by the certificate.

    Wye indices carry their own (s, i).  A paired delta index carries the
    load of the pair (phase, right_shift(phase)) together with that pair's
    line-to-line selector and the partner's linear index; an unpaired delta
    index carries zero load and the selector of the node's only pair.
    """

    s: np.ndarray
    i: np.ndarray
    selectors: dict[int, np.ndarray]
    partner: dict[int, int | None]
    pair_label: dict[int, str]


def index_loads(network: NetworkModel, wye: WyeZip, delta: DeltaZip) -> IndexedLoads:
    check_loads(network, wye, delta)
    imap = network.index_map
    s = np.zeros(imap.size, dtype=complex)
    i = np.zeros(imap.size, dtype=complex)
    selectors: dict[int, np.ndarray] = {}
    partner: dict[int, int | None] = {}
    pair_label: dict[int, str] = {}
    for node in network.non_slack:
        for phase in node.phases:
            j = imap.lin(node.id, phase)
            if node.kind == "wye":
                entry = wye.get(node.id, phase)
                s[j] = entry.s
                i[j] = entry.i
                continue
            pairing = delta_pairing(node, phase)
            selectors[j] = pairing.selector
            pair_label[j] = f"{pairing.phase}{pairing.partner}"
            if pairing.paired:
                entry = delta.get(node.id, pairing.phase, pairing.partner)
                s[j] = entry.s
                i[j] = entry.i
                partner[j] = imap.lin(node.id, pairing.partner)
            else:
                partner[j] = None
    return IndexedLoads(s=s, i=i, selectors=selectors, partner=partner, pair_label=pair_label)
