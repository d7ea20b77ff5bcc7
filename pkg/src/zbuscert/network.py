"""Graph, phase bookkeeping, and linear indexing for three-phase feeders.

All electric quantities are per-unit complex numbers.  Every non-slack
(node, phase) pair is assigned a linear index; matrices and vectors
downstream follow that layout.  The ordering is part of the public
contract: nodes in declaration order, phases in a < b < c order within
each node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import SchemaError

PHASES = ("a", "b", "c")

NODE_KINDS = ("wye", "delta", "slack")

_RIGHT_SHIFT = {"a": "b", "b": "c", "c": "a"}


def right_shift(phase: str) -> str:
    """Cyclic successor of a phase label: a -> b -> c -> a."""
    try:
        return _RIGHT_SHIFT[phase]
    except KeyError:
        raise SchemaError(f"unknown phase label {phase!r}") from None


def _ordered_phases(phases: Iterable[str]) -> tuple[str, ...]:
    phases = tuple(phases)
    for p in phases:
        if p not in PHASES:
            raise SchemaError(f"unknown phase label {p!r}")
    if len(set(phases)) != len(phases):
        raise SchemaError(f"duplicate phase in {''.join(phases)!r}")
    return tuple(sorted(phases, key=PHASES.index))


def line_to_line_selector(phases: tuple[str, ...], plus: str, minus: str) -> np.ndarray:
    """Signed selector e with e @ v = v[plus] - v[minus] over the given phase layout."""
    if plus == minus:
        raise SchemaError(f"selector needs two distinct phases, got {plus!r} twice")
    for p in (plus, minus):
        if p not in phases:
            raise SchemaError(f"phase {p!r} not available in {''.join(phases)!r}")
    e = np.zeros(len(phases))
    e[phases.index(plus)] = 1.0
    e[phases.index(minus)] = -1.0
    return e


@dataclass(frozen=True)
class NodeSpec:
    """A bus: identifier, connection kind, and available phases.

    ``phases`` accepts any iterable of labels (including a plain string such
    as ``"abc"``) and is normalized to canonical a < b < c order.
    """

    id: str
    kind: str
    phases: tuple[str, ...]

    def __post_init__(self):
        if self.kind not in NODE_KINDS:
            raise SchemaError(
                f"node {self.id!r}: kind must be one of {NODE_KINDS}, got {self.kind!r}"
            )
        ordered = _ordered_phases(self.phases)
        object.__setattr__(self, "phases", ordered)
        if self.kind == "wye" and len(ordered) < 1:
            raise SchemaError(f"node {self.id!r}: a wye node needs at least one phase")
        if self.kind == "delta" and len(ordered) < 2:
            raise SchemaError(f"node {self.id!r}: a delta node needs at least two phases")
        if self.kind == "slack" and len(ordered) != 3:
            raise SchemaError(f"node {self.id!r}: the slack bus must carry all three phases")


@dataclass(frozen=True, eq=False)
class BranchSpec:
    """Series admittance block between two nodes over their shared phases.

    ``series`` is a square complex block laid out over ``phases``; optional
    ``shunt_from`` / ``shunt_to`` blocks of the same shape are added to the
    respective endpoint diagonals on assembly.
    """

    from_node: str
    to_node: str
    phases: tuple[str, ...]
    series: np.ndarray
    shunt_from: np.ndarray | None = None
    shunt_to: np.ndarray | None = None

    def __post_init__(self):
        if self.from_node == self.to_node:
            raise SchemaError(f"branch {self.from_node!r}-{self.to_node!r}: self-loops are not allowed")
        ordered = _ordered_phases(self.phases)
        if not ordered:
            raise SchemaError(
                f"branch {self.from_node!r}-{self.to_node!r}: needs at least one phase"
            )
        object.__setattr__(self, "phases", ordered)
        p = len(ordered)
        for name in ("series", "shunt_from", "shunt_to"):
            block = getattr(self, name)
            if block is None:
                continue
            block = np.asarray(block, dtype=complex)
            if block.shape != (p, p):
                raise SchemaError(
                    f"branch {self.from_node!r}-{self.to_node!r}: {name} block must be "
                    f"{p}x{p} for phases {''.join(ordered)!r}, got shape {block.shape}"
                )
            object.__setattr__(self, name, block)


@dataclass(frozen=True, eq=False)
class IndexMap:
    """Bijection between (node, phase) pairs and linear indices 0..J-1."""

    pairs: tuple[tuple[str, str], ...]
    position: Mapping[tuple[str, str], int]
    node_indices: Mapping[str, tuple[int, ...]]
    wye: tuple[int, ...]
    delta: tuple[int, ...]
    delta_order: Mapping[int, int]

    @property
    def size(self) -> int:
        return len(self.pairs)

    def lin(self, node_id: str, phase: str) -> int:
        try:
            return self.position[(node_id, phase)]
        except KeyError:
            raise SchemaError(f"no linear index for node {node_id!r} phase {phase!r}") from None

    def node_of(self, j: int) -> str:
        return self.pairs[j][0]

    def phase_of(self, j: int) -> str:
        return self.pairs[j][1]


def build_index_map(nodes: Iterable[NodeSpec]) -> IndexMap:
    """Assign linear indices to non-slack (node, phase) pairs.

    Ordering is deterministic: nodes in declaration order, phases in
    canonical order within each node.
    """
    nodes = tuple(nodes)
    seen = set()
    for n in nodes:
        if n.id in seen:
            raise SchemaError(f"duplicate node id {n.id!r}")
        seen.add(n.id)
    slack = [n for n in nodes if n.kind == "slack"]
    if len(slack) != 1:
        raise SchemaError(f"expected exactly one slack node, found {len(slack)}")

    pairs: list[tuple[str, str]] = []
    wye: list[int] = []
    delta: list[int] = []
    node_indices: dict[str, tuple[int, ...]] = {}
    for n in nodes:
        if n.kind == "slack":
            continue
        idxs = []
        for phase in n.phases:
            j = len(pairs)
            pairs.append((n.id, phase))
            idxs.append(j)
            (wye if n.kind == "wye" else delta).append(j)
        node_indices[n.id] = tuple(idxs)
    if not pairs:
        raise SchemaError("network needs at least one non-slack node")

    return IndexMap(
        pairs=tuple(pairs),
        position={pair: j for j, pair in enumerate(pairs)},
        node_indices=node_indices,
        wye=tuple(wye),
        delta=tuple(delta),
        delta_order={k: pos for pos, k in enumerate(delta)},
    )


class NetworkModel:
    """Validated feeder graph with its index map.

    Immutable after construction; safe to share across threads.
    """

    def __init__(self, nodes: Iterable[NodeSpec], branches: Iterable[BranchSpec] = ()):
        self.nodes: tuple[NodeSpec, ...] = tuple(nodes)
        self.branches: tuple[BranchSpec, ...] = tuple(branches)
        self.index_map = build_index_map(self.nodes)
        self.slack = next(n for n in self.nodes if n.kind == "slack")
        self.non_slack: tuple[NodeSpec, ...] = tuple(
            n for n in self.nodes if n.kind != "slack"
        )
        self._by_id = {n.id: n for n in self.nodes}
        for b in self.branches:
            for end in (b.from_node, b.to_node):
                if end not in self._by_id:
                    raise SchemaError(
                        f"branch {b.from_node!r}-{b.to_node!r}: unknown node {end!r}"
                    )
            shared = set(self._by_id[b.from_node].phases) & set(self._by_id[b.to_node].phases)
            extra = set(b.phases) - shared
            if extra:
                raise SchemaError(
                    f"branch {b.from_node!r}-{b.to_node!r}: phases "
                    f"{''.join(sorted(extra))!r} are not shared by both endpoints"
                )

    def node(self, node_id: str) -> NodeSpec:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise SchemaError(f"unknown node {node_id!r}") from None

    def node_slice(self, node_id: str) -> slice:
        """Contiguous slice of linear indices belonging to a non-slack node."""
        idxs = self.index_map.node_indices[node_id]
        return slice(idxs[0], idxs[-1] + 1)


@dataclass(frozen=True, eq=False)
class DeltaPairing:
    """Role of one delta (node, phase) index in the pair decomposition.

    A phase whose cyclic successor is available forms the pair
    (phase, right_shift(phase)) and carries that pair's load; otherwise the
    node has exactly two phases, the index carries no load of its own, and
    the selector points at the single other phase.
    """

    paired: bool
    phase: str
    partner: str
    selector: np.ndarray


def delta_pairing(node: NodeSpec, phase: str) -> DeltaPairing:
    if node.kind != "delta":
        raise SchemaError(f"node {node.id!r} is {node.kind}-connected, not delta")
    if phase not in node.phases:
        raise SchemaError(f"phase {phase!r} not available at node {node.id!r}")
    succ = right_shift(phase)
    if succ in node.phases:
        return DeltaPairing(
            paired=True,
            phase=phase,
            partner=succ,
            selector=line_to_line_selector(node.phases, phase, succ),
        )
    other = next(p for p in node.phases if p != phase)
    return DeltaPairing(
        paired=False,
        phase=phase,
        partner=other,
        selector=line_to_line_selector(node.phases, phase, other),
    )
