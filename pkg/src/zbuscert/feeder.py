"""Feeder file schema: JSON ingestion, validation, and canonical emission.

A feeder file is a single JSON object:

    {
      "schema_version": "1",
      "base": {"s_base_va": ..., "v_base_v": ...},        # optional echo-only metadata
      "slack": {"id": "S", "voltage": [[re, im], x3]},    # voltage optional
      "nodes": [{"id": "1", "kind": "wye", "phases": "abc"}, ...],
      "branches": [{"from": "S", "to": "1", "phases": "abc",
                    "series": [[re, im], ...],            # row-major p*p block
                    "shunt_from": [...], "shunt_to": [...]}],
      "loads": {
        "wye":   [{"node": "1", "phase": "a", "s": [re, im], "i": [re, im], "y": [re, im]}],
        "delta": [{"node": "2", "pair": ["a", "b"], "s": ..., "i": ..., "y": ...}]
      }
    }

All quantities are per unit; complex numbers are [re, im] arrays.  The
``nodes`` list holds non-slack nodes only; the slack bus lives in its own
block and defaults to the unit positive-sequence voltage when ``voltage``
is omitted.  Emission is canonical (sorted keys, two-space indent), so
emit -> parse -> emit is byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .assembly import DEFAULT_SLACK_VOLTAGE
from .errors import SchemaError
from .loads import DeltaZip, WyeZip, ZipEntry, check_loads
from .network import BranchSpec, NetworkModel, NodeSpec

SCHEMA_VERSION = "1"


@dataclass(eq=False)
class Feeder:
    """A parsed feeder: network, loads, and the slack voltage."""

    network: NetworkModel
    wye: WyeZip
    delta: DeltaZip
    v_slack: np.ndarray
    base: dict | None = None


def dump_json(obj) -> str:
    """Canonical JSON emission used for every file this package writes."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def complex_to_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def pair_to_complex(value, where: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        raise SchemaError(f"{where}: expected a [re, im] number pair, got {value!r}")
    return complex(value[0], value[1])


def _require(mapping, key, where: str):
    if not isinstance(mapping, dict):
        raise SchemaError(f"{where}: expected an object")
    if key not in mapping:
        raise SchemaError(f"{where}: missing required field {key!r}")
    return mapping[key]


def _parse_block(rows, size: int, where: str) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != size * size:
        raise SchemaError(
            f"{where}: expected {size * size} row-major [re, im] pairs for a "
            f"{size}x{size} block"
        )
    flat = [pair_to_complex(x, f"{where}[{k}]") for k, x in enumerate(rows)]
    return np.array(flat, dtype=complex).reshape(size, size)


def _block_to_rows(block: np.ndarray) -> list[list[float]]:
    return [complex_to_pair(z) for z in np.asarray(block).ravel()]


def _parse_zip(item, where: str) -> ZipEntry:
    parts = {}
    for field in ("s", "i", "y"):
        if field in item:
            parts[field] = pair_to_complex(item[field], f"{where}.{field}")
    return ZipEntry(**parts)


def parse_feeder_dict(data) -> Feeder:
    """Validate a decoded feeder object and build the model it describes."""
    if not isinstance(data, dict):
        raise SchemaError("feeder: top level must be a JSON object")
    version = _require(data, "schema_version", "feeder")
    if version != SCHEMA_VERSION:
        raise SchemaError(
            f"feeder: unsupported schema_version {version!r} (expected {SCHEMA_VERSION!r})"
        )

    slack_obj = _require(data, "slack", "feeder")
    slack_id = _require(slack_obj, "id", "slack")
    if "voltage" in slack_obj:
        raw = slack_obj["voltage"]
        if not isinstance(raw, list) or len(raw) != 3:
            raise SchemaError("slack.voltage: expected three [re, im] pairs")
        v_slack = np.array(
            [pair_to_complex(x, f"slack.voltage[{k}]") for k, x in enumerate(raw)],
            dtype=complex,
        )
    else:
        v_slack = DEFAULT_SLACK_VOLTAGE.copy()

    nodes = [NodeSpec(slack_id, "slack", "abc")]
    for pos, node_obj in enumerate(_require(data, "nodes", "feeder")):
        where = f"nodes[{pos}]"
        kind = _require(node_obj, "kind", where)
        if kind == "slack":
            raise SchemaError(f"{where}: the slack bus is declared in the 'slack' block")
        nodes.append(
            NodeSpec(
                str(_require(node_obj, "id", where)),
                kind,
                _require(node_obj, "phases", where),
            )
        )

    branches = []
    for pos, br in enumerate(data.get("branches", [])):
        where = f"branches[{pos}]"
        phases = tuple(_require(br, "phases", where))
        size = len(phases)
        shunts = {}
        for field in ("shunt_from", "shunt_to"):
            if field in br:
                shunts[field] = _parse_block(br[field], size, f"{where}.{field}")
        branches.append(
            BranchSpec(
                from_node=str(_require(br, "from", where)),
                to_node=str(_require(br, "to", where)),
                phases=phases,
                series=_parse_block(_require(br, "series", where), size, f"{where}.series"),
                **shunts,
            )
        )

    network = NetworkModel(nodes, branches)

    loads_obj = data.get("loads", {})
    if not isinstance(loads_obj, dict):
        raise SchemaError("loads: expected an object with 'wye' and/or 'delta' lists")
    wye_items = []
    for pos, item in enumerate(loads_obj.get("wye", [])):
        where = f"loads.wye[{pos}]"
        wye_items.append(
            (
                str(_require(item, "node", where)),
                _require(item, "phase", where),
                _parse_zip(item, where),
            )
        )
    delta_items = []
    for pos, item in enumerate(loads_obj.get("delta", [])):
        where = f"loads.delta[{pos}]"
        pair = _require(item, "pair", where)
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise SchemaError(f"{where}.pair: expected two phase labels")
        delta_items.append(
            (str(_require(item, "node", where)), tuple(pair), _parse_zip(item, where))
        )
    wye = WyeZip.from_items(wye_items)
    delta = DeltaZip.from_items(delta_items)
    check_loads(network, wye, delta)

    base = data.get("base")
    if base is not None and not isinstance(base, dict):
        raise SchemaError("base: expected an object")
    return Feeder(network=network, wye=wye, delta=delta, v_slack=v_slack, base=base)


def parse_feeder_text(text: str) -> Feeder:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"feeder: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_feeder_dict(data)


def parse_feeder(path: str) -> Feeder:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_feeder_text(handle.read())


def feeder_to_dict(feeder: Feeder) -> dict:
    """Serializable view of a feeder in declaration order."""
    network = feeder.network
    nodes = [
        {"id": n.id, "kind": n.kind, "phases": "".join(n.phases)}
        for n in network.nodes
        if n.kind != "slack"
    ]
    branches = []
    for br in network.branches:
        obj = {
            "from": br.from_node,
            "to": br.to_node,
            "phases": "".join(br.phases),
            "series": _block_to_rows(br.series),
        }
        if br.shunt_from is not None:
            obj["shunt_from"] = _block_to_rows(br.shunt_from)
        if br.shunt_to is not None:
            obj["shunt_to"] = _block_to_rows(br.shunt_to)
        branches.append(obj)
    wye_loads = [
        {
            "node": node,
            "phase": phase,
            "s": complex_to_pair(e.s),
            "i": complex_to_pair(e.i),
            "y": complex_to_pair(e.y),
        }
        for (node, phase), e in sorted(feeder.wye.items())
    ]
    delta_loads = [
        {
            "node": node,
            "pair": list(pair),
            "s": complex_to_pair(e.s),
            "i": complex_to_pair(e.i),
            "y": complex_to_pair(e.y),
        }
        for (node, pair), e in sorted(feeder.delta.items())
    ]
    out = {
        "schema_version": SCHEMA_VERSION,
        "slack": {
            "id": network.slack.id,
            "voltage": [complex_to_pair(z) for z in feeder.v_slack],
        },
        "nodes": nodes,
        "branches": branches,
        "loads": {"wye": wye_loads, "delta": delta_loads},
    }
    if feeder.base is not None:
        out["base"] = feeder.base
    return out


def emit_feeder(feeder: Feeder) -> str:
    return dump_json(feeder_to_dict(feeder))
