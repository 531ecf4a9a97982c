"""JSON interchange for instances, graphs and results.

Rationals are written as ``"p/q"`` strings and read back from ``"p/q"`` or
decimal strings (``"0.6"``), both exactly.  Bare JSON numbers are parsed
from their literal text, so ``0.6`` is also 3/5.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .core import Instance, NodeParams, PrecedenceDag, Trajectory, detect_jumps, repaired_nodes, reward, validate_instance
from .errors import InvalidInstance
from .reduction import ReductionOutput, UndirectedGraph

INF_TOKEN = "inf"


def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise InvalidInstance(f"not a rational: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidInstance(f"not a rational: {x!r}") from e
    raise InvalidInstance(f"not a rational: {x!r}")


def parse_horizon(x):
    if x is None or (isinstance(x, str) and x.strip().lower() in (INF_TOKEN, "infinity")):
        return None
    if isinstance(x, bool):
        raise InvalidInstance(f"bad horizon {x!r}")
    if isinstance(x, str):
        x = x.strip()
        if not x.isdigit():
            raise InvalidInstance(f"bad horizon {x!r}")
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    raise InvalidInstance(f"bad horizon {x!r}")


def format_horizon(h):
    return INF_TOKEN if h is None else h


def rat(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def loads(text: str):
    return json.loads(text, parse_float=Fraction)


def instance_from_json(doc: dict) -> Instance:
    try:
        nodes = sorted(doc["nodes"], key=lambda nd: int(nd["id"]))
        params = tuple(
            NodeParams(int(nd["id"]), parse_rational(nd["v0"]), parse_rational(nd["inc"]), parse_rational(nd["dec"]))
            for nd in nodes
        )
        edges = [tuple(e) for e in doc.get("edges", [])]
        horizon = parse_horizon(doc.get("T", INF_TOKEN))
    except (KeyError, TypeError) as e:
        raise InvalidInstance(f"malformed instance document: {e}") from e
    for e in edges:
        if len(e) != 2:
            raise InvalidInstance(f"edge {list(e)} is not a pair")
    return validate_instance(Instance(params, PrecedenceDag.make(len(params), edges), horizon))


def instance_to_json(inst: Instance) -> dict:
    return {
        "nodes": [{"id": p.id, "v0": rat(p.v0), "inc": rat(p.inc), "dec": rat(p.dec)} for p in inst.params],
        "edges": [list(e) for e in sorted(inst.dag.edges)],
        "T": format_horizon(inst.horizon),
    }


def load_instance(path) -> Instance:
    with open(path) as f:
        return instance_from_json(loads(f.read()))


def save_instance(inst: Instance, path):
    with open(path, "w") as f:
        json.dump(instance_to_json(inst), f, indent=2)
        f.write("\n")


def graph_from_json(doc: dict) -> UndirectedGraph:
    try:
        return UndirectedGraph.make(int(doc["s"]), [tuple(e) for e in doc.get("edges", [])])
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInstance(f"malformed graph document: {e}") from e


def load_graph(path) -> UndirectedGraph:
    with open(path) as f:
        return graph_from_json(loads(f.read()))


def trajectory_to_json(traj: Trajectory) -> dict:
    return {
        "actions": list(traj.actions),
        "states": [{"t": s.t, "values": [rat(v) for v in s.values]} for s in traj.states],
        "reward": reward(traj),
        "repaired": sorted(repaired_nodes(traj)),
        "failed": sorted(traj.final.failed()),
        "jumps": detect_jumps(traj),
    }


def reduction_to_json(red: ReductionOutput) -> dict:
    roles = {}
    for nid, role in red.roles.items():
        if role[0] == "root":
            roles[str(nid)] = {"role": "root"}
        elif role[0] == "v":
            roles[str(nid)] = {"role": "v", "vertex": role[1]}
        else:
            roles[str(nid)] = {"role": "e", "edge": list(role[1])}
    return {"instance": instance_to_json(red.instance), "z": red.z, "threshold": red.threshold, "roles": roles}
