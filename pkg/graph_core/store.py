"""JSON graph files.

Format::

    {"vertices": [{"id": "a", "theta": 1.0}, ...],
     "edges":    [{"u": "a", "v": "b", "w": 1.0}, ...],
     "boundary": ["a", ...],          # optional, window graphs only
     "meta":     {"generator": ..., "params": {...}}}   # optional

Output is sorted and indented so the same graph always gives the same bytes.
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Any

from .errors import InvalidParams, NonFiniteWeight, NonPositiveTheta
from .graph import WeightedGraph, build_graph

log = logging.getLogger(__name__)


def graph_to_json(g: WeightedGraph) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "vertices": [{"id": v, "theta": g.theta(v)} for v in g.vertices],
        "edges": [{"u": u, "v": v, "w": w} for u, v, w in g.edges()],
    }
    if g.boundary:
        doc["boundary"] = sorted(g.boundary)
    if g.meta:
        doc["meta"] = dict(g.meta)
    return doc


def dumps_graph(g: WeightedGraph) -> str:
    return json.dumps(graph_to_json(g), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _number(value: Any, field: str, error: type) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise error(f"{field} must be a number, got {value!r}")
    return float(value)


def graph_from_json(doc: Any) -> WeightedGraph:
    """Validate a decoded JSON document and build the graph from it."""
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise InvalidParams("graph JSON needs 'vertices' and 'edges' arrays")
    try:
        vertices = [
            (str(item["id"]), _number(item["theta"], f"theta of {item['id']!r}", NonPositiveTheta))
            for item in doc["vertices"]
        ]
        edges = [
            (str(item["u"]), str(item["v"]), _number(item["w"], f"w of ({item['u']!r},{item['v']!r})", NonFiniteWeight))
            for item in doc["edges"]
        ]
    except (KeyError, TypeError) as exc:
        raise InvalidParams(f"malformed graph JSON entry: {exc}") from exc
    for _, th in vertices:
        if math.isnan(th):
            raise NonPositiveTheta("theta must not be NaN")
    boundary = [str(b) for b in doc.get("boundary", [])]
    return build_graph(vertices, edges, boundary=boundary, meta=doc.get("meta"))


def load_graph(path: str | Path) -> WeightedGraph:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidParams(f"cannot read graph file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidParams(f"{path} is not valid JSON: {exc}") from exc
    g = graph_from_json(doc)
    log.debug("loaded %r from %s", g, path)
    return g


def save_graph(g: WeightedGraph, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(dumps_graph(g), encoding="utf-8")
    log.debug("wrote %r to %s", g, path)
    return path
