"""Edge-list text files and JSON reports.

Edge-list layout::

    # ell=3, q=3, seed=7, sides=27,27
    0 27
    0 31 2

Header lines are ``key=value`` items separated by ``", "``; the ``sides``
item is mandatory. Each remaining line is ``u v`` or ``u v mult``.
"""

from __future__ import annotations

import json
from pathlib import Path

from .graph import BipartiteGraph, _jsonable


def _format_value(v) -> str:
    if isinstance(v, (list, tuple)):
        return "/".join(str(x) for x in v)
    return str(v)


def write_edgelist(g: BipartiteGraph, path, header: dict | None = None) -> None:
    items = {}
    for key in ("ell", "q", "seed"):
        if key in g.meta:
            items[key] = g.meta[key]
    items.update(header or {})
    head = ", ".join(f"{k}={_format_value(v)}" for k, v in items.items())
    sides = f"sides={g.left_count},{g.right_count}"
    lines = [f"# {head}, {sides}" if head else f"# {sides}"]
    for (u, v), w in zip(g.edges(), g.edge_multiplicities()):
        lines.append(f"{u} {v}" if w == 1 else f"{u} {v} {w}")
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if "/" in text:
        return [_parse_scalar(t) for t in text.split("/")]
    return text


def read_edgelist(path) -> BipartiteGraph:
    meta: dict = {}
    sides = None
    edges, mult = [], []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for item in line[1:].split(", "):
                if "=" not in item:
                    continue
                key, value = item.strip().split("=", 1)
                if key == "sides":
                    left, right = value.split(",")
                    sides = (int(left), int(right))
                else:
                    meta[key] = _parse_scalar(value)
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ValueError(f"{path}:{lineno}: expected 'u v [mult]'")
        edges.append((int(parts[0]), int(parts[1])))
        mult.append(int(parts[2]) if len(parts) == 3 else 1)
    if sides is None:
        raise ValueError(f"{path}: missing 'sides=L,R' header")
    return BipartiteGraph(sides[0], sides[1], edges, mult, meta=meta)


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())
