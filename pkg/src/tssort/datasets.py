"""Readers and writers for panels, summary graphs and ts-graph JSON.

Formats
-------
panel CSV
    header row of column names, then one row per time step; values are
    written with 17 significant digits so a round trip is bit-exact.
summary CSV
    d rows of d comma-separated 0/1 entries, ``[i][j] = 1`` for i -> j.
ts-graph JSON
    ``{"d": int, "tau_max": int, "weights": [lag][from][to]}``; estimates
    add ``"method"`` and optionally ``"meta"``.
corpus directory
    ``<name>/panel_<k>.csv`` realisations sharing ``<name>/truth.json``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyFile, InvalidGraph, Malformed, NonBinary, NonSquare, SchemaError
from .graphs import SummaryGraph, WeightedTsGraph, is_acyclic, summary_of
from .svar import Panel

LOAD_ATOL = 1e-12


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise Malformed(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from None


def write_panel_csv(p: Panel, path) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(p.names)
    for row in p.data:
        w.writerow([_fmt(v) for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def load_panel_csv(path) -> Panel:
    text = _read_text(path)
    try:
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
    except csv.Error as exc:
        raise Malformed(f"{path}: {exc}") from None
    if not rows:
        raise EmptyFile(f"{path}: no header row")
    names = [n.strip() for n in rows[0]]
    if len(rows) < 3:
        raise EmptyFile(f"{path}: need at least 2 data rows, found {len(rows) - 1}")
    d = len(names)
    data = np.empty((len(rows) - 1, d))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != d:
            raise Malformed(f"{path}: row {r} has {len(row)} cells, header has {d}")
        for c, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise Malformed(f"{path}: row {r}, column {c + 1} ({names[c]!r}): not a number: {cell!r}") from None
            if not math.isfinite(v):
                raise Malformed(f"{path}: row {r}, column {c + 1} ({names[c]!r}): non-finite value {cell!r}")
            data[r - 2, c] = v
    return Panel(data, tuple(names))


def write_summary_csv(g: SummaryGraph, path) -> None:
    lines = [",".join("1" if x else "0" for x in row) for row in g.adj]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_summary_csv(path, names=None) -> SummaryGraph:
    text = _read_text(path)
    try:
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
    except csv.Error as exc:
        raise Malformed(f"{path}: {exc}") from None
    if not rows:
        raise EmptyFile(f"{path}: empty summary matrix")
    d = len(rows)
    adj = np.zeros((d, d), dtype=bool)
    for i, row in enumerate(rows):
        if len(row) != d:
            raise NonSquare(f"{path}: row {i + 1} has {len(row)} entries, expected {d}")
        for j, cell in enumerate(row):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise NonBinary(f"{path}: row {i + 1}, column {j + 1}: expected 0 or 1, got {cell!r}")
            adj[i, j] = cell == "1"
    if names is not None and len(names) != d:
        raise NonSquare(f"{path}: {d}x{d} matrix but {len(names)} names")
    return SummaryGraph(adj)


def graph_to_json(weights, method=None, meta=None) -> str:
    w = np.asarray(weights, dtype=float)
    obj = {"d": int(w.shape[1]), "tau_max": int(w.shape[0] - 1), "weights": w.tolist()}
    if method is not None:
        obj["method"] = method
    if meta:
        obj["meta"] = meta
    return json.dumps(obj, indent=1) + "\n"


def write_ts_graph_json(g, path, method=None, meta=None) -> None:
    w = g.weights if isinstance(g, WeightedTsGraph) else g
    Path(path).write_text(graph_to_json(w, method, meta), encoding="utf-8")


def parse_ts_graph(obj, source="<json>") -> WeightedTsGraph:
    if not isinstance(obj, dict):
        raise SchemaError(f"{source}: top level must be an object")
    for key in ("d", "tau_max", "weights"):
        if key not in obj:
            raise SchemaError(f"{source}: missing key {key!r}")
    d, tau = obj["d"], obj["tau_max"]
    if not (isinstance(d, int) and not isinstance(d, bool) and d >= 1):
        raise SchemaError(f"{source}: 'd' must be a positive integer")
    if not (isinstance(tau, int) and not isinstance(tau, bool) and tau >= 0):
        raise SchemaError(f"{source}: 'tau_max' must be a non-negative integer")
    try:
        w = np.array(obj["weights"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{source}: weights are not a numeric [lag][from][to] array ({exc})") from None
    if w.shape != (tau + 1, d, d):
        raise SchemaError(f"{source}: weights shape {w.shape} != (tau_max+1, d, d) = {(tau + 1, d, d)}")
    if not np.all(np.isfinite(w)):
        raise SchemaError(f"{source}: weights contain non-finite values")
    w[np.abs(w) <= LOAD_ATOL] = 0.0
    if not is_acyclic(w[0]):
        warnings.warn(f"{source}: contemporaneous matrix is cyclic", stacklevel=3)
    try:
        return WeightedTsGraph(w, check_acyclic=False)
    except InvalidGraph as exc:
        raise SchemaError(f"{source}: {exc}") from None


def load_ts_graph_json(path) -> WeightedTsGraph:
    text = _read_text(path)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_ts_graph(obj, str(path))


@dataclass(frozen=True)
class LabeledDataset:
    name: str
    panel: Panel
    truth_summary: SummaryGraph | None = None
    truth_ts: WeightedTsGraph | None = None

    def __post_init__(self):
        if self.truth_summary is not None and self.truth_ts is not None:
            if summary_of(self.truth_ts) != self.truth_summary:
                raise SchemaError(f"{self.name}: summary truth disagrees with ts-graph truth")

    @property
    def summary(self) -> SummaryGraph | None:
        if self.truth_summary is not None:
            return self.truth_summary
        return None if self.truth_ts is None else summary_of(self.truth_ts)


def load_truth(path):
    """A ts-graph JSON, or a summary CSV. Returns ``(ts_graph, summary)``."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        g = load_ts_graph_json(path)
        return g, summary_of(g)
    return None, load_summary_csv(path)


_PANEL_RE = re.compile(r"panel_(\d+)\.csv$")


def load_corpus(root) -> list[LabeledDataset]:
    """Every realisation under ``root/<name>/``, sorted by name then index."""
    root = Path(root)
    out = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        truth_ts = truth_sum = None
        if (sub / "truth.json").exists():
            truth_ts = load_ts_graph_json(sub / "truth.json")
        elif (sub / "truth.csv").exists():
            truth_sum = load_summary_csv(sub / "truth.csv")
        panels = sorted(
            (int(m.group(1)), f) for f in sub.iterdir() if (m := _PANEL_RE.search(f.name))
        )
        for k, f in panels:
            out.append(LabeledDataset(f"{sub.name}/{k}", load_panel_csv(f), truth_sum, truth_ts))
    return out
