"""Reading and writing datasets, models, and result tables.

All formats are structured text (JSON for datasets and models, CSV for
tabular results), so outputs are human-diffable. Floats are written with
Python's shortest round-trip representation: save -> load -> save is
byte-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .groups import ANOMALOUS, NORMAL, EmpiricalGroup, GaussianGroup, Group
from .kernels import KernelConfig
from .model import TrainedModel
from .qp import DualSolution

GROUPS_FORMAT = "ocsmm-groups"
MODEL_FORMAT = "ocsmm-model"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class GroupedData:
    """Groups as read from disk, with their ids and optional labels."""

    groups: tuple[Group, ...]
    ids: tuple[str, ...]
    labels: tuple[str, ...] | None

    def __post_init__(self):
        if len(self.groups) != len(self.ids):
            raise ValueError("groups and ids must have equal length")
        if self.labels is not None and len(self.labels) != len(self.groups):
            raise ValueError("labels must match groups in length")


def default_ids(count: int) -> tuple[str, ...]:
    width = max(3, len(str(max(count - 1, 0))))
    return tuple(f"g{i:0{width}d}" for i in range(count))


def _float_list(arr) -> list:
    return np.asarray(arr, dtype=float).tolist()


def _group_record(group: Group, gid: str, label: str | None) -> dict:
    rec: dict = {"id": gid}
    if isinstance(group, EmpiricalGroup):
        rec["points"] = _float_list(group.points)
    else:
        rec["mean"] = _float_list(group.mean)
        rec["cov"] = _float_list(group.cov)
    if label is not None:
        rec["label"] = label
    return rec


def _record_group(rec: dict) -> Group:
    gid = rec.get("id", "<missing id>")
    try:
        if "points" in rec:
            return EmpiricalGroup(np.asarray(rec["points"], dtype=float))
        if "mean" in rec and "cov" in rec:
            return GaussianGroup(np.asarray(rec["mean"], dtype=float),
                                 np.asarray(rec["cov"], dtype=float))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"group {gid!r}: {exc}") from exc
    raise ValueError(f"group {gid!r}: record needs either 'points' or 'mean'+'cov'")


def write_groups(path, groups: Sequence[Group], labels: Sequence[str] | None = None,
                 ids: Sequence[str] | None = None):
    """Write groups (+ optional labels) as a structured JSON dataset."""
    groups = list(groups)
    ids = list(ids) if ids is not None else list(default_ids(len(groups)))
    if labels is not None and len(labels) != len(groups):
        raise ValueError("labels must match groups in length")
    records = [
        _group_record(g, ids[i], labels[i] if labels is not None else None)
        for i, g in enumerate(groups)
    ]
    doc = {"format": GROUPS_FORMAT, "version": FORMAT_VERSION, "groups": records}
    Path(path).write_text(json.dumps(doc, indent=2, allow_nan=False) + "\n")


def read_groups(path) -> GroupedData:
    """Read a dataset: structured JSON, or tabular CSV (group_id, x1..xd)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return _read_groups_csv(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != GROUPS_FORMAT:
        raise ValueError(f"{path}: not a {GROUPS_FORMAT} file")
    records = doc.get("groups", [])
    if not records:
        raise ValueError(f"{path}: no groups")
    groups, ids, labels = [], [], []
    for i, rec in enumerate(records):
        groups.append(_record_group(rec))
        ids.append(str(rec.get("id", f"g{i:03d}")))
        lab = rec.get("label")
        if lab is not None and lab not in (NORMAL, ANOMALOUS):
            raise ValueError(f"group {rec.get('id')!r}: unknown label {lab!r}")
        labels.append(lab)
    has_labels = all(lab is not None for lab in labels)
    return GroupedData(
        groups=tuple(groups),
        ids=tuple(ids),
        labels=tuple(labels) if has_labels else None,
    )


def _read_groups_csv(path: Path) -> GroupedData:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"{path}: need a header and at least one data row")
    header = rows[0]
    if not header or header[0] != "group_id":
        raise ValueError(f"{path}: first column must be 'group_id'")
    d = len(header) - 1
    if d < 1:
        raise ValueError(f"{path}: no coordinate columns")
    by_id: dict[str, list] = {}
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != d + 1:
            raise ValueError(f"{path}:{line_no}: expected {d + 1} columns, got {len(row)}")
        gid = row[0]
        try:
            point = [float(v) for v in row[1:]]
        except ValueError as exc:
            raise ValueError(f"group {gid!r} (line {line_no}): {exc}") from exc
        by_id.setdefault(gid, []).append(point)
    ids = tuple(by_id.keys())  # insertion order = first appearance
    groups = tuple(EmpiricalGroup(np.asarray(pts)) for pts in by_id.values())
    return GroupedData(groups=groups, ids=ids, labels=None)


def save_model(path, model: TrainedModel):
    """Persist a trained model as versioned JSON; round-trips exactly."""
    sol = model.solution
    doc = {
        "format": MODEL_FORMAT,
        "version": FORMAT_VERSION,
        "config": {
            "sigma_sq": model.config.sigma_sq,
            "level2_gamma": model.config.level2_gamma,
            "spherical_normalize": model.config.spherical_normalize,
            "jitter": model.config.jitter,
        },
        "nu": model.nu,
        "solution": {
            "alpha": _float_list(sol.alpha),
            "rho": sol.rho,
            "objective": sol.objective,
            "margin_sv": [int(i) for i in sol.margin_sv],
            "bound_sv": [int(i) for i in sol.bound_sv],
            "kkt_residual": sol.kkt_residual,
        },
        "train_diag": _float_list(model.train_diag),
        "groups": [_group_record(g, gid, None)
                   for gid, g in zip(default_ids(len(model.train_groups)),
                                     model.train_groups)],
    }
    Path(path).write_text(json.dumps(doc, indent=2, allow_nan=False) + "\n")


def load_model(path) -> TrainedModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a {MODEL_FORMAT} file")
    try:
        cfg = doc["config"]
        config = KernelConfig(
            sigma_sq=cfg["sigma_sq"],
            level2_gamma=cfg["level2_gamma"],
            spherical_normalize=bool(cfg["spherical_normalize"]),
            jitter=cfg["jitter"],
        )
        sol = doc["solution"]
        solution = DualSolution(
            alpha=np.asarray(sol["alpha"], dtype=float),
            rho=float(sol["rho"]),
            objective=float(sol["objective"]),
            margin_sv=np.asarray(sol["margin_sv"], dtype=int),
            bound_sv=np.asarray(sol["bound_sv"], dtype=int),
            kkt_residual=float(sol["kkt_residual"]),
        )
        groups = tuple(_record_group(rec) for rec in doc["groups"])
        return TrainedModel(
            train_groups=groups,
            config=config,
            nu=float(doc["nu"]),
            solution=solution,
            train_diag=np.asarray(doc["train_diag"], dtype=float),
        )
    except KeyError as exc:
        raise ValueError(f"{path}: missing model field {exc}") from exc


def write_scores_csv(path, ids: Sequence[str], reports,
                     true_labels: Sequence[str] | None = None):
    """Scores table, one row per test group, ordered as the reports are."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["group_id", "decision", "score", "label"]
        if true_labels is not None:
            header.append("true_label")
        writer.writerow(header)
        for rep in reports:
            row = [ids[rep.index], repr(rep.decision), repr(rep.score), rep.label]
            if true_labels is not None:
                row.append(true_labels[rep.index])
            writer.writerow(row)


def read_scores_csv(path) -> tuple[list[str], np.ndarray, list[str] | None]:
    """Returns (ids, scores, true_labels or None) from a scores table."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"{path}: need a header and at least one data row")
    header = rows[0]
    try:
        id_col = header.index("group_id")
        score_col = header.index("score")
    except ValueError as exc:
        raise ValueError(f"{path}: missing required column ({exc})") from exc
    true_col = header.index("true_label") if "true_label" in header else None
    ids, scores, labels = [], [], []
    for line_no, row in enumerate(rows[1:], start=2):
        ids.append(row[id_col])
        try:
            scores.append(float(row[score_col]))
        except ValueError as exc:
            raise ValueError(f"{path}:{line_no}: bad score ({exc})") from exc
        if true_col is not None:
            labels.append(row[true_col])
    return ids, np.asarray(scores), (labels if true_col is not None else None)


def write_matrix_csv(path, header: Sequence[str], rows):
    """Generic numeric table writer with shortest round-trip floats."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else repr(float(v)) for v in row])
