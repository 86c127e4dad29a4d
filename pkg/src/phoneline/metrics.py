"""Detection and segmentation evaluation: IoU, greedy matching, precision /
recall / F1, average precision, and confusion-matrix construction.

Conventions follow common detection-benchmark practice: predictions are
matched per class in descending confidence order against the unmatched ground
truth with the highest IoU at or above the threshold; the PR curve uses
all-points interpolation over the monotone precision envelope.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from ._kernels import rasterize_polygon
from .model import CLASS_INDEX, DETECTABLE_CLASSES, DomainError

Box = tuple[float, float, float, float]          # (x, y, w, h)
Polygon = Sequence[tuple[float, float]]

#: IoU ladder for mAP50-95.
MAP_THRESHOLDS = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))


@dataclass
class DetectionRecord:
    """One prediction or ground-truth region.

    Args:
        image_id: shared id space between predictions and ground truth.
        label: class name (one of the five detectable classes for 5x5
            confusion use; arbitrary labels are fine for P/R/AP).
        confidence: detector score in [0, 1]; ground truth uses 1.0.
        bbox: (x, y, w, h) in pixels, w and h positive.
        mask: optional closed polygon (vertex list, pixel coordinates).
    """

    image_id: str
    label: str
    confidence: float = 1.0
    bbox: Box = (0.0, 0.0, 1.0, 1.0)
    mask: Optional[list[tuple[float, float]]] = None

    def __post_init__(self):
        x, y, w, h = self.bbox
        if w <= 0 or h <= 0:
            raise DomainError(f"degenerate bbox {self.bbox}: w and h must be > 0")
        if not (0.0 <= self.confidence <= 1.0):
            raise DomainError(f"confidence {self.confidence} outside [0, 1]")
        if self.mask is not None:
            self.mask = _normalize_polygon(self.mask)


def iou_boxes(a: Box, b: Box) -> float:
    """Intersection-over-union of two (x, y, w, h) boxes; 0 when disjoint."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    if aw <= 0 or ah <= 0 or bw <= 0 or bh <= 0:
        raise DomainError("degenerate box: w and h must be > 0")
    ix = min(ax + aw, bx + bw) - max(ax, bx)
    iy = min(ay + ah, by + bh) - max(ay, by)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = aw * ah + bw * bh - inter
    return inter / union


def _normalize_polygon(points: Polygon) -> list[tuple[float, float]]:
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts = pts[:-1]  # accept explicitly closed rings
    if len(pts) < 3:
        raise DomainError("polygon needs at least 3 distinct vertices")
    return pts


def _segments_intersect(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if v == 0 else (1 if v > 0 else -1)

    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    return o1 != o2 and o3 != o4


def polygon_is_simple(points: Polygon) -> bool:
    """True when no two non-adjacent edges cross (pairwise O(n^2) test)."""
    pts = _normalize_polygon(points)
    n = len(pts)
    edges = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex
            if _segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def rasterize_mask(points: Polygon, x0: float, y0: float, nx: int, ny: int,
                   grid_px: float) -> np.ndarray:
    pts = _normalize_polygon(points)
    px = np.array([p[0] for p in pts], dtype=float)
    py = np.array([p[1] for p in pts], dtype=float)
    return rasterize_polygon(px, py, float(x0), float(y0), int(nx), int(ny), float(grid_px))


def iou_masks(a: Polygon, b: Polygon, grid_px: float = 1.0) -> float:
    """Pixel-set IoU of two simple polygons rasterised at ``grid_px``.

    Rasterisation at pixel centres is the reference semantics here; an exact
    polygon-clipping computation agrees within about 2/area for the shapes
    the suite cares about.
    """
    if grid_px <= 0:
        raise DomainError("grid_px must be positive")
    for name, poly in (("a", a), ("b", b)):
        if not polygon_is_simple(poly):
            raise DomainError(f"polygon {name} is self-intersecting")
    pa = _normalize_polygon(a)
    pb = _normalize_polygon(b)
    xs = [p[0] for p in pa + pb]
    ys = [p[1] for p in pa + pb]
    x0 = math.floor(min(xs) / grid_px) * grid_px
    y0 = math.floor(min(ys) / grid_px) * grid_px
    nx = max(1, math.ceil((max(xs) - x0) / grid_px))
    ny = max(1, math.ceil((max(ys) - y0) / grid_px))
    mask_a = rasterize_mask(pa, x0, y0, nx, ny, grid_px)
    mask_b = rasterize_mask(pb, x0, y0, nx, ny, grid_px)
    union = np.logical_or(mask_a, mask_b).sum()
    if union == 0:
        return 0.0
    inter = np.logical_and(mask_a, mask_b).sum()
    return float(inter) / float(union)


@dataclass
class EvalCounts:
    """Per-class true/false positives and false negatives at one operating
    point (IoU threshold + confidence threshold)."""

    tp: int = 0
    fp: int = 0
    fn: int = 0


def _greedy_match_class(preds: list[tuple[int, DetectionRecord]],
                        truths: list[tuple[int, DetectionRecord]],
                        iou_t: float) -> list[bool]:
    """Greedy confidence-ordered matching inside one class.

    Returns, for each prediction in the given (already sorted) order, whether
    it matched a ground truth.  Each truth matches at most once.
    """
    by_image: dict[str, list[int]] = {}
    for k, (_, t) in enumerate(truths):
        by_image.setdefault(t.image_id, []).append(k)
    taken = [False] * len(truths)
    hits = []
    for _, p in preds:
        best_iou, best_k = 0.0, -1
        for k in by_image.get(p.image_id, ()):
            if taken[k]:
                continue
            iou = iou_boxes(p.bbox, truths[k][1].bbox)
            if iou >= iou_t and iou > best_iou:
                best_iou, best_k = iou, k
        if best_k >= 0:
            taken[best_k] = True
            hits.append(True)
        else:
            hits.append(False)
    return hits


def _sorted_preds(preds: Iterable[DetectionRecord]) -> list[tuple[int, DetectionRecord]]:
    # stable sort: descending confidence, insertion order breaks ties
    indexed = list(enumerate(preds))
    return sorted(indexed, key=lambda kv: -kv[1].confidence)


def match_detections(preds: Sequence[DetectionRecord], truths: Sequence[DetectionRecord],
                     iou_t: float = 0.5, conf_t: float = 0.8) -> dict[str, EvalCounts]:
    """Per-class TP/FP/FN counts.

    Predictions below ``conf_t`` are discarded first; the survivors match
    greedily in descending confidence order against unmatched same-class
    ground truth with the highest IoU >= ``iou_t``.
    """
    labels = sorted({r.label for r in preds} | {r.label for r in truths})
    out: dict[str, EvalCounts] = {}
    for label in labels:
        kept = [(i, p) for i, p in _sorted_preds(preds)
                if p.label == label and p.confidence >= conf_t]
        cls_truths = [(i, t) for i, t in enumerate(truths) if t.label == label]
        hits = _greedy_match_class(kept, cls_truths, iou_t)
        tp = sum(hits)
        out[label] = EvalCounts(tp=tp, fp=len(kept) - tp, fn=len(cls_truths) - tp)
    return out


def precision_recall(counts: EvalCounts) -> tuple[float, float]:
    """Precision and recall with vacuous-case conventions.

    No predictions -> precision 1 (nothing claimed, nothing wrong); no ground
    truth -> recall 1 (nothing to find).
    """
    p = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp > 0 else 1.0
    r = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn > 0 else 1.0
    return p, r


def f1(precision: float, recall: float) -> float:
    """Harmonic mean; 0 when both inputs are 0."""
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def average_precision(preds: Sequence[DetectionRecord], truths: Sequence[DetectionRecord],
                      label: str, iou_t: float = 0.5) -> Optional[float]:
    """All-points-interpolated AP for one class; None without ground truth.

    The full confidence range participates (no confidence cut): AP summarises
    the whole PR trade-off, so it depends only on the score ranking.
    """
    cls_truths = [(i, t) for i, t in enumerate(truths) if t.label == label]
    if not cls_truths:
        return None
    kept = [(i, p) for i, p in _sorted_preds(preds) if p.label == label]
    hits = _greedy_match_class(kept, cls_truths, iou_t)
    n_truth = len(cls_truths)
    if not kept:
        return 0.0
    tp_cum = np.cumsum(hits)
    fp_cum = np.cumsum([not h for h in hits])
    recall = tp_cum / n_truth
    precision = tp_cum / (tp_cum + fp_cum)
    # monotone precision envelope (right-to-left running max)
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    prev_r = 0.0
    ap = 0.0
    for r, p in zip(recall, envelope):
        ap += (r - prev_r) * p
        prev_r = r
    return float(ap)


def map_range(preds: Sequence[DetectionRecord], truths: Sequence[DetectionRecord],
              thresholds: Sequence[float] = MAP_THRESHOLDS
              ) -> tuple[Optional[float], dict[str, Optional[float]], list[str]]:
    """mAP over the IoU ladder, averaged over classes with ground truth.

    Returns (mAP, per-class mean AP, skipped class labels).
    """
    labels = sorted({r.label for r in preds} | {r.label for r in truths})
    per_class: dict[str, Optional[float]] = {}
    skipped = []
    for label in labels:
        aps = [average_precision(preds, truths, label, t) for t in thresholds]
        if any(a is None for a in aps):
            per_class[label] = None
            skipped.append(label)
        else:
            per_class[label] = float(np.mean([a for a in aps if a is not None]))
    usable = [v for v in per_class.values() if v is not None]
    overall = float(np.mean(usable)) if usable else None
    return overall, per_class, skipped


def confusion_from_eval(preds: Sequence[DetectionRecord], truths: Sequence[DetectionRecord],
                        iou_t: float = 0.7, conf_t: float = 0.8):
    """Confusion matrix over the five classes from matched detections.

    Matching here is by IoU only (cross-class pairs allowed) so that a
    spatially correct but misclassified detection lands off the diagonal.
    Unmatched ground truths count in a per-class "missed" column outside the
    row normalisation.

    Returns:
        (counts 5x5 int array, normalized ConfusionMatrix-or-None rows list,
         missed per class, micro accuracy, flags)
    """
    n = len(DETECTABLE_CLASSES)
    valid = {c.value for c in DETECTABLE_CLASSES}
    for r in list(preds) + list(truths):
        if r.label not in valid:
            raise DomainError(f"label {r.label!r} is not one of the five detectable classes")
    kept = [(i, p) for i, p in _sorted_preds(preds) if p.confidence >= conf_t]
    by_image: dict[str, list[int]] = {}
    for k, t in enumerate(truths):
        by_image.setdefault(t.image_id, []).append(k)
    taken = [False] * len(truths)
    counts = np.zeros((n, n), dtype=int)
    for _, p in kept:
        best_iou, best_k = 0.0, -1
        for k in by_image.get(p.image_id, ()):
            if taken[k]:
                continue
            iou = iou_boxes(p.bbox, truths[k].bbox)
            if iou >= iou_t and iou > best_iou:
                best_iou, best_k = iou, k
        if best_k >= 0:
            taken[best_k] = True
            ti = CLASS_INDEX[_class_of(truths[best_k].label)]
            pi = CLASS_INDEX[_class_of(p.label)]
            counts[ti][pi] += 1
    missed = {c.value: 0 for c in DETECTABLE_CLASSES}
    for k, t in enumerate(truths):
        if not taken[k]:
            missed[t.label] += 1
    rows = []
    flags = []
    truth_totals = np.zeros(n, dtype=int)
    for k, t in enumerate(truths):
        truth_totals[CLASS_INDEX[_class_of(t.label)]] += 1
    for i, c in enumerate(DETECTABLE_CLASSES):
        row_sum = counts[i].sum()
        if truth_totals[i] == 0:
            rows.append(None)
            flags.append(f"{c.value}: no ground truth; row undefined")
        elif row_sum == 0:
            rows.append(None)
            flags.append(f"{c.value}: no matched detections; row undefined")
        else:
            rows.append((counts[i] / row_sum).tolist())
    total_truths = int(truth_totals.sum())
    accuracy = float(np.trace(counts)) / total_truths if total_truths else 0.0
    return counts, rows, missed, accuracy, flags


def _class_of(label: str):
    for c in DETECTABLE_CLASSES:
        if c.value == label:
            return c
    raise DomainError(f"unknown class label {label!r}")


def load_jsonl(path: str | Path) -> list[DetectionRecord]:
    """Read line-delimited DetectionRecord JSON; errors carry line numbers."""
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
                records.append(DetectionRecord(
                    image_id=str(doc["image_id"]),
                    label=str(doc["class"]),
                    confidence=float(doc.get("confidence", 1.0)),
                    bbox=tuple(float(v) for v in doc["bbox"]),
                    mask=[(float(x), float(y)) for x, y in doc["mask"]] if doc.get("mask") else None,
                ))
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise DomainError(f"{path}:{lineno}: bad detection record: {exc}")
    return records


def evaluate(preds: Sequence[DetectionRecord], truths: Sequence[DetectionRecord],
             iou_t: float = 0.5, conf_t: float = 0.8,
             confusion_iou: float = 0.7) -> dict:
    """Full evaluation report used by the CLI.

    P/R/F1 are computed at (iou_t, conf_t); AP/mAP ignore the confidence cut;
    the confusion matrix matches at (confusion_iou, conf_t).
    """
    counts = match_detections(preds, truths, iou_t=iou_t, conf_t=conf_t)
    per_class = {}
    for label in sorted(counts):
        c = counts[label]
        p, r = precision_recall(c)
        per_class[label] = {
            "tp": c.tp, "fp": c.fp, "fn": c.fn,
            "precision": p, "recall": r, "f1": f1(p, r),
            "ap": average_precision(preds, truths, label, iou_t),
        }
    overall_map, map_per_class, skipped = map_range(preds, truths)
    report = {
        "iou_threshold": iou_t,
        "confidence_threshold": conf_t,
        "per_class": per_class,
        "map_50_95": overall_map,
        "map_50_95_per_class": map_per_class,
        "map_skipped_classes": skipped,
    }
    labels = {r.label for r in preds} | {r.label for r in truths}
    if labels <= {c.value for c in DETECTABLE_CLASSES}:
        cm, rows, missed, accuracy, flags = confusion_from_eval(
            preds, truths, iou_t=confusion_iou, conf_t=conf_t)
        report["confusion"] = {
            "iou_threshold": confusion_iou,
            "counts": cm.tolist(),
            "rows_normalized": rows,
            "missed": missed,
            "micro_accuracy": accuracy,
            "flags": flags,
        }
    return report
