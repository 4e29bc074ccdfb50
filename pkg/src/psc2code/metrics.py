"""Evaluation metrics: confusion-matrix scores, IoU, and ranked retrieval.

Every ratio with a zero denominator is reported as None rather than being
silently coerced to zero; callers decide how to render undefined cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .layout import Rect


class MissingTotalRelevant(ValueError):
    """AP was requested for a query without a total_relevant denominator."""


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("negative confusion count")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def _f1(p: float | None, r: float | None) -> float | None:
    if p is None or r is None or p + r == 0:
        return None
    return 2 * p * r / (p + r)


def classifier_metrics(cm: ConfusionMatrix) -> dict[str, float | None]:
    """Accuracy plus per-class precision/recall/F1 for the valid class (V)
    and the invalid class (IV)."""
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    p_v = _ratio(cm.tp, cm.tp + cm.fp)
    r_v = _ratio(cm.tp, cm.tp + cm.fn)
    p_iv = _ratio(cm.tn, cm.tn + cm.fn)
    r_iv = _ratio(cm.tn, cm.tn + cm.fp)
    return {
        "accuracy": (cm.tp + cm.tn) / cm.total,
        "precision_valid": p_v,
        "recall_valid": r_v,
        "precision_invalid": p_iv,
        "recall_invalid": r_iv,
        "f1_valid": _f1(p_v, r_v),
        "f1_invalid": _f1(p_iv, r_iv),
    }


def iou(a: Rect, b: Rect) -> float:
    """Geometric intersection over union; degenerate empty inputs score 0."""
    ix = max(0, min(a.x + a.w, b.x + b.w) - max(a.x, b.x))
    iy = max(0, min(a.y + a.h, b.y + b.h) - max(a.y, b.y))
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union if union else 0.0


def frame_iou(predicted: Rect | None, truth: Rect | None) -> float:
    """Frame-level region score with validity conventions.

    A frame both sides call invalid (no region) scores 1; disagreement on
    validity scores 0; otherwise the geometric IoU of the two regions.
    """
    if predicted is None and truth is None:
        return 1.0
    if predicted is None or truth is None:
        return 0.0
    return iou(predicted, truth)


@dataclass(frozen=True)
class QueryJudgment:
    """Ordered relevance of one query's returned list, top first."""

    relevance: tuple[bool, ...]
    total_relevant: int | None = None

    @classmethod
    def of(cls, bits: Sequence[int | bool], total_relevant: int | None = None) -> "QueryJudgment":
        return cls(tuple(bool(b) for b in bits), total_relevant)


def precision_at_k(judgment: QueryJudgment, k: int) -> float:
    bits = judgment.relevance[:k]
    return sum(bits) / k


def average_precision_at_k(judgment: QueryJudgment, k: int) -> float:
    if judgment.total_relevant is None:
        raise MissingTotalRelevant("AP needs total_relevant for its denominator")
    if judgment.total_relevant == 0:
        return 0.0
    bits = judgment.relevance[:k]
    score = 0.0
    seen = 0
    for rank, rel in enumerate(bits, start=1):
        if rel:
            seen += 1
            score += seen / rank
    return score / judgment.total_relevant


def reciprocal_rank_at_k(judgment: QueryJudgment, k: int) -> float:
    for rank, rel in enumerate(judgment.relevance[:k], start=1):
        if rel:
            return 1.0 / rank
    return 0.0


def retrieval_metrics(judgments: list[QueryJudgment], k: int) -> dict:
    """Per-query precision@k plus corpus MAP@k and MRR@k.

    Lists shorter than k count their missing tail as non-relevant; entries
    beyond k are ignored.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not judgments:
        raise ValueError("no judgments")
    precisions = [precision_at_k(j, k) for j in judgments]
    return {
        "k": k,
        "precision_at_k": precisions,
        "mean_precision_at_k": sum(precisions) / len(precisions),
        "map_at_k": sum(average_precision_at_k(j, k) for j in judgments) / len(judgments),
        "mrr_at_k": sum(reciprocal_rank_at_k(j, k) for j in judgments) / len(judgments),
    }


def correction_accuracies(incorrect: int, corrected: int,
                          truly_corrected: int) -> dict[str, float | None]:
    """Fraction of all wrong words repaired, and precision of the repairs."""
    if not 0 <= truly_corrected <= corrected:
        raise ValueError("truly_corrected exceeds corrected")
    return {"accuracy1": _ratio(truly_corrected, incorrect),
            "accuracy2": _ratio(truly_corrected, corrected)}
