"""Kendall / Spearman rank correlation against ground-truth orderings,
and mean/std aggregation over groups.

Ground-truth ranks are positive integers where a larger rank means better
quality; scores follow the same convention (higher is better).
"""
from __future__ import annotations

import csv
import json
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import rankdata


@dataclass
class Ranking:
    group_id: str
    items: list = field(default_factory=list)  # (item_id, score, gt_rank)

    @property
    def scores(self) -> list[float]:
        return [float(s) for _, s, _ in self.items]

    @property
    def gt_ranks(self) -> list[int]:
        return [int(r) for _, _, r in self.items]


@dataclass
class RankingReport:
    groups: list[str]
    krcc: list[float]
    srcc: list[float]
    mean_krcc: float
    std_krcc: float
    mean_srcc: float
    std_srcc: float

    def to_dict(self) -> dict:
        return {
            "mean_krcc": self.mean_krcc,
            "std_krcc": self.std_krcc,
            "mean_srcc": self.mean_srcc,
            "std_srcc": self.std_srcc,
            "groups": [
                {"group_id": g, "krcc": k, "srcc": s}
                for g, k, s in zip(self.groups, self.krcc, self.srcc)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def format_table(self) -> str:
        width = max([len("group")] + [len(g) for g in self.groups])
        lines = [f"{'group':<{width}}  {'KRCC':>8}  {'SRCC':>8}"]
        for g, k, s in zip(self.groups, self.krcc, self.srcc):
            lines.append(f"{g:<{width}}  {k:>8.4f}  {s:>8.4f}")
        lines.append("")
        lines.append(f"Mean KRCC {self.mean_krcc:.4f}   Std KRCC {self.std_krcc:.4f}")
        lines.append(f"Mean SRCC {self.mean_srcc:.4f}   Std SRCC {self.std_srcc:.4f}")
        return "\n".join(lines)


def _check_inputs(scores, gt_ranks) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64).ravel()
    g = np.asarray(gt_ranks).ravel()
    if s.size != g.size:
        raise ValueError(f"length mismatch: {s.size} scores vs {g.size} ranks")
    n = s.size
    if n < 2:
        raise ValueError("a ranking needs at least two items")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    try:
        g_int = g.astype(np.int64)
    except (TypeError, ValueError):
        raise ValueError("gt_ranks must be integers") from None
    if not np.array_equal(g_int, g) or not np.array_equal(np.sort(g_int), np.arange(1, n + 1)):
        raise ValueError(f"gt_ranks must be a permutation of 1..{n}")
    return s, g_int


def concordance_counts(scores, gt_ranks) -> tuple[int, int, int]:
    """``(n_concordant, n_discordant, n_pairs)``; tied-score pairs count as neither."""
    s, g = _check_inputs(scores, gt_ranks)
    n = s.size
    i, j = np.triu_indices(n, k=1)
    prod = np.sign(s[i] - s[j]) * np.sign(g[i] - g[j])
    return int(np.count_nonzero(prod > 0)), int(np.count_nonzero(prod < 0)), n * (n - 1) // 2


def krcc(scores, gt_ranks) -> float:
    """Kendall tau-a: (concordant - discordant) / (n (n - 1) / 2)."""
    n_c, n_d, n_pairs = concordance_counts(scores, gt_ranks)
    return (n_c - n_d) / n_pairs


def srcc(scores, gt_ranks) -> float:
    """Spearman ``1 - 6 sum d^2 / (n (n^2 - 1))`` with average ranks for tied scores."""
    s, g = _check_inputs(scores, gt_ranks)
    n = s.size
    d = rankdata(s, method="average") - g
    return float(1.0 - 6.0 * np.sum(d * d) / (n * (n * n - 1)))


def evaluate_groups(rankings) -> RankingReport:
    """Per-group KRCC/SRCC plus mean and population std across groups."""
    rankings = list(rankings)
    if not rankings:
        raise ValueError("no rankings to evaluate")
    ks = [krcc(r.scores, r.gt_ranks) for r in rankings]
    ss = [srcc(r.scores, r.gt_ranks) for r in rankings]
    return RankingReport(
        groups=[r.group_id for r in rankings],
        krcc=ks,
        srcc=ss,
        mean_krcc=float(np.mean(ks)),
        std_krcc=float(np.std(ks)),
        mean_srcc=float(np.mean(ss)),
        std_srcc=float(np.std(ss)),
    )


def group_rows(rows) -> list[Ranking]:
    """Collect ``(group_id, item_id, score, gt_rank)`` rows into rankings, keeping first-seen group order."""
    groups: "OrderedDict[str, Ranking]" = OrderedDict()
    for group_id, item_id, score, gt_rank in rows:
        groups.setdefault(group_id, Ranking(group_id)).items.append(
            (item_id, float(score), int(gt_rank)))
    return list(groups.values())


def read_scores_csv(path) -> list[Ranking]:
    """Read a ``group_id,item_id,score,gt_rank`` CSV."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = {"group_id", "item_id", "score", "gt_rank"}
        if reader.fieldnames is None or not expected <= set(reader.fieldnames):
            raise ValueError(f"{path}: header must contain {sorted(expected)}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            try:
                rows.append((rec["group_id"], rec["item_id"], float(rec["score"]), int(rec["gt_rank"])))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed row ({exc})") from None
    return group_rows(rows)


__all__ = [
    "Ranking", "RankingReport", "concordance_counts", "krcc", "srcc", "evaluate_groups",
    "group_rows", "read_scores_csv",
]
