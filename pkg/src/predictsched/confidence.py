"""Confidence scoring for predicted jobs and the adaptive reserve decision.

Patterns with similar periodicity and requirements form a cohort; the
distribution of cohort chain lengths says how plausible it is for a chain to
keep extending.  Each predicted occurrence gets a confidence in [0, 1] from
that distribution, and two adaptive borders split it into ignore / soft
reserve / hard reserve.  Feedback (did the prediction come true?) nudges the
borders during a run.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import statistics
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .patterns import Pattern, PredictedJob, SimilarityParams, _reqs_match

MODES = ("survival", "pdf_normalized")


class Decision(enum.Enum):
    IGNORE = "ignore"
    SOFT_RESERVE = "soft_reserve"
    HARD_RESERVE = "hard_reserve"


@dataclass(frozen=True)
class PatternGroup:
    member_pattern_ids: tuple[int, ...]
    lengths: tuple[int, ...]
    mean_len: float
    std_len: float


def _make_group(member_ids: Sequence[int], lengths: Sequence[int]) -> PatternGroup:
    if not lengths:
        raise ValueError("group must be nonempty")
    mean = statistics.fmean(lengths)
    # population deviation: singleton cohorts are legal and get std 0
    std = math.sqrt(statistics.fmean((x - mean) ** 2 for x in lengths))
    return PatternGroup(
        member_pattern_ids=tuple(member_ids),
        lengths=tuple(lengths),
        mean_len=mean,
        std_len=std,
    )


def group_patterns(
    patterns: Sequence[Pattern],
    period_ratio_tol: float = 0.25,
    req_params: SimilarityParams = SimilarityParams(),
) -> list[PatternGroup]:
    """Cohort patterns by period ratio and requirement similarity.

    Two patterns share a group when max/min of their periods is at most
    1 + period_ratio_tol and their representative requirements match within
    the similarity tolerances.  Grouping is a single pass in pattern_id
    order against group medians; cohorts never span layers (length
    statistics of chains and super-chains are not comparable).
    """
    groups: list[list[Pattern]] = []
    for p in sorted(patterns, key=lambda q: q.pattern_id):
        for members in groups:
            if members[0].layer != p.layer:
                continue
            med_period = statistics.median(m.period for m in members)
            lo, hi = min(p.period, med_period), max(p.period, med_period)
            if hi / lo > 1.0 + period_ratio_tol:
                continue
            med_cpus = statistics.median(m.rep_cpus for m in members)
            med_rt = statistics.median(m.rep_runtime for m in members)
            if _reqs_match(p.rep_cpus, med_cpus, p.rep_runtime, med_rt, req_params):
                members.append(p)
                break
        else:
            groups.append([p])
    return [
        _make_group([m.pattern_id for m in members], [m.length for m in members])
        for members in groups
    ]


def group_for_pattern(groups: Sequence[PatternGroup], pattern_id: int) -> PatternGroup:
    for g in groups:
        if pattern_id in g.member_pattern_ids:
            return g
    raise KeyError(f"pattern {pattern_id} is in no group")


def confidence_factor(
    length_including_predicted: int, group: PatternGroup, mode: str = "survival"
) -> float:
    """Confidence in [0, 1] that a chain of this cohort reaches the given length.

    survival mode answers "how likely is the chain to extend at least this
    far": 1 - Phi((n - mean) / std).  pdf_normalized keeps the bell shape of
    the cohort length distribution scaled to peak 1.  With a degenerate
    cohort (std 0) the factor collapses to an indicator around the mean.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode '{mode}'; expected one of {MODES}")
    n = float(length_including_predicted)
    if n < 1:
        raise ValueError("length must be >= 1")
    mean, std = group.mean_len, group.std_len
    if std == 0.0:
        if mode == "survival":
            return 1.0 if n <= mean else 0.0
        return 1.0 if n == mean else 0.0
    z = (n - mean) / std
    if mode == "survival":
        return 0.5 * math.erfc(z / math.sqrt(2.0))
    return math.exp(-0.5 * z * z)


@dataclass(frozen=True)
class ThresholdState:
    """Adaptive borders between the small / medium / high confidence ranges."""

    t_low: float = 0.33
    t_high: float = 0.66
    step: float = 0.02
    min_gap: float = 0.05

    def __post_init__(self):
        if self.step < 0:
            raise ValueError("step must be >= 0")
        eps = 1e-12  # clamping arithmetic may land on the border inexactly
        if not (
            0.0 <= self.t_low <= self.t_high - self.min_gap + eps
            and self.t_high <= 1.0
        ):
            raise ValueError(
                f"thresholds violate 0 <= t_low <= t_high - min_gap <= 1: "
                f"({self.t_low}, {self.t_high}, gap {self.min_gap})"
            )


def decide(confidence: float, state: ThresholdState) -> Decision:
    """Map a confidence to a decision tier; boundaries belong to the higher range."""
    if not 0.0 <= confidence <= 1.0:
        raise ValueError("confidence must lie in [0, 1]")
    if confidence < state.t_low:
        return Decision.IGNORE
    if confidence < state.t_high:
        return Decision.SOFT_RESERVE
    return Decision.HARD_RESERVE


def update_thresholds(
    state: ThresholdState, came_true: bool, confidence_at_decision: float
) -> ThresholdState:
    """Adapt the borders from one prediction outcome.

    Low-confidence predictions that come true pull the lower border down;
    high-confidence ones that fail push the upper border up.  The symmetric
    counter-moves (high confirmed pulls t_high down, low falsified pushes
    t_low up) keep the borders from drifting one way.  Medium outcomes leave
    the borders alone.  Updates clamp to [0, 1] and the minimum separation.
    """
    c = confidence_at_decision
    t_low, t_high = state.t_low, state.t_high
    if c < state.t_low:
        if came_true:
            t_low = max(0.0, t_low - state.step)
        else:
            t_low = min(t_high - state.min_gap, t_low + state.step)
    elif c >= state.t_high:
        if came_true:
            t_high = max(t_low + state.min_gap, t_high - state.step)
        else:
            t_high = min(1.0, t_high + state.step)
    else:
        return state
    return replace(state, t_low=t_low, t_high=t_high)


@dataclass(frozen=True)
class FeedbackEvent:
    prediction: PredictedJob
    came_true: bool
    observed_time: float
    decision: Optional[Decision] = None


def feedback_to_csv(events: Iterable[FeedbackEvent]) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["pattern_id", "predicted_submit", "confidence", "decision", "came_true"])
    for ev in events:
        writer.writerow(
            [
                ev.prediction.pattern_id,
                ev.prediction.predicted_submit,
                f"{ev.prediction.confidence:.6f}",
                ev.decision.value if ev.decision is not None else "",
                int(ev.came_true),
            ]
        )
    return out.getvalue()
