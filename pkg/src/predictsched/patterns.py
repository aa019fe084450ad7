"""Layered mining of recurring jobs and prolongation into predicted arrivals.

Layer 1 chains individual jobs of one user with near-identical requirements
submitted at a near-constant period.  Higher layers treat each chain as a
pseudo-job anchored at its first occurrence, so groups of jobs that
themselves recur (for example a daily batch that restarts every semester)
appear as super-patterns over child chains.

Chaining is greedy and deterministic: the two earliest unclaimed jobs seed a
candidate period, the chain extends while the next unclaimed job's gap from
the tail stays within the jitter bound of the running median period, and
chains shorter than the minimum length are abandoned (their seed cannot be a
member of any later chain, which only grows forward in time).
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .workload import Job, Workload


@dataclass(frozen=True)
class SimilarityParams:
    cpu_tol: float = 0.0
    runtime_tol: float = 0.25
    period_jitter: float = 0.10
    min_occurrences: int = 3
    same_user: bool = True

    def __post_init__(self):
        for name in ("cpu_tol", "runtime_tol", "period_jitter"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} must lie in [0, 1)")
        if self.min_occurrences < 3:
            raise ValueError("min_occurrences must be >= 3")


@dataclass(frozen=True)
class Pattern:
    """A chain of similar jobs recurring at a near-constant period.

    For layers >= 2 the occurrence ids are child pattern ids and the
    occurrence times are the children's first submission times.
    """

    pattern_id: int
    layer: int
    user_id: int
    rep_cpus: int
    rep_runtime: float
    period: float
    occurrences: tuple[tuple[int, float], ...]  # (job id, submit time)
    child_ids: tuple[int, ...] = ()

    @property
    def length(self) -> int:
        return len(self.occurrences)

    @property
    def span(self) -> float:
        return self.occurrences[-1][1] - self.occurrences[0][1]

    @property
    def last_time(self) -> float:
        return self.occurrences[-1][1]


@dataclass(frozen=True)
class PredictedJob:
    pattern_id: int
    predicted_submit: float
    cpus: int
    runtime: float
    confidence: float = 0.0
    user_id: int = -1
    steps_ahead: int = 1  # prolongation index past the pattern's last occurrence


def _reqs_match(cpus_a: float, cpus_b: float, rt_a: float, rt_b: float,
                params: SimilarityParams) -> bool:
    if abs(cpus_a - cpus_b) > params.cpu_tol * max(cpus_a, cpus_b):
        return False
    return abs(rt_a - rt_b) <= params.runtime_tol * max(rt_a, rt_b)


def group_similar_jobs(
    workload: Workload | Sequence[Job], params: SimilarityParams = SimilarityParams()
) -> list[list[Job]]:
    """Partition jobs into requirement clusters (per user when same_user).

    Single pass in submit order: a job joins the first cluster whose median
    cpus and runtime match it within tolerance, otherwise it opens a new one.
    """
    jobs = sorted(workload, key=lambda j: (j.submit_time, j.job_id))
    if not jobs:
        raise ValueError("empty workload")

    def key(job: Job):
        return job.user_id if params.same_user else 0

    by_user: dict[int, list[list[Job]]] = {}
    for job in jobs:
        clusters = by_user.setdefault(key(job), [])
        for cluster in clusters:
            med_cpus = statistics.median(j.cpus for j in cluster)
            med_rt = statistics.median(j.runtime for j in cluster)
            if _reqs_match(job.cpus, med_cpus, job.runtime, med_rt, params):
                cluster.append(job)
                break
        else:
            clusters.append([job])
    out: list[list[Job]] = []
    for user in sorted(by_user):
        out.extend(by_user[user])
    return out


def detect_patterns(
    cluster: Sequence[Job],
    params: SimilarityParams = SimilarityParams(),
    layer: int = 1,
    start_id: int = 0,
    span_of: Optional[dict[int, float]] = None,
) -> list[Pattern]:
    """Extract greedy periodic chains from one requirement cluster.

    span_of maps member job ids to a minimum gap (used by higher layers so a
    super-period always exceeds the child chains' spans).
    """
    jobs = sorted(cluster, key=lambda j: (j.submit_time, j.job_id))
    claimed: set[int] = set()
    dead: set[int] = set()
    patterns: list[Pattern] = []
    next_id = start_id

    def gap_ok(gap: float, tail: Job) -> bool:
        if gap <= 0:
            return False
        if span_of is not None and gap <= span_of.get(tail.job_id, 0.0):
            return False
        return True

    while True:
        avail = [j for j in jobs if j.job_id not in claimed and j.job_id not in dead]
        if len(avail) < 2:
            break
        anchor = avail[0]
        partner_idx = next(
            (i for i in range(1, len(avail))
             if gap_ok(avail[i].submit_time - anchor.submit_time, anchor)),
            None,
        )
        if partner_idx is None:
            dead.add(anchor.job_id)
            continue
        chain = [anchor, avail[partner_idx]]
        gaps = [avail[partner_idx].submit_time - anchor.submit_time]
        for j in avail[partner_idx + 1 :]:
            gap = j.submit_time - chain[-1].submit_time
            p_med = statistics.median(gaps)
            if not gap_ok(gap, chain[-1]) or abs(gap - p_med) > params.period_jitter * p_med:
                break
            chain.append(j)
            gaps.append(gap)
        if len(chain) >= params.min_occurrences:
            patterns.append(
                Pattern(
                    pattern_id=next_id,
                    layer=layer,
                    user_id=anchor.user_id,
                    rep_cpus=int(statistics.median_low(j.cpus for j in chain)),
                    rep_runtime=float(statistics.median(j.runtime for j in chain)),
                    period=float(statistics.median(gaps)),
                    occurrences=tuple((j.job_id, j.submit_time) for j in chain),
                    child_ids=tuple(j.job_id for j in chain) if layer > 1 else (),
                )
            )
            next_id += 1
            claimed.update(j.job_id for j in chain)
        else:
            dead.add(anchor.job_id)
    return patterns


def build_layers(
    layer1: Sequence[Pattern],
    params: SimilarityParams = SimilarityParams(),
    max_layer: int = 3,
) -> list[Pattern]:
    """Stack super-patterns on top of layer-1 chains.

    Each pattern becomes a pseudo-job at its first occurrence with
    requirements (rep_cpus, rep_runtime * length); chaining then reapplies
    with the extra constraint that gaps exceed the member chains' spans.
    Returns all layers, the input included.
    """
    all_patterns = list(layer1)
    current = list(layer1)
    next_id = max((p.pattern_id for p in all_patterns), default=-1) + 1
    for layer in range(2, max_layer + 1):
        if len(current) < 2:
            break
        pseudo = [
            Job(
                job_id=p.pattern_id,
                user_id=p.user_id,
                group_id=0,
                submit_time=p.occurrences[0][1],
                runtime=p.rep_runtime * p.length,
                runtime_estimate=p.rep_runtime * p.length,
                cpus=p.rep_cpus,
            )
            for p in current
        ]
        spans = {p.pattern_id: p.span for p in current}
        supers: list[Pattern] = []
        for cluster in group_similar_jobs(pseudo, params):
            found = detect_patterns(
                cluster, params, layer=layer, start_id=next_id, span_of=spans
            )
            supers.extend(found)
            next_id += len(found)
        if not supers:
            break
        all_patterns.extend(supers)
        current = supers
    return all_patterns


def prolong(
    patterns: Sequence[Pattern],
    now: float,
    horizon: float,
    staleness_factor: float = 2.0,
) -> list[PredictedJob]:
    """Extend each live pattern into (now, now + horizon].

    A pattern is live while its last occurrence is within staleness_factor
    periods of now; beyond that it stops producing phantom arrivals.  Super
    patterns spawn their most recent child chain's full occurrence block at
    every predicted super-period tick.
    """
    if horizon <= 0:
        raise ValueError("horizon must be > 0")
    by_id = {p.pattern_id: p for p in patterns}
    preds: list[PredictedJob] = []
    for p in sorted(patterns, key=lambda q: q.pattern_id):
        last = p.last_time
        if now - last > staleness_factor * p.period:
            continue
        if p.layer == 1:
            k = 1
            while True:
                t = last + k * p.period
                if t > now + horizon:
                    break
                if t > now:
                    preds.append(
                        PredictedJob(
                            pattern_id=p.pattern_id,
                            predicted_submit=t,
                            cpus=p.rep_cpus,
                            runtime=p.rep_runtime,
                            user_id=p.user_id,
                            steps_ahead=k,
                        )
                    )
                k += 1
        else:
            child = by_id.get(p.occurrences[-1][0])
            if child is None:
                continue
            offsets = [t - child.occurrences[0][1] for _, t in child.occurrences]
            m = 1
            while True:
                t0 = last + m * p.period
                if t0 > now + horizon:
                    break
                for off in offsets:
                    t = t0 + off
                    if now < t <= now + horizon:
                        preds.append(
                            PredictedJob(
                                pattern_id=p.pattern_id,
                                predicted_submit=t,
                                cpus=child.rep_cpus,
                                runtime=child.rep_runtime,
                                user_id=p.user_id,
                                steps_ahead=m,
                            )
                        )
                m += 1
    preds.sort(key=lambda q: (q.predicted_submit, q.pattern_id))
    return preds


def mine_patterns(
    jobs: Workload | Sequence[Job],
    params: SimilarityParams = SimilarityParams(),
    max_layer: int = 3,
) -> list[Pattern]:
    """Cluster, chain, and layer in one deterministic pass with global ids."""
    layer1: list[Pattern] = []
    next_id = 0
    for cluster in group_similar_jobs(jobs, params):
        found = detect_patterns(cluster, params, start_id=next_id)
        layer1.extend(found)
        next_id += len(found)
    return build_layers(layer1, params, max_layer=max_layer)


def predictions_to_csv(
    predictions: Iterable[PredictedJob], patterns: Sequence[Pattern]
) -> str:
    layer_of = {p.pattern_id: p.layer for p in patterns}
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["pattern_id", "layer", "predicted_submit", "cpus", "runtime", "confidence"])
    for pred in predictions:
        writer.writerow(
            [
                pred.pattern_id,
                layer_of.get(pred.pattern_id, 1),
                pred.predicted_submit,
                pred.cpus,
                pred.runtime,
                f"{pred.confidence:.6f}",
            ]
        )
    return out.getvalue()


def with_confidence(pred: PredictedJob, confidence: float) -> PredictedJob:
    return replace(pred, confidence=confidence)
