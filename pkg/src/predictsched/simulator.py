"""Deterministic discrete-event simulation of a homogeneous cluster.

Jobs are non-preemptive and the cluster is a single pool of identical
processors.  The engine owns all mutable state: the event heap, the queue,
running allocations, and (when a forecaster configuration is supplied) the
reservation book and adaptive confidence thresholds.

Equal-time events process as finish < reservation expiry < submit <
reservation start < forecast tick, so capacity frees before same-instant
demands see it.  Every tie inside a class breaks on a monotone sequence
number, which makes repeated runs byte-identical.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .confidence import (
    Decision,
    FeedbackEvent,
    ThresholdState,
    confidence_factor,
    decide,
    group_for_pattern,
    group_patterns,
    update_thresholds,
)
from .patterns import (
    PredictedJob,
    SimilarityParams,
    _reqs_match,
    mine_patterns,
    prolong,
    with_confidence,
)
from .policies import Policy, SchedulerView, make_policy
from .simtrace import SimTrace, TraceRecord
from .workload import ClusterConfig, Job, Workload


class SimulationError(RuntimeError):
    """Invariant violation inside a run (policy bug or invalid input)."""


# event kinds in equal-time processing order
_FINISH, _RES_EXPIRE, _SUBMIT, _RES_START, _FORECAST = range(5)


@dataclass
class Reservation:
    """Capacity held (or merely tracked, for ignored predictions) for a forecast.

    decision selects the behaviour: hard reservations hold capacity for
    their whole window and cannot be displaced; soft ones hold capacity but
    yield to real jobs; ignored predictions hold nothing and exist only so
    their outcome can feed threshold adaptation.
    """

    res_id: int
    prediction: PredictedJob
    cpus: int
    window_start: float
    window_end: float
    decision: Decision
    match_width: float
    consumed: bool = False
    cancelled: bool = False
    expired: bool = False
    held: bool = False

    @property
    def hard(self) -> bool:
        return self.decision is Decision.HARD_RESERVE

    @property
    def holds_capacity(self) -> bool:
        return self.decision is not Decision.IGNORE

    @property
    def live(self) -> bool:
        return not (self.consumed or self.cancelled or self.expired)


@dataclass
class ClusterState:
    """Instantaneous processor accounting; free_cpus excludes hard holds."""

    total_cpus: int
    free_cpus: int
    running: dict[int, tuple[float, int]] = field(default_factory=dict)
    active_reservations: list[Reservation] = field(default_factory=list)
    queue: list[Job] = field(default_factory=list)


@dataclass(frozen=True)
class ForecasterConfig:
    similarity: SimilarityParams = SimilarityParams()
    thresholds: ThresholdState = ThresholdState()
    mode: str = "survival"
    tick: float = 86400.0
    horizon: float = 86400.0
    max_layer: int = 3
    staleness_factor: float = 2.0
    period_ratio_tol: float = 0.25
    match_window_frac: float = 0.25
    match_window_cap: float = 21600.0  # +/- 6 h at most

    def __post_init__(self):
        if self.tick <= 0 or self.horizon <= 0:
            raise ValueError("tick and horizon must be > 0")


@dataclass
class Telemetry:
    feedback: list[FeedbackEvent] = field(default_factory=list)
    reservations: list[Reservation] = field(default_factory=list)
    final_thresholds: Optional[ThresholdState] = None
    forecast_ticks: int = 0
    reservations_skipped: int = 0  # predictions whose window had no capacity


def match_arrival(
    job: Job,
    active_reservations: Sequence[Reservation],
    similarity: SimilarityParams,
) -> Optional[Reservation]:
    """Pick the live reservation this arrival most plausibly fulfils.

    Candidates must match the predicted user (when patterns are per-user)
    and requirements within the similarity tolerances, with the submit time
    inside the reservation's match window.  The nearest window center wins;
    ties go to the older reservation.
    """
    best: Optional[Reservation] = None
    best_d = 0.0
    for res in sorted(active_reservations, key=lambda r: r.res_id):
        if not res.live:
            continue
        p = res.prediction
        if similarity.same_user and p.user_id >= 0 and p.user_id != job.user_id:
            continue
        if not _reqs_match(job.cpus, p.cpus, job.runtime, p.runtime, similarity):
            continue
        d = abs(job.submit_time - p.predicted_submit)
        if d > res.match_width:
            continue
        if best is None or d < best_d:
            best, best_d = res, d
    return best


class _Engine:
    def __init__(
        self,
        workload: Workload,
        cluster: ClusterConfig,
        policy: Policy,
        forecaster: Optional[ForecasterConfig],
    ):
        for job in workload:
            if job.cpus > cluster.total_cpus:
                raise SimulationError(
                    f"job {job.job_id} requests {job.cpus} cpus, "
                    f"cluster has {cluster.total_cpus}"
                )
        self.workload = workload
        self.cluster = cluster
        self.policy = policy
        self.fc = forecaster
        self.state = ClusterState(
            total_cpus=cluster.total_cpus, free_cpus=cluster.total_cpus
        )
        self.soft_held = 0
        self.now = 0.0
        self.events: list[tuple[float, int, int, object]] = []
        self.seq = 0
        self.submitted: list[Job] = []
        self._jobs: dict[int, Job] = {j.job_id: j for j in workload}
        self.starts: dict[int, float] = {}
        self.finishes: dict[int, float] = {}
        self.thresholds = forecaster.thresholds if forecaster else ThresholdState()
        self.telemetry = Telemetry()
        self.next_res_id = 0
        self.unfinished = len(workload.jobs)
        self._policy_pending = False

        for job in workload:
            self._push(job.submit_time, _SUBMIT, job)
        if forecaster is not None and self.unfinished:
            self._push(forecaster.tick, _FORECAST, None)

    # -- event plumbing -------------------------------------------------

    def _push(self, time: float, kind: int, payload) -> None:
        # kind doubles as the equal-time priority; seq breaks remaining ties
        heapq.heappush(self.events, (time, kind, self.seq, payload))
        self.seq += 1

    def run(self) -> SimTrace:
        # equal-time events settle before the policy runs once for the
        # instant; a policy must never plan against a half-freed cluster
        while self.events:
            time, kind, _seq, payload = heapq.heappop(self.events)
            self.now = time
            if kind == _FINISH:
                self._on_finish(payload)
            elif kind == _RES_EXPIRE:
                self._on_res_expire(payload)
            elif kind == _SUBMIT:
                self._on_submit(payload)
            elif kind == _RES_START:
                self._on_res_start(payload)
            else:
                self._on_forecast()
            if self._policy_pending and (
                not self.events or self.events[0][0] > time
            ):
                self._policy_pending = False
                self._invoke_policy()
            self._check_accounting()
        if self.unfinished:
            raise SimulationError(f"{self.unfinished} jobs never finished")
        self.telemetry.final_thresholds = self.thresholds
        records = tuple(
            TraceRecord(
                job_id=j.job_id,
                submit=j.submit_time,
                start=self.starts[j.job_id],
                finish=self.finishes[j.job_id],
                cpus=j.cpus,
            )
            for j in self.workload
        )
        return SimTrace(
            records=records, cluster=self.cluster, policy_name=self.policy.name
        )

    # -- capacity helpers ------------------------------------------------

    def _check_accounting(self) -> None:
        running = sum(c for _s, c in self.state.running.values())
        hard = sum(
            r.cpus
            for r in self.state.active_reservations
            if r.held and r.hard
        )
        soft = sum(
            r.cpus
            for r in self.state.active_reservations
            if r.held and not r.hard
        )
        expected_free = self.state.total_cpus - running - hard
        if self.state.free_cpus != expected_free or soft != self.soft_held:
            raise SimulationError(
                f"capacity accounting diverged at t={self.now}: "
                f"free={self.state.free_cpus} expected={expected_free}"
            )
        if not 0 <= self.state.free_cpus <= self.state.total_cpus:
            raise SimulationError(
                f"free cpus out of range at t={self.now}: {self.state.free_cpus}"
            )
        if self.soft_held > self.state.free_cpus:
            raise SimulationError("soft holds exceed free capacity")

    def _cancel_youngest_soft(self) -> None:
        soft = [
            r
            for r in self.state.active_reservations
            if r.live and r.held and r.decision is Decision.SOFT_RESERVE
        ]
        if not soft:
            raise SimulationError("soft release requested with no soft holds")
        res = max(soft, key=lambda r: r.res_id)
        res.cancelled = True
        res.held = False
        self.soft_held -= res.cpus

    def _start_job(self, job: Job) -> None:
        if job.cpus > self.state.free_cpus:
            raise SimulationError(
                f"start of job {job.job_id} exceeds capacity "
                f"({job.cpus} > {self.state.free_cpus} free)"
            )
        while job.cpus > self.state.free_cpus - self.soft_held:
            self._cancel_youngest_soft()
        if job in self.state.queue:
            self.state.queue.remove(job)
        self.state.free_cpus -= job.cpus
        self.state.running[job.job_id] = (self.now, job.cpus)
        self.starts[job.job_id] = self.now
        self._push(self.now + job.runtime, _FINISH, job)

    def _try_start(self, job: Job) -> bool:
        if job.cpus > self.state.free_cpus:
            return False
        self._start_job(job)
        return True

    # -- event handlers ---------------------------------------------------

    def _on_submit(self, job: Job) -> None:
        self.submitted.append(job)
        consumed = None
        if self.fc is not None:
            consumed = match_arrival(
                job, self.state.active_reservations, self.fc.similarity
            )
        started = False
        if consumed is not None:
            self._consume(consumed, job)
            if consumed.holds_capacity:
                started = self._try_start(job)
        if not started:
            self.state.queue.append(job)
        self._policy_pending = True

    def _on_finish(self, job: Job) -> None:
        _start, cpus = self.state.running.pop(job.job_id)
        self.state.free_cpus += cpus
        self.finishes[job.job_id] = self.now
        self.unfinished -= 1
        self._policy_pending = True

    def _on_res_start(self, res: Reservation) -> None:
        if not res.live or not res.holds_capacity or res.held:
            return
        if res.cpus > self.state.free_cpus - self.soft_held:
            # capacity promised at creation no longer exists (runtime
            # underestimates); the hold cannot be established
            res.cancelled = True
            return
        res.held = True
        if res.hard:
            self.state.free_cpus -= res.cpus
        else:
            self.soft_held += res.cpus

    def _on_res_expire(self, res: Reservation) -> None:
        if not res.live:
            return
        res.expired = True
        self._release_hold(res)
        self._feedback(res, came_true=False)
        self._policy_pending = True

    def _release_hold(self, res: Reservation) -> None:
        if not res.held:
            return
        res.held = False
        if res.hard:
            self.state.free_cpus += res.cpus
        else:
            self.soft_held -= res.cpus

    def _consume(self, res: Reservation, job: Job) -> None:
        res.consumed = True
        self._release_hold(res)
        self._feedback(res, came_true=True)

    def _feedback(self, res: Reservation, came_true: bool) -> None:
        event = FeedbackEvent(
            prediction=res.prediction,
            came_true=came_true,
            observed_time=self.now,
            decision=res.decision,
        )
        self.telemetry.feedback.append(event)
        self.thresholds = update_thresholds(
            self.thresholds, came_true, res.prediction.confidence
        )

    # -- forecasting -------------------------------------------------------

    def _on_forecast(self) -> None:
        self.telemetry.forecast_ticks += 1
        fc = self.fc
        if len(self.submitted) >= 2:
            patterns = mine_patterns(self.submitted, fc.similarity, fc.max_layer)
            if patterns:
                preds = prolong(
                    patterns, self.now, fc.horizon, fc.staleness_factor
                )
                if preds:
                    groups = group_patterns(
                        patterns, fc.period_ratio_tol, fc.similarity
                    )
                    by_id = {p.pattern_id: p for p in patterns}
                    for pred in preds:
                        self._consider_prediction(pred, by_id, groups)
        if self.unfinished:
            self._push(self.now + fc.tick, _FORECAST, None)

    def _consider_prediction(self, pred: PredictedJob, by_id, groups) -> None:
        fc = self.fc
        pattern = by_id[pred.pattern_id]
        group = group_for_pattern(groups, pred.pattern_id)
        conf = confidence_factor(
            pattern.length + pred.steps_ahead, group, fc.mode
        )
        pred = with_confidence(pred, conf)
        width = min(fc.match_window_frac * pattern.period, fc.match_window_cap)
        if self._duplicate_reservation(pred, width):
            return
        decision = decide(conf, self.thresholds)
        window_start = max(self.now, pred.predicted_submit - width)
        window_end = pred.predicted_submit + width
        if decision is not Decision.IGNORE and not self._window_feasible(
            window_start, window_end, pred.cpus
        ):
            self.telemetry.reservations_skipped += 1
            return
        res = Reservation(
            res_id=self.next_res_id,
            prediction=pred,
            cpus=pred.cpus,
            window_start=window_start,
            window_end=window_end,
            decision=decision,
            match_width=width,
        )
        self.next_res_id += 1
        self.state.active_reservations.append(res)
        self.telemetry.reservations.append(res)
        if res.holds_capacity:
            self._push(window_start, _RES_START, res)
        self._push(window_end, _RES_EXPIRE, res)

    def _duplicate_reservation(self, pred: PredictedJob, width: float) -> bool:
        for res in self.state.active_reservations:
            if not res.live:
                continue
            p = res.prediction
            if p.user_id != pred.user_id:
                continue
            if not _reqs_match(
                pred.cpus, p.cpus, pred.runtime, p.runtime, self.fc.similarity
            ):
                continue
            if abs(p.predicted_submit - pred.predicted_submit) <= max(
                width, res.match_width
            ):
                return True
        return False

    def _window_feasible(self, ws: float, we: float, cpus: int) -> bool:
        """Would holding `cpus` through [ws, we) ever exceed the cluster?

        Projects running jobs at their estimated finishes plus existing live
        capacity-holding reservations; queued jobs are ignored since planner
        policies route around blocks.
        """
        points = {ws}
        loads: list[tuple[float, float, int]] = []
        for job_id, (start, c) in self.state.running.items():
            job = self._job_by_id(job_id)
            fin = max(start + job.runtime_estimate, self.now)
            if fin > ws:
                loads.append((ws, fin, c))
        for res in self.state.active_reservations:
            if res.live and res.holds_capacity:
                if res.window_end > ws and res.window_start < we:
                    loads.append((max(res.window_start, ws), res.window_end, res.cpus))
                    points.add(max(res.window_start, ws))
        for t0, _t1, _c in loads:
            points.add(t0)
        for t in sorted(points):
            if t >= we:
                continue
            busy = sum(c for t0, t1, c in loads if t0 <= t < t1)
            if busy + cpus > self.state.total_cpus:
                return False
        return True

    def _job_by_id(self, job_id: int) -> Job:
        return self._jobs[job_id]

    # -- policy dispatch ----------------------------------------------------

    def _invoke_policy(self) -> None:
        view = SchedulerView(
            now=self.now,
            total_cpus=self.state.total_cpus,
            free_cpus=self.state.free_cpus,
            queue=tuple(
                sorted(self.state.queue, key=lambda j: (j.submit_time, j.job_id))
            ),
            running=self._running_view(),
            hard_windows=self._hard_windows(),
        )
        starts = self.policy.select(view)
        queued_ids = {j.job_id for j in self.state.queue}
        for job in starts:
            if job.job_id not in queued_ids:
                raise SimulationError(
                    f"policy {self.policy.name} started job {job.job_id} "
                    "which is not queued"
                )
            self._start_job(job)
            queued_ids.discard(job.job_id)

    def _running_view(self):
        rows = []
        for job_id, (start, _cpus) in self.state.running.items():
            job = self._job_by_id(job_id)
            rows.append((job, start, start + job.runtime_estimate))
        rows.sort(key=lambda r: (r[1], r[0].job_id))
        return tuple(rows)

    def _hard_windows(self):
        rows = []
        for res in self.state.active_reservations:
            if res.live and res.hard:
                start = self.now if res.held else res.window_start
                rows.append((start, res.window_end, res.cpus))
        rows.sort()
        return tuple(rows)


def run(
    workload: Workload,
    cluster: ClusterConfig,
    policy: Policy | str,
    forecaster: Optional[ForecasterConfig] = None,
) -> SimTrace:
    """Simulate the workload under one policy and return the trace."""
    trace, _telemetry = run_with_telemetry(workload, cluster, policy, forecaster)
    return trace


def run_with_telemetry(
    workload: Workload,
    cluster: ClusterConfig,
    policy: Policy | str,
    forecaster: Optional[ForecasterConfig] = None,
) -> tuple[SimTrace, Telemetry]:
    """Simulate and also return reservation/feedback telemetry."""
    if isinstance(policy, str):
        policy = make_policy(policy)
    engine = _Engine(workload, cluster, policy, forecaster)
    trace = engine.run()
    return trace, engine.telemetry
