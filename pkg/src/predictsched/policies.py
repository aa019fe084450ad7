"""The scheduling policies compared by the simulator.

Queue-based policies look only at the current queue and free processors.
Planner policies (backfilling, gap placement, predictive) maintain a
piecewise-constant capacity profile built from the estimated finish times
of running jobs, plus any hard reservation windows the engine passes in.

Planning always uses the user's runtime estimate; the engine fires actual
finishes, which re-invokes the policy, so early completions are exploited
immediately.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .workload import Job


class PolicyKind(enum.Enum):
    FCFS = "fcfs"
    LCFS = "lcfs"
    SHORTEST_JF = "sjf"
    SMALLEST_JF = "smjf"
    EDF = "edf"
    FIRST_FIT = "first-fit"
    CONSERVATIVE_BF = "cons-bf"
    EASY_BF = "easy-bf"
    ESG = "esg"
    BEST_GAP = "best-gap"
    DL_PREDICTIVE = "dl"


@dataclass(frozen=True)
class SchedulerView:
    """Immutable snapshot handed to a policy at each scheduling point.

    free_cpus excludes running jobs and in-window hard reservation holds.
    hard_windows carries (start, end, cpus) for live hard reservations; a
    start at or before now means the hold is already counted in free_cpus.
    """

    now: float
    total_cpus: int
    free_cpus: int
    queue: tuple[Job, ...]
    running: tuple[tuple[Job, float, float], ...]  # (job, start, estimated finish)
    hard_windows: tuple[tuple[float, float, int], ...] = ()


class CapacityProfile:
    """Free processors as a step function of time, from now onward.

    The last segment extends to infinity.  reserve() carves a job (or a
    reservation window) out of the profile; fit queries never mutate.
    """

    def __init__(self, now: float, free_now: float, deltas: dict[float, float]):
        self.times: list[float] = [now]
        self.free: list[float] = [float(free_now)]
        level = float(free_now)
        for t in sorted(deltas):
            if t <= now:
                continue
            level += deltas[t]
            self.times.append(t)
            self.free.append(level)

    @classmethod
    def from_view(cls, view: SchedulerView) -> "CapacityProfile":
        deltas: dict[float, float] = {}
        for _job, _start, est_finish in view.running:
            # overdue estimates release nothing; the real finish event replans
            if est_finish > view.now:
                deltas[est_finish] = deltas.get(est_finish, 0.0) + _job.cpus
        for ws, we, cpus in view.hard_windows:
            if we <= view.now:
                continue
            if ws > view.now:
                deltas[ws] = deltas.get(ws, 0.0) - cpus
            deltas[we] = deltas.get(we, 0.0) + cpus
        return cls(view.now, view.free_cpus, deltas)

    def _seg_index(self, t: float) -> int:
        return bisect.bisect_right(self.times, t) - 1

    def free_at(self, t: float) -> float:
        return self.free[self._seg_index(t)]

    def fits(self, start: float, duration: float, cpus: int) -> bool:
        i = self._seg_index(start)
        end = start + duration
        while True:
            if self.free[i] < cpus:
                return False
            i += 1
            if i >= len(self.times) or self.times[i] >= end:
                return True

    def earliest_fit(self, cpus: int, duration: float, ready: float) -> Optional[float]:
        cand = max(ready, self.times[0])
        while True:
            i = self._seg_index(cand)
            end = cand + duration
            j = i
            feasible = True
            while True:
                if self.free[j] < cpus:
                    feasible = False
                    break
                j += 1
                if j >= len(self.times) or self.times[j] >= end:
                    break
            if feasible:
                return cand
            # restart after the violating segment
            if j + 1 >= len(self.times):
                return None  # blocked by capacity that never releases in-profile
            cand = self.times[j + 1]

    def reserve(self, start: float, duration: float, cpus: int) -> None:
        end = start + duration
        self._split(start)
        self._split(end)
        for i in range(len(self.times)):
            if start <= self.times[i] < end:
                self.free[i] -= cpus

    def _split(self, t: float) -> None:
        if t <= self.times[0] or math.isinf(t):
            return
        i = bisect.bisect_left(self.times, t)
        if i < len(self.times) and self.times[i] == t:
            return
        self.times.insert(i, t)
        self.free.insert(i, self.free[i - 1])

    def segments(self) -> list[tuple[float, float, float]]:
        """Maximal constant-level (start, end, free) runs; the last end is inf."""
        out: list[tuple[float, float, float]] = []
        for i, t in enumerate(self.times):
            end = self.times[i + 1] if i + 1 < len(self.times) else math.inf
            if out and out[-1][2] == self.free[i]:
                out[-1] = (out[-1][0], end, self.free[i])
            else:
                out.append((t, end, self.free[i]))
        return out


def _submit_order(queue: Sequence[Job]) -> list[Job]:
    return sorted(queue, key=lambda j: (j.submit_time, j.job_id))


class Policy:
    """Base: select() returns the queued jobs to start right now."""

    name = "policy"

    def select(self, view: SchedulerView) -> list[Job]:
        raise NotImplementedError


class OrderedQueuePolicy(Policy):
    """Start jobs strictly in a sort order; stop at the first one that is blocked."""

    def order_key(self, job: Job):
        raise NotImplementedError

    def select(self, view: SchedulerView) -> list[Job]:
        free = view.free_cpus
        starts: list[Job] = []
        for job in sorted(view.queue, key=self.order_key):
            if job.cpus > free:
                break
            starts.append(job)
            free -= job.cpus
        return starts


class Fcfs(OrderedQueuePolicy):
    name = "fcfs"

    def order_key(self, job: Job):
        return (job.submit_time, job.job_id)


class Lcfs(OrderedQueuePolicy):
    name = "lcfs"

    def order_key(self, job: Job):
        return (-job.submit_time, job.job_id)


class ShortestJobFirst(OrderedQueuePolicy):
    name = "sjf"

    def order_key(self, job: Job):
        return (job.runtime_estimate, job.submit_time, job.job_id)


class SmallestJobFirst(OrderedQueuePolicy):
    name = "smjf"

    def order_key(self, job: Job):
        return (job.cpus, job.submit_time, job.job_id)


class EarliestDeadlineFirst(OrderedQueuePolicy):
    # jobs without a deadline fall back to submit time, so deadline-free
    # workloads reproduce FCFS exactly
    name = "edf"

    def order_key(self, job: Job):
        key = job.deadline if job.deadline is not None else job.submit_time
        return (key, job.submit_time, job.job_id)


class FirstFit(Policy):
    """Scan the queue in submit order and start everything that fits."""

    name = "first-fit"

    def select(self, view: SchedulerView) -> list[Job]:
        free = view.free_cpus
        starts: list[Job] = []
        for job in _submit_order(view.queue):
            if job.cpus <= free:
                starts.append(job)
                free -= job.cpus
        return starts


class ConservativeBackfill(Policy):
    """Every queued job holds a planned start; early starts never displace one.

    Plans are recomputed from scratch in submit order on every scheduling
    point; with estimates that do not understate runtimes, recomputation can
    only move planned starts earlier.  first_planned keeps each job's
    original promise for auditing.
    """

    name = "cons-bf"

    def __init__(self):
        self.first_planned: dict[int, float] = {}

    def select(self, view: SchedulerView) -> list[Job]:
        profile = CapacityProfile.from_view(view)
        starts: list[Job] = []
        for job in _submit_order(view.queue):
            t = profile.earliest_fit(job.cpus, job.runtime_estimate, view.now)
            if t is None:
                continue
            profile.reserve(t, job.runtime_estimate, job.cpus)
            self.first_planned.setdefault(job.job_id, t)
            if t == view.now:
                starts.append(job)
        return starts


class EasyBackfill(Policy):
    """Only the queue head holds a planned start; others may jump it harmlessly.

    shadow_log records (now, head id, head planned start) at every decision
    so the no-head-delay guarantee can be audited after a run.
    """

    name = "easy-bf"

    def __init__(self):
        self.shadow_log: list[tuple[float, int, Optional[float]]] = []

    def select(self, view: SchedulerView) -> list[Job]:
        profile = CapacityProfile.from_view(view)
        queue = _submit_order(view.queue)
        starts: list[Job] = []
        idx = 0
        while idx < len(queue):
            job = queue[idx]
            if not profile.fits(view.now, job.runtime_estimate, job.cpus):
                break
            profile.reserve(view.now, job.runtime_estimate, job.cpus)
            starts.append(job)
            idx += 1
        rest = queue[idx:]
        if not rest:
            return starts
        head = rest[0]
        shadow = profile.earliest_fit(head.cpus, head.runtime_estimate, view.now)
        self.shadow_log.append((view.now, head.job_id, shadow))
        if shadow is None:
            return starts
        profile.reserve(shadow, head.runtime_estimate, head.cpus)
        for job in rest[1:]:
            if profile.fits(view.now, job.runtime_estimate, job.cpus):
                profile.reserve(view.now, job.runtime_estimate, job.cpus)
                starts.append(job)
        return starts


class GapPolicy(Policy):
    """Schedule-based placement into profile gaps, recomputed every event.

    A gap is a maximal constant-capacity rectangle of the profile.  ESG
    takes the earliest gap wide and long enough; BestGap minimizes leftover
    (cpus slack, then duration slack), earliest among equals.
    """

    def __init__(self, best: bool):
        self.best = best
        self.last_placements: dict[int, float] = {}

    def select(self, view: SchedulerView) -> list[Job]:
        profile = CapacityProfile.from_view(view)
        starts: list[Job] = []
        self.last_placements = {}
        for job in _submit_order(view.queue):
            placed = self._place(profile, job, view.now)
            if placed is None:
                continue
            profile.reserve(placed, job.runtime_estimate, job.cpus)
            self.last_placements[job.job_id] = placed
            if placed == view.now:
                starts.append(job)
        return starts

    def _place(self, profile: CapacityProfile, job: Job, now: float) -> Optional[float]:
        best_key = None
        best_start = None
        for t0, t1, level in profile.segments():
            start = max(t0, now)
            if start >= t1 or level < job.cpus:
                continue
            length = t1 - start
            if length < job.runtime_estimate:
                continue
            if not self.best:
                return start
            key = (level - job.cpus, length - job.runtime_estimate, start)
            if best_key is None or key < best_key:
                best_key, best_start = key, start
        return best_start


class EarliestSuitableGap(GapPolicy):
    name = "esg"

    def __init__(self):
        super().__init__(best=False)


class BestGap(GapPolicy):
    name = "best-gap"

    def __init__(self):
        super().__init__(best=True)


class DlPredictive(ConservativeBackfill):
    """Conservative backfilling around the engine's forecast reservations.

    Hard reservation windows arrive through the view and act as immovable
    capacity blocks; soft reservations never appear in planning because the
    engine releases them whenever a real job needs the capacity.  With no
    reservations the behaviour is exactly conservative backfilling.
    """

    name = "dl"


_POLICY_FACTORIES = {
    PolicyKind.FCFS: Fcfs,
    PolicyKind.LCFS: Lcfs,
    PolicyKind.SHORTEST_JF: ShortestJobFirst,
    PolicyKind.SMALLEST_JF: SmallestJobFirst,
    PolicyKind.EDF: EarliestDeadlineFirst,
    PolicyKind.FIRST_FIT: FirstFit,
    PolicyKind.CONSERVATIVE_BF: ConservativeBackfill,
    PolicyKind.EASY_BF: EasyBackfill,
    PolicyKind.ESG: EarliestSuitableGap,
    PolicyKind.BEST_GAP: BestGap,
    PolicyKind.DL_PREDICTIVE: DlPredictive,
}

# PBS-Pro's commercial rule set is unavailable; the token is a documented
# stand-in that schedules FCFS order with first-fit skipping.
_ALIASES = {"pbs-pro": PolicyKind.FIRST_FIT}

POLICY_TOKENS = tuple(k.value for k in PolicyKind) + tuple(_ALIASES)


def make_policy(kind: PolicyKind | str) -> Policy:
    if isinstance(kind, str):
        token = kind.lower()
        if token in _ALIASES:
            policy = _POLICY_FACTORIES[_ALIASES[token]]()
            policy.name = token
            return policy
        kind = PolicyKind(token)
    return _POLICY_FACTORIES[kind]()
