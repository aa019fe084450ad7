from __future__ import annotations

import itertools

import pytest

from predictsched import ClusterConfig, Job, SimTrace, Workload


def make_job(
    job_id: int,
    submit: float,
    runtime: float,
    cpus: int,
    user: int = 1,
    estimate: float | None = None,
    deadline: float | None = None,
) -> Job:
    return Job(
        job_id=job_id,
        user_id=user,
        group_id=1,
        submit_time=submit,
        runtime=runtime,
        runtime_estimate=estimate if estimate is not None else runtime,
        cpus=cpus,
        deadline=deadline,
    )


def make_workload(*jobs: Job) -> Workload:
    ordered = tuple(sorted(jobs, key=lambda j: (j.submit_time, j.job_id)))
    return Workload(jobs=ordered)


def capacity_breaches(trace: SimTrace) -> list[float]:
    """Replay a trace and return instants where running cpus exceed the cluster.

    Independent of the engine: works purely from the per-job records.
    """
    total = trace.cluster.total_cpus
    deltas: dict[float, int] = {}
    for r in trace.records:
        deltas[r.start] = deltas.get(r.start, 0) + r.cpus
        deltas[r.finish] = deltas.get(r.finish, 0) - r.cpus
    busy = 0
    breaches = []
    for t in sorted(deltas):
        busy += deltas[t]
        if busy > total:
            breaches.append(t)
    return breaches


def enumerate_instances(max_jobs: int = 5):
    """Every small workload used by the backfilling correctness gate.

    Jobs draw cpus from {1, 2} and runtimes from {1, 2, 3} (estimates exact).
    Up to 3 jobs the submit times range over {0, 1, 2} exhaustively; for 4
    and 5 jobs the submits are the staggered prefix of (0, 1, 2, 3, 4) so the
    instance count stays tractable.
    """
    params = list(itertools.product((1, 2), (1, 2, 3)))  # (cpus, runtime)
    for n in range(1, min(max_jobs, 3) + 1):
        for submits in itertools.product((0, 1, 2), repeat=n):
            for combo in itertools.product(params, repeat=n):
                yield make_workload(
                    *(
                        make_job(i + 1, submits[i], combo[i][1], combo[i][0])
                        for i in range(n)
                    )
                )
    for n in range(4, max_jobs + 1):
        submits = tuple(range(n))
        for combo in itertools.product(params, repeat=n):
            yield make_workload(
                *(
                    make_job(i + 1, submits[i], combo[i][1], combo[i][0])
                    for i in range(n)
                )
            )


@pytest.fixture
def two_job_one_cpu() -> tuple[Workload, ClusterConfig]:
    wl = make_workload(
        make_job(1, 0, 10, 1),
        make_job(2, 0, 5, 1),
    )
    return wl, ClusterConfig(total_cpus=1)


@pytest.fixture
def easy_fixture() -> tuple[Workload, ClusterConfig]:
    wl = make_workload(
        make_job(1, 0, 10, 2),  # A
        make_job(2, 0, 5, 4),   # B
        make_job(3, 0, 10, 2),  # C
    )
    return wl, ClusterConfig(total_cpus=4)
