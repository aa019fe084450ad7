"""Workload records, trace parsers, and time-series conversion.

A workload is an ordered stream of batch jobs (submit time plus resource
request).  Two on-disk formats are supported: the 18-field Standard Workload
Format used by the public parallel-workload archives, and a plain CSV with
named columns.  Parsed workloads are normalized so the earliest submission
is at t = 0, which makes makespans comparable across traces.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

CHANNELS = ("submitted_cpu_time", "submitted_job_count", "interarrival")


class ParseError(ValueError):
    """Malformed trace input."""


@dataclass(frozen=True)
class Job:
    job_id: int
    user_id: int
    group_id: int
    submit_time: float
    runtime: float
    runtime_estimate: float
    cpus: int
    deadline: Optional[float] = None

    def __post_init__(self):
        if self.runtime <= 0:
            raise ValueError(f"job {self.job_id}: runtime must be > 0")
        if self.runtime_estimate <= 0:
            raise ValueError(f"job {self.job_id}: runtime_estimate must be > 0")
        if self.cpus < 1:
            raise ValueError(f"job {self.job_id}: cpus must be >= 1")
        if self.submit_time < 0:
            raise ValueError(f"job {self.job_id}: submit_time must be >= 0")


@dataclass(frozen=True)
class Workload:
    """Jobs sorted by (submit_time, job_id) with unique ids."""

    jobs: tuple[Job, ...]
    source_name: str = ""
    dropped: int = 0  # records discarded during parsing (nonpositive runtime/cpus)

    def __post_init__(self):
        keys = [(j.submit_time, j.job_id) for j in self.jobs]
        if keys != sorted(keys):
            raise ValueError("jobs must be sorted by (submit_time, job_id)")
        ids = [j.job_id for j in self.jobs]
        if len(set(ids)) != len(ids):
            raise ParseError("duplicate id in workload")

    def __len__(self) -> int:
        return len(self.jobs)

    def __iter__(self):
        return iter(self.jobs)


@dataclass(frozen=True)
class ClusterConfig:
    total_cpus: int

    def __post_init__(self):
        if self.total_cpus < 1:
            raise ValueError("total_cpus must be >= 1")


@dataclass(frozen=True)
class TimeSeries:
    """Regularly binned values; bin i covers [start + i*bin_width, start + (i+1)*bin_width)."""

    start_time: float
    bin_width: float
    values: tuple[float, ...]

    def __post_init__(self):
        if self.bin_width <= 0:
            raise ValueError("bin_width must be > 0")
        if len(self.values) < 1:
            raise ValueError("series must have at least one value")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def _sorted_jobs(jobs: Iterable[Job]) -> tuple[Job, ...]:
    return tuple(sorted(jobs, key=lambda j: (j.submit_time, j.job_id)))


def _shift_to_zero(raw: list[dict]) -> None:
    if not raw:
        return
    t0 = min(r["submit_time"] for r in raw)
    for r in raw:
        r["submit_time"] -= t0
        if r.get("deadline") is not None:
            r["deadline"] -= t0


def _build_workload(raw: list[dict], source: str, dropped: int) -> Workload:
    if not raw:
        raise ParseError("empty workload")
    _shift_to_zero(raw)
    jobs = _sorted_jobs(Job(**r) for r in raw)
    return Workload(jobs=jobs, source_name=source, dropped=dropped)


# SWF data lines: 18 whitespace-separated fields.
# 1 job id, 2 submit, 3 wait, 4 runtime, 5 allocated procs, 6 cpu used,
# 7 mem used, 8 requested procs, 9 requested time, 10 requested mem,
# 11 status, 12 user id, 13 group id, 14 executable, 15 queue,
# 16 partition, 17 preceding job, 18 think time.
_SWF_FIELDS = 18


def parse_swf(text: str, source_name: str = "swf") -> Workload:
    """Parse Standard Workload Format text into a normalized Workload.

    Requested processors take precedence over allocated ones; the requested
    wall time becomes the runtime estimate when present, falling back to the
    actual runtime.  Records with nonpositive runtime or processor count are
    dropped (the count is kept on the result).
    """
    raw: list[dict] = []
    dropped = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(";"):
            continue
        fields = stripped.split()
        if len(fields) != _SWF_FIELDS:
            raise ParseError(
                f"line {lineno}: expected {_SWF_FIELDS} fields, got {len(fields)}"
            )
        try:
            vals = [float(f) for f in fields]
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric field") from None
        runtime = vals[3]
        alloc = int(vals[4])
        requested = int(vals[7])
        cpus = requested if requested > 0 else alloc
        if runtime <= 0 or cpus <= 0:
            dropped += 1
            continue
        req_time = vals[8]
        raw.append(
            dict(
                job_id=int(vals[0]),
                user_id=int(vals[11]),
                group_id=int(vals[12]),
                submit_time=vals[1],
                runtime=runtime,
                runtime_estimate=req_time if req_time > 0 else runtime,
                cpus=cpus,
                deadline=None,
            )
        )
    return _build_workload(raw, source_name, dropped)


_CSV_COLUMNS = (
    "job_id",
    "user_id",
    "group_id",
    "submit_time",
    "runtime",
    "runtime_estimate",
    "cpus",
)


def parse_csv(text: str, source_name: str = "csv") -> Workload:
    """Parse the package's CSV workload format (optional trailing deadline column)."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ParseError("empty workload")
    for col in _CSV_COLUMNS:
        if col not in reader.fieldnames:
            raise ParseError(f"missing column '{col}'")
    has_deadline = "deadline" in reader.fieldnames
    raw: list[dict] = []
    dropped = 0
    seen: set[int] = set()
    for lineno, row in enumerate(reader, start=2):
        try:
            job_id = int(row["job_id"])
            runtime = float(row["runtime"])
            cpus = int(row["cpus"])
            rec = dict(
                job_id=job_id,
                user_id=int(row["user_id"]),
                group_id=int(row["group_id"]),
                submit_time=float(row["submit_time"]),
                runtime=runtime,
                runtime_estimate=float(row["runtime_estimate"]),
                cpus=cpus,
                deadline=float(row["deadline"])
                if has_deadline and row.get("deadline") not in (None, "")
                else None,
            )
        except (TypeError, ValueError):
            raise ParseError(f"line {lineno}: non-numeric field") from None
        if job_id in seen:
            raise ParseError(f"line {lineno}: duplicate id {job_id}")
        seen.add(job_id)
        if runtime <= 0 or cpus <= 0:
            dropped += 1
            continue
        raw.append(rec)
    return _build_workload(raw, source_name, dropped)


def workload_to_csv(workload: Workload) -> str:
    """Serialize to the canonical CSV format (round-trips through parse_csv)."""
    any_deadline = any(j.deadline is not None for j in workload.jobs)
    out = io.StringIO()
    writer = csv.writer(out)
    header = list(_CSV_COLUMNS) + (["deadline"] if any_deadline else [])
    writer.writerow(header)
    for j in workload.jobs:
        row = [
            j.job_id,
            j.user_id,
            j.group_id,
            _fmt(j.submit_time),
            _fmt(j.runtime),
            _fmt(j.runtime_estimate),
            j.cpus,
        ]
        if any_deadline:
            row.append("" if j.deadline is None else _fmt(j.deadline))
        writer.writerow(row)
    return out.getvalue()


def _fmt(x: float) -> str:
    # integral seconds stay integral so serialized traces stay diffable
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def load_workload(path: str, fmt: Optional[str] = None) -> Workload:
    """Read a workload file, inferring the format from the extension unless given."""
    if fmt is None:
        fmt = "swf" if str(path).lower().endswith(".swf") else "csv"
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "swf":
        return parse_swf(text, source_name=str(path))
    if fmt == "csv":
        return parse_csv(text, source_name=str(path))
    raise ValueError(f"unknown workload format '{fmt}'")


def to_time_series(
    workload: Workload | Sequence[Job],
    channel: str = "interarrival",
    bin_width: float = 3600.0,
) -> TimeSeries:
    """Convert a job stream into one of three time-series channels.

    submitted_cpu_time   -- per bin, sum of cpus * runtime_estimate of jobs
                            submitted in the bin
    submitted_job_count  -- per bin, number of submissions
    interarrival         -- successive submit-time differences (bin_width
                            is ignored; one value per adjacent pair)
    """
    jobs = tuple(workload)
    if channel not in CHANNELS:
        raise ValueError(f"unknown channel '{channel}'; expected one of {CHANNELS}")
    if not jobs:
        raise ValueError("empty workload")
    submits = np.array([j.submit_time for j in jobs], dtype=float)
    start = float(submits[0])

    if channel == "interarrival":
        if len(jobs) < 2:
            raise ValueError("interarrival channel needs at least 2 jobs")
        gaps = np.diff(submits)
        return TimeSeries(start_time=start, bin_width=1.0, values=tuple(gaps))

    if bin_width <= 0:
        raise ValueError("bin_width must be > 0")
    idx = np.floor((submits - start) / bin_width).astype(int)
    nbins = int(idx.max()) + 1
    if channel == "submitted_job_count":
        vals = np.bincount(idx, minlength=nbins).astype(float)
    else:  # submitted_cpu_time
        weights = np.array([j.cpus * j.runtime_estimate for j in jobs], dtype=float)
        vals = np.bincount(idx, weights=weights, minlength=nbins)
    return TimeSeries(start_time=start, bin_width=float(bin_width), values=tuple(vals))
