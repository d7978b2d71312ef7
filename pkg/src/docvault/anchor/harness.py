"""Load harness for the anchor ledger: concurrent submits, inclusion latency.

Emits one CSV row per request (``request_id,submit_ms,include_ms``) plus a
latency/throughput summary.  No latency threshold is asserted anywhere; the
numbers are hardware-bound context, not a contract.
"""

from __future__ import annotations

import csv
import hashlib
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ..errors import InvalidInput
from .entries import KIND_DOCUMENT, new_entry
from .ledger import Ledger


@dataclass(frozen=True)
class HarnessReport:
    n_requests: int
    parallelism: int
    duration_seconds: float
    throughput_per_second: float
    p50_ms: float
    p90_ms: float
    p99_ms: float
    inclusions: int
    duplicates: int

    def to_dict(self) -> dict:
        return dict(vars(self))


def _percentile(sorted_values: list[float], q: float) -> float:
    if not sorted_values:
        return 0.0
    pos = min(len(sorted_values) - 1, max(0, round(q * (len(sorted_values) - 1))))
    return sorted_values[pos]


def run_load(
    ledger: Ledger,
    n_requests: int,
    parallelism: int,
    csv_path: str | Path | None = None,
    seal_interval: float = 0.005,
) -> HarnessReport:
    """Drive ``n_requests`` submits at the given parallelism with a sealer
    thread running alongside, then report exactly-once inclusion and latency."""
    if n_requests < 1:
        raise InvalidInput("n_requests must be >= 1")
    if parallelism < 1:
        raise InvalidInput("parallelism must be >= 1")

    rows: list[tuple[int, float, float]] = []
    rows_lock = threading.Lock()
    stop = threading.Event()
    started = time.perf_counter()

    def sealer():
        while not stop.is_set():
            ledger.seal_pending()
            time.sleep(seal_interval)
        ledger.seal_all()

    sealer_thread = threading.Thread(target=sealer, daemon=True)
    sealer_thread.start()

    def one_request(request_id: int):
        content = hashlib.sha256(f"load-{request_id}".encode()).hexdigest()
        t0 = time.perf_counter()
        entry = new_entry(KIND_DOCUMENT, content, f"load-{request_id}", ledger.clock.now())
        ledger.submit(entry)
        submit_ms = (time.perf_counter() - t0) * 1000
        while ledger.find(content) is None:
            time.sleep(0.0005)
        include_ms = (time.perf_counter() - t0) * 1000
        with rows_lock:
            rows.append((request_id, submit_ms, include_ms))

    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        list(pool.map(one_request, range(n_requests)))
    stop.set()
    sealer_thread.join()
    duration = time.perf_counter() - started

    # exactly-once accounting over the sealed chain
    seen: dict[str, int] = {}
    for block in ledger.blocks:
        for entry in block.entries:
            if entry.submitter.startswith("load-"):
                seen[entry.content_hash] = seen.get(entry.content_hash, 0) + 1
    inclusions = len(seen)
    duplicates = sum(c - 1 for c in seen.values())

    if csv_path is not None:
        with Path(csv_path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["request_id", "submit_ms", "include_ms"])
            for row in sorted(rows):
                writer.writerow([row[0], f"{row[1]:.3f}", f"{row[2]:.3f}"])

    latencies = sorted(r[2] for r in rows)
    return HarnessReport(
        n_requests=n_requests,
        parallelism=parallelism,
        duration_seconds=duration,
        throughput_per_second=n_requests / duration if duration > 0 else 0.0,
        p50_ms=_percentile(latencies, 0.50),
        p90_ms=_percentile(latencies, 0.90),
        p99_ms=_percentile(latencies, 0.99),
        inclusions=inclusions,
        duplicates=duplicates,
    )
