"""Benchmark report types and the published reference cost table."""
from __future__ import annotations

import json
import platform
from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class CryptoCosts:
    """Nanoseconds per operation, single core.  All derived quantities
    (optimal tree size, scheme crossovers) must be recomputed from one
    CryptoCosts instance: mixing machines voids the comparison."""

    naive_sign: float
    naive_verify: float
    naive_verify_batch64: float
    merkle_sign_amortized: float
    merkle_verify_uncached: float
    merkle_verify_cached: float
    bls_sign: float
    bls_verify: float

    def validate(self) -> "CryptoCosts":
        for name, value in asdict(self).items():
            if not value or value <= 0:
                raise ValueError(f"incomplete cost set: {name} = {value}")
        return self

    def merkle_verify_mean(self, batch: int = 64) -> float:
        """Average verification cost when one root serves `batch` outputs:
        one uncached check plus batch-1 cached ones."""
        return (
            self.merkle_verify_uncached + (batch - 1) * self.merkle_verify_cached
        ) / batch


# Single-core reference costs (ns) from the original evaluation of this
# protocol family on a c3.8xlarge-class machine; used to sanity-check the
# crossover arithmetic against its published conclusions.
REFERENCE_COSTS = CryptoCosts(
    naive_sign=29_967,
    naive_verify=100_663,
    naive_verify_batch64=51_247,
    merkle_sign_amortized=2_709,
    merkle_verify_uncached=106_771,
    merkle_verify_cached=6_473,
    bls_sign=640_205,
    bls_verify=1_918_578,
)


def machine_descriptor() -> dict:
    import os

    return {
        "platform": platform.platform(),
        "python": platform.python_version(),
        "cpu_count": os.cpu_count(),
        "machine": platform.machine(),
    }


@dataclass
class BenchReport:
    machine: dict = field(default_factory=machine_descriptor)
    crypto: dict | None = None  # CryptoCosts as dict + repetition counts
    derived: dict = field(default_factory=dict)
    sweeps: dict = field(default_factory=dict)
    throughput: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    headers = list(rows[0])
    lines = [",".join(headers)]
    for row in rows:
        lines.append(",".join(str(row.get(h, "")) for h in headers))
    return "\n".join(lines) + "\n"
