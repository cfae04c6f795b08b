from dataclasses import dataclass, field
import hashlib
import json
from typing import Optional

from ..enums import CheckStatus, Verdict
from .Scenario import jsonable


@dataclass
class CheckRecord:
    '''
    One executed (or skipped) check.
    - **name**: str, check identifier
    - **status**: CheckStatus, PASS / FAIL / SKIPPED / ERROR
    - **measured**: measured value (gap, estimate, residual), None when skipped
    - **tolerance**: threshold the measured value was compared against
    - **resolution**: numeric settings the measurement depends on
    - **runtime**: wall-clock seconds, excluded from the payload hash
    - **details**: sub-results and diagnostics
    '''
    name: str
    status: CheckStatus
    measured: Optional[float]
    tolerance: Optional[float]
    resolution: dict = field(default_factory=dict)
    runtime: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS

    @property
    def failed(self) -> bool:
        return self.status in (CheckStatus.FAIL, CheckStatus.ERROR)

    def to_dict(self, with_runtime: bool = True) -> dict:
        payload = {
            "name": self.name,
            "status": self.status.value,
            "measured": jsonable(self.measured),
            "tolerance": jsonable(self.tolerance),
            "resolution": jsonable(self.resolution),
            "details": jsonable(self.details),
        }
        if with_runtime:
            payload["runtime"] = self.runtime
        return payload


@dataclass
class VerificationReport:
    """
    Append-only list of check records plus provenance.

    Attributes:
        records:
            Checks in execution order; `add` is the only mutator.
        provenance:
            spec hash, seed and version; everything needed to reproduce the run.
        verdict:
            Equivalence verdict of a scenario run, None for stand-alone reports.
        created_at:
            ISO timestamp, excluded from the payload hash.
    """
    records: list[CheckRecord] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    verdict: Optional[Verdict] = None
    created_at: Optional[str] = None

    def add(self, record: CheckRecord) -> CheckRecord:
        self.records.append(record)
        return record

    def get(self, name: str) -> Optional[CheckRecord]:
        return next((r for r in self.records if r.name == name), None)

    @property
    def all_passed(self) -> bool:
        return not any(r.failed for r in self.records)

    def payload(self) -> dict:
        """Deterministic content: no timestamps, no runtimes."""
        return {
            "provenance": jsonable(self.provenance),
            "verdict": self.verdict.value if self.verdict else None,
            "records": [r.to_dict(with_runtime=False) for r in self.records],
        }

    def payload_hash(self) -> str:
        canonical = json.dumps(self.payload(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict:
        return {
            "created_at": self.created_at,
            "payload_hash": self.payload_hash(),
            "provenance": jsonable(self.provenance),
            "verdict": self.verdict.value if self.verdict else None,
            "records": [r.to_dict() for r in self.records],
        }
