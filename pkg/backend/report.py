import hashlib
import json
from pathlib import Path

import polars as pl
from loguru import logger
from pydantic import BaseModel, Field

from backend.config import ENGINE_VERSION, REPORT_SCHEMA_VERSION, CaseStatus, ReportFormat


class CaseRecord(BaseModel):
    case_id: str
    suite: str
    params: dict = Field(default_factory=dict)
    status: CaseStatus
    residual: str = "0"
    runtime_ms: float = 0.0
    details: dict = Field(default_factory=dict)
    message: str = ""

    def to_dict(self, runtime: bool = True) -> dict:
        record = self.model_dump(mode="json")
        if not runtime:
            record.pop("runtime_ms")
        return record


class Report(BaseModel):
    version: str = ENGINE_VERSION
    schema_version: int = REPORT_SCHEMA_VERSION
    config: dict = Field(default_factory=dict)
    cases: list[CaseRecord] = Field(default_factory=list)

    @property
    def summary(self) -> dict[str, int]:
        counts = {status.value: 0 for status in CaseStatus}
        if self.cases:
            frame = pl.DataFrame({"status": [case.status.value for case in self.cases]})
            for status, count in frame.group_by("status").len().iter_rows():
                counts[status] = count
        return counts

    @property
    def failed(self) -> bool:
        return any(case.status is CaseStatus.FAIL for case in self.cases)

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def merge(self, other: "Report") -> "Report":
        """Union of both case sets keyed by case id, the right operand winning on clashes."""
        cases = {case.case_id: case for case in self.cases}
        cases.update({case.case_id: case for case in other.cases})
        return Report(
            version=self.version,
            schema_version=self.schema_version,
            config={**self.config, **other.config},
            cases=sorted(cases.values(), key=lambda case: case.case_id),
        )

    def to_dict(self, runtime: bool = True) -> dict:
        return {
            "version": self.version,
            "schema": self.schema_version,
            "config": self.config,
            "cases": [case.to_dict(runtime) for case in sorted(self.cases, key=lambda c: c.case_id)],
            "summary": self.summary,
        }

    def to_json(self, runtime: bool = True) -> str:
        return json.dumps(self.to_dict(runtime), sort_keys=True, indent=2, default=str)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON without runtime fields."""
        canonical = json.dumps(self.to_dict(runtime=False), sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame(
            {
                "case_id": [case.case_id for case in self.cases],
                "status": [case.status.value for case in self.cases],
                "residual": [case.residual for case in self.cases],
                "runtime_ms": [round(case.runtime_ms, 1) for case in self.cases],
                "message": [case.message for case in self.cases],
            },
            schema={
                "case_id": pl.Utf8,
                "status": pl.Utf8,
                "residual": pl.Utf8,
                "runtime_ms": pl.Float64,
                "message": pl.Utf8,
            },
        ).sort("case_id")

    def to_text(self) -> str:
        with pl.Config(tbl_rows=-1, tbl_width_chars=160, fmt_str_lengths=60):
            table = str(self.to_frame())
        counts = ", ".join(f"{status}: {count}" for status, count in self.summary.items())
        return f"engine {self.version} (schema {self.schema_version})\n{table}\n{counts}\ndigest {self.digest()}\n"


def emit_report(report: Report, path: Path | str | None, fmt: ReportFormat = ReportFormat.JSON) -> str:
    """Serialize the report and write it to path; returns the serialized text."""
    text = report.to_json() if fmt is ReportFormat.JSON else report.to_text()
    if path is not None:
        path = Path(path)
        path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
        logger.info(f"Report with {len(report.cases)} cases written to {path}")
    return text
