from enum import Enum

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

ENGINE_VERSION = "1.0.0"
REPORT_SCHEMA_VERSION = 1


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    jobs: int = Field(default=4, alias="VERIFY_JOBS")
    term_budget: int = Field(default=1_000_000, alias="VERIFY_TERM_BUDGET")
    tolerance: float = Field(default=0.05, alias="VERIFY_TOLERANCE")
    resolution: int = Field(default=64, alias="VERIFY_RESOLUTION")
    seed: int = Field(default=0, alias="VERIFY_SEED")
    log_level: str = Field(default="INFO", alias="VERIFY_LOG_LEVEL")


class SpaceKind(Enum):
    """Enum for polynomial target spaces."""

    HARMONIC_SCALAR = "harmonic_scalar"
    MONOGENIC_CLIFFORD = "monogenic_clifford"


class CaseStatus(Enum):
    """Enum for verification case outcomes."""

    PASS = "pass"
    FAIL = "fail"
    SKIPPED_BUDGET = "skipped-budget"
    SKIPPED_POLE = "skipped-pole"


class ReportFormat(Enum):
    """Enum for report output formats."""

    JSON = "json"
    TEXT = "text"


class VectorSource(Enum):
    """Enum for test-vector sources of identity cases."""

    HIGHEST_WEIGHT = "highest_weight"
    BASIS_ELEMENT = "basis_element"
    RANDOM_COMBINATION = "random_combination"


class BForm(Enum):
    """Enum for the expansion routes of the B operators."""

    COEFFICIENT = "coefficient"
    RK_DELTA = "rk_delta"
    TWISTOR = "twistor"


class Conjugation(Enum):
    """Enum for conjugation conventions in the Fischer pairing."""

    NONE = "none"
    REVERSION = "reversion"
    CLIFFORD = "clifford"


class Generator(Enum):
    """Enum for Mobius generator types."""

    TRANSLATION = "translation"
    DILATION = "dilation"
    ROTATION = "rotation"
    INVERSION = "inversion"
    COMPOSITE = "composite"


class KernelFamily(Enum):
    """Enum for fundamental-solution kernel families."""

    BOSONIC = "bosonic"
    FERMIONIC = "fermionic"
    GENERALIZED = "generalized"
