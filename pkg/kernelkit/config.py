"""
Toolkit configuration using pydantic-settings.

Enumeration budgets, sweep limits and server options are loaded from
environment variables (or a local .env file).
"""
import logging
import sys
from contextlib import contextmanager
from contextvars import ContextVar
from pathlib import Path
from typing import Iterator, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

PACKAGE_ROOT = Path(__file__).resolve().parent.parent

BUDGET_FIELDS = (
    "cycle_budget",
    "clique_budget",
    "subset_budget",
    "matching_budget",
    "vertex_budget",
    "fm_row_budget",
    "tdi_node_budget",
)

# Per-call cap on every budget, set by budget_cap() around one command run
_budget_cap: ContextVar[Optional[int]] = ContextVar("kernelkit_budget_cap", default=None)


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # Runtime settings
    app_env: str = Field(default="production", description="Runtime environment")
    debug: bool = Field(default=False, description="Debug mode")
    log_level: str = Field(default="WARNING", description="Log level for stderr diagnostics")
    host: str = Field(default="0.0.0.0", description="HTTP server bind address")
    port: int = Field(default=5000, description="HTTP server port")

    # Enumeration budgets
    cycle_budget: int = Field(default=10**6, description="Max directed / cyclic-preference cycles enumerated")
    clique_budget: int = Field(default=10**6, description="Max cliques enumerated")
    subset_budget: int = Field(default=2**20, description="Max vertex subsets examined by kernel oracles")
    matching_budget: int = Field(default=10**6, description="Max matchings examined by the stable matching oracle")
    vertex_budget: int = Field(default=10**6, description="Max rays / bases handled by vertex enumeration")
    fm_row_budget: int = Field(default=10**5, description="Max rows produced by one Fourier-Motzkin step")
    tdi_node_budget: int = Field(default=10**6, description="Max search nodes per objective in the dual-face search")

    # Sweep settings
    raw_orientation_edge_limit: int = Field(default=10, description="Sweep raw orientations when |E(L(H))| is at most this")
    tdi_c_bound: int = Field(default=2, description="Default objective box for bounded TDI checks")
    tdi_ceiling: int = Field(default=3, description="Largest box tried when hunting a TDI refutation")
    max_workers: int = Field(default=4, description="Max concurrent workers for candidate searches")

    # Data locations
    fixtures_dir: Path = Field(default=PACKAGE_ROOT / "fixtures", description="Directory of shipped instances")
    gadget_table_path: Optional[Path] = Field(default=None, description="Internal gadget order table (defaults to fixtures)")

    @field_validator("app_env")
    @classmethod
    def validate_app_env(cls, v: str) -> str:
        """Validate runtime environment."""
        if v not in ["development", "production", "testing"]:
            raise ValueError("app_env must be development, production, or testing")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level name."""
        level = v.upper()
        if level not in ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]:
            raise ValueError(f"Unknown log level: {v}")
        return level

    @field_validator(*BUDGET_FIELDS, "raw_orientation_edge_limit", "tdi_c_bound", "tdi_ceiling", "max_workers")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        """Budgets and bounds must be positive."""
        if v < 1:
            raise ValueError("value must be a positive integer")
        return v

    @property
    def is_development(self) -> bool:
        """Check if running in development mode."""
        return self.app_env == "development"

    @property
    def is_production(self) -> bool:
        """Check if running in production mode."""
        return self.app_env == "production"

    @property
    def default_gadget_table(self) -> Path:
        """Path of the shipped internal gadget order table."""
        return self.gadget_table_path or self.fixtures_dir / "gadget_table.pref"

    def limit(self, name: str, explicit: Optional[int] = None) -> int:
        """
        Effective budget for one enumeration.

        An explicit argument wins. Otherwise the configured value is used,
        lowered to the cap of the enclosing budget_cap() block if any.

        Args:
            name: One of BUDGET_FIELDS
            explicit: Budget passed by the caller (0 allows nothing)

        Raises:
            ValueError: If explicit is negative
        """
        if explicit is not None:
            if explicit < 0:
                raise ValueError("budget must be a non-negative integer")
            return explicit
        value = getattr(self, name)
        cap = _budget_cap.get()
        return value if cap is None else min(value, cap)


@contextmanager
def budget_cap(budget: Optional[int]) -> Iterator[None]:
    """
    Cap every enumeration budget at `budget` inside the block.

    The cap is held in a context variable and never written to `settings`,
    so overlapping requests keep their own caps. None leaves budgets alone.

    Raises:
        ValueError: If budget is negative
    """
    if budget is None:
        yield
        return
    if budget < 0:
        raise ValueError("budget must be a non-negative integer")
    token = _budget_cap.set(budget)
    try:
        yield
    finally:
        _budget_cap.reset(token)


def current_budget_cap() -> Optional[int]:
    """Cap of the innermost budget_cap() block, or None."""
    return _budget_cap.get()


def configure_logging(level: Optional[str] = None) -> None:
    """
    Send toolkit diagnostics to stderr.

    stdout stays reserved for command output.

    Args:
        level: Log level name; defaults to settings.log_level
    """
    root = logging.getLogger("kernelkit")
    root.setLevel(level or settings.log_level)
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)


# Global settings instance
settings = Settings()
