"""Run configuration for the self-similarity toolkit"""

import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Optional

from dotenv import load_dotenv

OUTPUT_FORMATS = ('json', 'text', 'dot')


@dataclass(frozen=True)
class RunConfig:
    """Limits and output settings shared by the library entry points and the CLI"""
    # Group materialisation
    closure_cap: int = 250_000
    table_limit: int = 4096  # largest order with a full product table

    # Search budgets
    hom_budget: int = 50_000
    large_group_hom_budget: int = 2000
    full_search_order: int = 81  # exhaustive search up to this order
    skip_search_on_obstruction: bool = True

    # Tree representation
    depth_cap: int = 8

    # Sampled property checks
    property_samples: int = 200

    # Output
    output_format: str = 'json'
    deterministic: bool = True

    # Logging
    log_level: str = 'INFO'
    log_file: Optional[str] = None

    def __post_init__(self):
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output_format must be one of {OUTPUT_FORMATS}")
        for name in ('closure_cap', 'table_limit', 'hom_budget', 'large_group_hom_budget',
                     'full_search_order', 'depth_cap', 'property_samples'):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not self.deterministic:
            raise ValueError("runs are always deterministic")

    def budget_for(self, order: int) -> int:
        """Hom budget for a group of the given order."""
        return self.hom_budget if order <= self.full_search_order else self.large_group_hom_budget

    def with_overrides(self, **overrides: Any) -> 'RunConfig':
        """Copy with the non-None overrides applied."""
        known = {f.name for f in fields(self)}
        changes = {k: v for k, v in overrides.items() if v is not None and k in known}
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_env(cls) -> 'RunConfig':
        """Load configuration from environment variables (and a .env file if present)"""
        load_dotenv()
        base = cls()
        return base.with_overrides(
            closure_cap=_env_int('SELFSIM_CLOSURE_CAP'),
            table_limit=_env_int('SELFSIM_TABLE_LIMIT'),
            hom_budget=_env_int('SELFSIM_HOM_BUDGET'),
            depth_cap=_env_int('SELFSIM_DEPTH_CAP'),
            log_level=os.getenv('SELFSIM_LOG_LEVEL'),
            log_file=os.getenv('SELFSIM_LOG_FILE'),
        )


def _env_int(name: str) -> Optional[int]:
    value = os.getenv(name)
    if value is None or value.strip() == '':
        return None
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {value!r}")
