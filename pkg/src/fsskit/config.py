"""Run configuration: observation window, scope, thresholds, runtime knobs.

Configuration comes from an optional JSON file plus command-line overrides.
The config hash covers only fields that can change results; runtime-only
knobs (worker count, output directory) are excluded so the same analysis
always reports the same hash.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .credit import CONVENTIONS, WeightingScheme
from .errors import InputError

SCOPES = ("sds", "department", "university", "country")
BASELINE_SOURCES = ("computed", "file")

# Fields that do not affect computed values, only how/where the run executes.
RUNTIME_ONLY_FIELDS = ("workers", "output_dir")


@dataclass(frozen=True)
class ExclusionThresholds:
    """Robustness floors applied before rankings are formed."""

    min_years: float = 3.0
    min_staff_uda: int = 10
    min_staff_total: int = 30

    def validate(self):
        if self.min_years < 0:
            raise InputError("min_years must be >= 0")
        if self.min_staff_uda < 0 or self.min_staff_total < 0:
            raise InputError("staff thresholds must be >= 0")


@dataclass(frozen=True)
class RunConfig:
    window: tuple[int, int] = (2006, 2010)
    citation_cutoff: str = "2011-12-31"
    baseline_source: str = "computed"
    baseline_file: str | None = None
    scope: str = "university"
    exclusions: ExclusionThresholds = field(default_factory=ExclusionThresholds)
    seed: int = 0
    output_dir: str = "out"
    workers: int = 1

    def validate(self):
        start, end = self.window
        if start > end:
            raise InputError(f"window start {start} is after end {end}")
        if self.baseline_source not in BASELINE_SOURCES:
            raise InputError(f"baseline_source must be one of {'/'.join(BASELINE_SOURCES)}")
        if self.baseline_source == "file" and not self.baseline_file:
            raise InputError("baseline_source 'file' requires baseline_file")
        if self.scope not in SCOPES:
            raise InputError(f"scope must be one of {'/'.join(SCOPES)}")
        if self.workers < 1:
            raise InputError("workers must be >= 1")
        self.exclusions.validate()

    def canonical_dict(self) -> dict:
        """Result-affecting fields only, with deterministic key order."""
        return {
            "window": list(self.window),
            "citation_cutoff": self.citation_cutoff,
            "baseline_source": self.baseline_source,
            "baseline_file": self.baseline_file,
            "scope": self.scope,
            "exclusions": {
                "min_years": self.exclusions.min_years,
                "min_staff_uda": self.exclusions.min_staff_uda,
                "min_staff_total": self.exclusions.min_staff_total,
            },
            "seed": self.seed,
        }

    def config_hash(self) -> str:
        payload = json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


_TOP_LEVEL_KEYS = {
    "window", "citation_cutoff", "baseline_source", "baseline_file",
    "scope", "seed", "output_dir", "workers", "exclusions",
}
_EXCLUSION_KEYS = {"min_years", "min_staff_uda", "min_staff_total"}


def load_config(path=None, overrides: dict | None = None) -> tuple[RunConfig, list[str]]:
    """Build a RunConfig from a JSON file and explicit overrides.

    Overrides (CLI flags) win over the file; the file wins over defaults.
    Returns the config plus the names of fields left at their defaults, so
    callers can surface silently-defaulted values.
    """
    data: dict = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise InputError(f"config file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise InputError(f"config file {path} must contain a JSON object")
        unknown = set(data) - _TOP_LEVEL_KEYS
        if unknown:
            raise InputError(f"unknown config key(s): {', '.join(sorted(unknown))}")

    merged = dict(data)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in _EXCLUSION_KEYS:
            merged.setdefault("exclusions", {})
            if not isinstance(merged["exclusions"], dict):
                raise InputError("config key 'exclusions' must be an object")
            merged["exclusions"] = dict(merged["exclusions"], **{key: value})
        elif key in _TOP_LEVEL_KEYS:
            merged[key] = value
        else:
            raise InputError(f"unknown config override: {key}")

    exclusion_data = merged.pop("exclusions", {})
    if not isinstance(exclusion_data, dict):
        raise InputError("config key 'exclusions' must be an object")
    unknown = set(exclusion_data) - _EXCLUSION_KEYS
    if unknown:
        raise InputError(f"unknown exclusions key(s): {', '.join(sorted(unknown))}")
    exclusions = ExclusionThresholds(**exclusion_data)

    if "window" in merged:
        window = merged["window"]
        if not (isinstance(window, (list, tuple)) and len(window) == 2
                and all(isinstance(v, int) for v in window)):
            raise InputError("config key 'window' must be a pair of years")
        merged["window"] = (window[0], window[1])

    config = RunConfig(exclusions=exclusions, **merged)
    config.validate()

    defaulted = [
        f.name for f in fields(RunConfig)
        if f.name != "exclusions" and f.name not in merged
    ]
    if not exclusion_data:
        defaulted.append("exclusions")
    return config, sorted(defaulted)


def build_schemes(taxonomy) -> dict[str, WeightingScheme]:
    """One co-authorship weighting scheme per field, keyed by field code."""
    schemes = {}
    for sds in taxonomy.sds_codes():
        convention = taxonomy.convention(sds)
        if convention not in CONVENTIONS:
            raise InputError(f"field {sds!r} has unknown convention {convention!r}")
        schemes[sds] = WeightingScheme(kind=convention)
    return schemes
