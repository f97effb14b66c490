"""Pipeline configuration: a key = value text file plus CLI overrides.

Unknown keys are configuration errors; validation collects every problem
before failing so a bad config is reported exhaustively.
"""

from __future__ import annotations

import hashlib
import importlib.resources
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from .errors import ConfigError

EXCLUDED_LANGUAGES_DEFAULT = ("bn", "mi", "quz", "sw", "te")


def packaged_data(name: str) -> Path:
    return Path(importlib.resources.files("capsal") / "data" / name)


@dataclass
class PipelineConfig:
    wordnet_dir: Optional[Path] = None
    edit_script: Optional[Path] = None  # None -> packaged default
    captions: Optional[Path] = None
    tagged: Optional[Path] = None
    presence: Optional[Path] = None
    gold: Optional[Path] = None
    meta: Optional[Path] = None
    root_candidates: Optional[Path] = None  # None -> packaged default
    output_dir: Path = Path("capsal-out")
    distances: dict[str, Path] = field(default_factory=dict)
    root_min_count: int = 100
    explicit_min_count: int = 100
    excluded_languages: tuple[str, ...] = EXCLUDED_LANGUAGES_DEFAULT
    scorer: str = "fallback"
    seed: int = 20240601
    permutations: int = 9999
    jobs: int = 0  # 0 -> logical cores
    missing_presence: str = "error"
    alpha: float = 0.05
    exact_cutoff: int = 25
    weighting: str = "language"
    locale_pair: Optional[tuple[str, str]] = ("ja", "en")

    _PATH_KEYS = (
        "wordnet_dir",
        "edit_script",
        "captions",
        "tagged",
        "presence",
        "gold",
        "meta",
        "root_candidates",
        "output_dir",
    )
    _INT_KEYS = ("root_min_count", "explicit_min_count", "seed", "permutations",
                 "jobs", "exact_cutoff")

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        config = cls()
        base = Path(path).parent
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                config.set_option(key.strip(), value.strip(), base=base)
        return config

    def set_option(self, key: str, value: str, base: Path = Path(".")):
        if key.startswith("distance."):
            self.distances[key.split(".", 1)[1]] = _resolve(base, value)
            return
        if key in self._PATH_KEYS:
            setattr(self, key, _resolve(base, value))
            return
        if key in self._INT_KEYS:
            try:
                setattr(self, key, int(value))
            except ValueError:
                raise ConfigError(f"{key} must be an integer, got {value!r}") from None
            return
        if key == "alpha":
            try:
                self.alpha = float(value)
            except ValueError:
                raise ConfigError(f"alpha must be a number, got {value!r}") from None
            return
        if key == "excluded_languages":
            self.excluded_languages = tuple(
                v.strip() for v in value.split(",") if v.strip()
            )
            return
        if key == "locale_pair":
            parts = tuple(v.strip() for v in value.split(",") if v.strip())
            if len(parts) != 2:
                raise ConfigError("locale_pair needs two comma-separated codes")
            self.locale_pair = parts
            return
        if key in ("scorer", "missing_presence", "weighting"):
            setattr(self, key, value)
            return
        raise ConfigError(f"unknown configuration key {key!r}")

    # ------------------------------------------------------------------

    def effective_edit_script(self) -> Path:
        return self.edit_script or packaged_data("ontology_edits.txt")

    def effective_root_candidates(self) -> Path:
        return self.root_candidates or packaged_data("root_synsets.txt")

    def effective_jobs(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)

    def validate(self, required_paths: tuple[str, ...] = ()) -> None:
        """Collect every configuration problem; raise once with all of them."""
        problems = []
        for name in required_paths:
            value = getattr(self, name, None)
            if value is None:
                problems.append(f"{name} is not configured")
            elif not Path(value).exists():
                problems.append(f"{name}: path does not exist: {value}")
        for name, value in self.distances.items():
            if not Path(value).exists():
                problems.append(f"distance.{name}: path does not exist: {value}")
        if self.seed <= 0:
            problems.append(f"seed must be positive, got {self.seed}")
        if self.permutations <= 0:
            problems.append(f"permutations must be positive, got {self.permutations}")
        if self.root_min_count < 1 or self.explicit_min_count < 1:
            problems.append("thresholds must be at least 1")
        if self.missing_presence not in ("error", "keep", "drop"):
            problems.append(f"missing_presence must be error/keep/drop, got {self.missing_presence!r}")
        if self.weighting not in ("language", "cell"):
            problems.append(f"weighting must be language/cell, got {self.weighting!r}")
        if not 0.0 < self.alpha < 1.0:
            problems.append(f"alpha must lie in (0, 1), got {self.alpha}")
        if problems:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(problems))

    def canonical_text(self) -> str:
        """Stable serialization used for the config hash.

        output_dir is excluded: it changes where artifacts land, never
        what they contain.
        """
        lines = []
        for f in fields(self):
            if f.name.startswith("_") or f.name == "output_dir":
                continue
            value = getattr(self, f.name)
            if f.name == "distances":
                for name in sorted(value):
                    lines.append(f"distance.{name} = {value[name]}")
                continue
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()


def _resolve(base: Path, value: str) -> Path:
    path = Path(value)
    return path if path.is_absolute() else (base / path)
