"""Configuration helpers for the manifold MLS runner."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

from dotenv import dotenv_values

from .approximator import ApproxConfig
from .datasets.noise import NoiseModel
from .errors import ConfigurationError
from .frame import FrameSearchConfig, InitMode
from .kernel import WeightFamily, WeightSpec
from .utils import format_float

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"
DATASETS = ("helix", "sphere", "klein", "circle")


@dataclass(slots=True)
class RuntimeConfig:
    """Process-level options read from the environment."""

    output_dir: Path = field(default_factory=lambda: Path("outputs"))
    seed: int = 0
    max_concurrency: int = 4
    progress: bool = True
    log_level: str = "INFO"

    def model_dump(self) -> Dict[str, object]:
        return {
            "output_dir": str(self.output_dir),
            "seed": self.seed,
            "max_concurrency": self.max_concurrency,
            "progress": self.progress,
            "log_level": self.log_level,
        }


def load_from_env() -> RuntimeConfig:
    """Load configuration from environment variables."""

    import os

    try:
        config = RuntimeConfig(
            output_dir=Path(os.getenv("MMLS_OUTPUT_DIR", "outputs")),
            seed=int(os.getenv("MMLS_SEED", "0")),
            max_concurrency=int(os.getenv("MMLS_MAX_CONCURRENCY", "4")),
            progress=_parse_bool(os.getenv("MMLS_PROGRESS", "true")),
            log_level=os.getenv("MMLS_LOG_LEVEL", "INFO").upper(),
        )
    except ValueError as exc:
        raise ConfigurationError(f"invalid MMLS_* environment variable: {exc}") from exc
    config.output_dir.mkdir(parents=True, exist_ok=True)
    return config


def configure_logging(level: str = "INFO") -> None:
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.INFO), format=LOG_FORMAT)


# ----------------------------------------------------------------------
# Value codecs for the flat key=value run configuration.

def _parse_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in {"1", "true", "yes", "on"}:
        return True
    if text in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _parse_optional_bool(value: Any) -> Optional[bool]:
    if value is None or str(value).strip().lower() == "auto":
        return None
    return _parse_bool(value)


def _parse_auto(value: Any) -> Optional[float]:
    if value is None or str(value).strip().lower() == "auto":
        return None
    return float(value)


def _parse_int_tuple(value: Any) -> Tuple[int, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    if isinstance(value, int):
        return (value,)
    return tuple(int(part) for part in str(value).split(",") if part.strip())


def _parse_float_tuple(value: Any) -> Tuple[float, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    if isinstance(value, (int, float)):
        return (float(value),)
    return tuple(float(part) for part in str(value).split(",") if part.strip())


def _parse_choice(choices: Tuple[str, ...]) -> Callable[[Any], str]:
    def parse(value: Any) -> str:
        text = str(value).strip().lower()
        if text not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}")
        return text

    return parse


def _format_value(value: Any) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    return str(value)


_PARSERS: Dict[str, Callable[[Any], Any]] = {
    "d": int,
    "m": _parse_int_tuple,
    "weight": _parse_choice(tuple(f.value for f in WeightFamily)),
    "k": _parse_auto,
    "h": _parse_auto,
    "eps_reg": _parse_auto,
    "interpolatory": _parse_bool,
    "support_factor": float,
    "init_mode": _parse_choice(tuple(mode.value for mode in InitMode)),
    "tol_q": float,
    "max_iter": int,
    "mu": float,
    "rcond": float,
    "seed": int,
    "resolutions": _parse_int_tuple,
    "n_queries": int,
    "trials": int,
    "n_points": _parse_int_tuple,
    "n_test": int,
    "snrdb": _parse_float_tuple,
    "sigma_r": _parse_float_tuple,
    "n_list": _parse_int_tuple,
    "dataset": _parse_choice(DATASETS),
    "sigma_domain": float,
    "sigma_target": float,
    "embed_dim": int,
    "query_noise_scale": float,
    "arc": float,
    "periodic": _parse_optional_bool,
}


@dataclass(slots=True)
class RunConfig:
    """Flat, serializable parameter set of one command-line run.

    ``m``, ``n_points``, ``snrdb`` and ``sigma_r`` accept comma separated
    lists; commands that sweep a grid use every entry, the others require a
    single value.
    """

    d: int = 2
    m: Tuple[int, ...] = (1,)
    weight: str = WeightFamily.TRUNCATED_EXP.value
    k: Optional[float] = None
    h: Optional[float] = None
    eps_reg: Optional[float] = None
    interpolatory: bool = False
    support_factor: float = 3.0
    init_mode: str = InitMode.RANDOM.value
    tol_q: float = 1e-10
    max_iter: int = 100
    mu: float = math.inf
    rcond: float = 1e-10
    seed: int = 0
    resolutions: Tuple[int, ...] = (20, 30, 40, 50)
    n_queries: int = 200
    trials: int = 20
    n_points: Tuple[int, ...] = (1500,)
    n_test: int = 500
    snrdb: Tuple[float, ...] = (5.0,)
    sigma_r: Tuple[float, ...] = (0.0,)
    n_list: Tuple[int, ...] = (10000, 20000)
    dataset: str = "helix"
    sigma_domain: float = 0.0
    sigma_target: float = 0.0
    embed_dim: int = 0
    query_noise_scale: float = 0.05
    arc: float = 1.5 * math.pi
    periodic: Optional[bool] = None

    @classmethod
    def from_mapping(cls, values: Dict[str, Any]) -> "RunConfig":
        return cls().with_overrides(**values)

    @classmethod
    def from_file(cls, path: Path, base: Optional["RunConfig"] = None) -> "RunConfig":
        """Parse a flat ``key=value`` file; ``#`` starts a comment.

        Keys missing from the file keep their value in ``base`` (defaults
        when omitted).
        """

        path = Path(path)
        if not path.is_file():
            raise ConfigurationError(f"config file {path} does not exist")
        raw = dotenv_values(path)
        for key, value in raw.items():
            if value is None:
                raise ConfigurationError(f"config key {key!r} in {path} has no value")
        return (base or cls()).with_overrides(**dict(raw))

    def with_overrides(self, **flags: Any) -> "RunConfig":
        """Copy with every non-``None`` flag parsed and applied."""

        updates: Dict[str, Any] = {}
        for key, value in flags.items():
            if value is None:
                continue
            parser = _PARSERS.get(key)
            if parser is None:
                raise ConfigurationError(f"unknown config key {key!r}")
            try:
                updates[key] = parser(value)
            except (TypeError, ValueError) as exc:
                raise ConfigurationError(f"invalid value {value!r} for config key {key!r}: {exc}") from exc
        updated = replace(self, **updates)
        updated.validate()
        return updated

    def validate(self) -> None:
        for key in ("m", "resolutions", "n_points", "snrdb", "sigma_r", "n_list"):
            if not getattr(self, key):
                raise ConfigurationError(f"config key {key!r} needs at least one value")
        for key in ("n_queries", "trials", "n_test"):
            if getattr(self, key) < 0:
                raise ConfigurationError(f"config key {key!r} must be >= 0")
        if self.embed_dim < 0:
            raise ConfigurationError("config key 'embed_dim' must be >= 0")
        # Builds (and thereby checks) the approximation parameters.
        for degree in self.m:
            self.to_approx_config(m=degree)
        self.noise_model()

    # ------------------------------------------------------------------
    def single(self, key: str) -> Any:
        """The only entry of a list-valued key."""

        values = getattr(self, key)
        if len(values) != 1:
            raise ConfigurationError(f"this command takes a single value for {key!r}, got {_format_value(values)}")
        return values[0]

    def to_approx_config(self, m: Optional[int] = None) -> ApproxConfig:
        degree = self.single("m") if m is None else int(m)
        weight = WeightSpec(family=self.weight, k=self.k, h=self.h, eps_reg=self.eps_reg)
        frame_cfg = FrameSearchConfig(
            init_mode=self.init_mode,
            seed=self.seed,
            tol_q=self.tol_q,
            max_iter=self.max_iter,
            mu=self.mu,
            rcond=self.rcond,
        )
        return ApproxConfig(
            d=self.d,
            m=degree,
            weight=weight,
            frame_cfg=frame_cfg,
            interpolatory=self.interpolatory,
            support_factor=self.support_factor,
            rcond=self.rcond,
        )

    def noise_model(self) -> NoiseModel:
        return NoiseModel(sigma_domain=self.sigma_domain, sigma_target=self.sigma_target, seed=self.seed)

    def model_dump(self) -> Dict[str, Any]:
        return {f.name: _format_value(getattr(self, f.name)) for f in fields(self)}

    def to_text(self) -> str:
        lines = ["# effective run configuration"]
        lines.extend(f"{key}={value}" for key, value in self.model_dump().items())
        return "\n".join(lines) + "\n"

    def write(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_text(), encoding="utf-8")
        return path


__all__ = [
    "DATASETS",
    "LOG_FORMAT",
    "RunConfig",
    "RuntimeConfig",
    "configure_logging",
    "load_from_env",
]
