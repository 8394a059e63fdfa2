"""Scenario files: one YAML document describing population, economics,
channel, mobility, solver, and learner settings plus the master seed.

Unknown keys are rejected so typos fail loudly; a scenario round-trips
losslessly through ``load``/``dump``.  Delays can be fixed per type or
derived once from the channel model at randomly drawn initial positions
(the delay of shipping a full ``s_max`` payload over the A2G link).
"""

from __future__ import annotations

import dataclasses
import hashlib
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .channel import (
    ChannelParams,
    LinkEnvironment,
    MobilityConfig,
    Position3D,
    a2g_rate,
    transmission_delay,
)
from .learn import LearnerConfig
from .model import GcsParams, Population, UavType, canonicalize
from .solver import SolverConfig

__all__ = [
    "PopulationSpec",
    "Scenario",
    "load_scenario",
    "dump_scenario",
    "generate_population",
]

DISTRIBUTIONS = ("even", "uniform", "explicit")


@dataclass(frozen=True)
class PopulationSpec:
    """Either an explicit type list or a generator (count + cost range)."""

    count: int = 10
    cost_range: tuple[float, float] = (0.01, 1.0)
    distribution: str = "even"
    delay: object = "channel"  # "channel", a number, or a per-type list
    counts: tuple[int, ...] | None = None
    types: tuple[dict, ...] | None = None

    def __post_init__(self) -> None:
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        lo, hi = self.cost_range
        if not (0 <= lo <= hi):
            raise ValueError(f"invalid cost_range {self.cost_range}")
        if self.distribution == "explicit" and not self.types:
            raise ValueError("explicit distribution requires a types list")


@dataclass(frozen=True)
class Scenario:
    seed: int = 42
    t_max: float = 2.0
    population: PopulationSpec = field(default_factory=PopulationSpec)
    gcs: GcsParams = field(default_factory=GcsParams)
    channel: ChannelParams = field(default_factory=ChannelParams)
    mobility: MobilityConfig = field(default_factory=MobilityConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    area: tuple[float, float] = (200.0, 200.0)
    height_range: tuple[float, float] = (30.0, 80.0)

    def digest(self) -> str:
        return hashlib.sha256(dump_scenario(self).encode()).hexdigest()[:16]


_SECTION_TYPES = {
    "population": PopulationSpec,
    "gcs": GcsParams,
    "channel": ChannelParams,
    "solver": SolverConfig,
    "learner": LearnerConfig,
}


def _build_section(cls, data: dict, path: str):
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown keys in {path}: {sorted(unknown)}")
    kwargs = dict(data)
    for key, value in kwargs.items():
        if isinstance(value, list):
            kwargs[key] = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        if key == "types" and value is not None:
            kwargs[key] = tuple(dict(v) for v in value)
    return cls(**kwargs)


def load_scenario(source: str | Path | dict) -> Scenario:
    """Parse a scenario from a YAML path, YAML text, or a pre-parsed dict."""
    if isinstance(source, dict):
        data = dict(source)
    else:
        text = Path(source).read_text() if Path(str(source)).is_file() else str(source)
        data = yaml.safe_load(text) or {}
        if not isinstance(data, dict):
            raise ValueError("scenario document must be a mapping")
    allowed = {f.name for f in dataclasses.fields(Scenario)}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown top-level keys: {sorted(unknown)}")
    kwargs: dict = {}
    for key, value in data.items():
        if key in _SECTION_TYPES:
            if not isinstance(value, dict):
                raise ValueError(f"section {key!r} must be a mapping")
            kwargs[key] = _build_section(_SECTION_TYPES[key], value, key)
        elif key == "mobility":
            kwargs[key] = _build_section(MobilityConfig, value, key)
        elif key in ("area", "height_range"):
            kwargs[key] = tuple(value)
        else:
            kwargs[key] = value
    return Scenario(**kwargs)


def _plain(value):
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {
            f.name: _plain(getattr(value, f.name))
            for f in dataclasses.fields(value)
            if f.name != "values"  # derived array on ActionGrid-style types
        }
    if isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def dump_scenario(sc: Scenario) -> str:
    """Canonical YAML text for a scenario (stable key order)."""
    data = _plain(sc)
    buf = io.StringIO()
    yaml.safe_dump(data, buf, sort_keys=True, default_flow_style=False)
    return buf.getvalue()


def _channel_delays(sc: Scenario, n: int, rng: np.random.Generator) -> list[float]:
    """Draw initial positions and price each type's delay as the time to ship
    a full s_max payload over its A2G link.  Held fixed afterwards."""
    env = LinkEnvironment(
        gcs_position=Position3D(sc.area[0] / 2.0, sc.area[1] / 2.0, sc.channel.gcs_height),
        params=sc.channel,
    )
    delays = []
    zlo, zhi = sc.height_range
    for _ in range(n):
        pos = Position3D(
            rng.uniform(0.0, sc.area[0]),
            rng.uniform(0.0, sc.area[1]),
            rng.uniform(zlo, zhi),
        )
        d = max(pos.horizontal_distance_to(env.gcs_position), 1.0)
        rate = a2g_rate(pos, sc.channel, d)
        delays.append(transmission_delay(sc.gcs.s_max, rate))
    return delays


def generate_population(sc: Scenario, rng: np.random.Generator | None = None,
                        count: int | None = None) -> Population:
    """Materialize the population spec: draw or space marginal costs, attach
    delays (fixed or channel-derived), and canonicalize."""
    spec = sc.population
    rng = rng if rng is not None else np.random.default_rng(sc.seed)
    if spec.distribution == "explicit":
        assert spec.types is not None
        raw = [
            UavType(
                index=i + 1,
                marginal_cost=float(t["cost"]),
                delay=float(t["delay"]),
                count=int(t.get("count", 1)),
            )
            for i, t in enumerate(spec.types)
        ]
        return canonicalize(raw)

    n = count if count is not None else spec.count
    lo, hi = spec.cost_range
    if spec.distribution == "even":
        costs = [lo] if n == 1 else [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    else:
        costs = sorted(float(c) for c in rng.uniform(lo, hi, size=n))

    if spec.delay == "channel":
        delays = _channel_delays(sc, n, rng)
    elif isinstance(spec.delay, (int, float)):
        delays = [float(spec.delay)] * n
    else:
        delays = [float(d) for d in spec.delay]
        if len(delays) != n:
            raise ValueError(f"delay list has {len(delays)} entries for {n} types")

    counts = list(spec.counts) if spec.counts else [1] * n
    if len(counts) != n:
        raise ValueError(f"counts list has {len(counts)} entries for {n} types")
    raw = [
        UavType(index=i + 1, marginal_cost=c, delay=d, count=k)
        for i, (c, d, k) in enumerate(zip(costs, delays, counts))
    ]
    return canonicalize(raw)
