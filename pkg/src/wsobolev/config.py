"""Run configuration: flat key = value text with [section] headers.

The format is deliberately minimal so verification runs are reproducible from
a single committed file: no includes, no environment expansion (the output
directory may be overridden on the command line), unknown keys are errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .errors import ConfigError
from .quad import QuadratureSpec
from .weights import Weight, WeightPair, make_pair, power_weight, unit_weight

ALL_SUITES = ("hoelder", "embedding", "reflexivity", "corol-divergence",
              "hardy", "identity", "blocks")
_SUITES = ALL_SUITES


@dataclass
class RunConfig:
    # [weights]
    v0_kind: str = "unit"
    v0_gamma: float = 0.0
    v1_kind: str = "power"
    v1_gamma: float = 1.0
    p: float = 2.0
    # [quadrature]
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdiv: int = 10**6
    t_min: float = 0.0        # 0 means "no truncation window"
    t_max: float = 0.0
    # [grid]
    half_width: int = 6
    # [corpus]
    seed: int = 1234
    hats: int = 7
    bumps: int = 3
    # [construct]
    construct_c: float = 1.0
    construct_d: float = 2.0
    construct_epsilon: float = 0.1
    construct_mode: str = "normalized"
    # [verify]
    suites: tuple = ("identity", "hardy")
    sandwich_ceiling: float = 100.0
    embedding_ceiling: float = 100.0
    block_ratio_lo: float = 0.01
    block_ratio_hi: float = 100.0
    # [output]
    directory: str = "out"

    def __post_init__(self):
        if self.p <= 1.0 or not math.isfinite(self.p):
            raise ConfigError("p must satisfy 1 < p < inf")
        if self.half_width < 1:
            raise ConfigError("grid half_width must be >= 1")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ConfigError("tolerances must be positive")
        if self.t_min < 0 or self.t_max < 0 or (self.t_max and self.t_min >= self.t_max):
            raise ConfigError("truncation window must satisfy 0 < t_min < t_max")
        for kind in (self.v0_kind, self.v1_kind):
            if kind not in ("unit", "power"):
                raise ConfigError(f"unknown weight kind {kind!r}")
        for s in self.suites:
            if s != "all" and s not in _SUITES:
                raise ConfigError(f"unknown suite {s!r}; known: {', '.join(_SUITES)}")
        if self.construct_mode not in ("raw", "normalized"):
            raise ConfigError("construct mode must be raw or normalized")

    # -- model builders ------------------------------------------------------

    def weight(self, which: str) -> Weight:
        kind = getattr(self, f"{which}_kind")
        gamma = getattr(self, f"{which}_gamma")
        return unit_weight() if kind == "unit" else power_weight(gamma)

    def pair(self) -> WeightPair:
        return make_pair(self.weight("v0"), self.weight("v1"), self.p)

    def quadrature(self) -> QuadratureSpec:
        trunc = (self.t_min, self.t_max) if self.t_max else None
        return QuadratureSpec(self.abs_tol, self.rel_tol, self.max_subdiv, trunc)

    def suite_names(self) -> tuple:
        if "all" in self.suites:
            return _SUITES
        return tuple(self.suites)

    # -- text round trip -----------------------------------------------------

    _LAYOUT = {
        "weights": ("v0_kind", "v0_gamma", "v1_kind", "v1_gamma", "p"),
        "quadrature": ("abs_tol", "rel_tol", "max_subdiv", "t_min", "t_max"),
        "grid": ("half_width",),
        "corpus": ("seed", "hats", "bumps"),
        "construct": ("construct_c", "construct_d", "construct_epsilon", "construct_mode"),
        "verify": ("suites", "sandwich_ceiling", "embedding_ceiling",
                   "block_ratio_lo", "block_ratio_hi"),
        "output": ("directory",),
    }

    def emit(self) -> str:
        lines = []
        for section, keys in self._LAYOUT.items():
            lines.append(f"[{section}]")
            for key in keys:
                val = getattr(self, key)
                if isinstance(val, tuple):
                    val = ",".join(val)
                elif isinstance(val, float):
                    val = f"{val:.17g}"
                lines.append(f"{key} = {val}")
            lines.append("")
        return "\n".join(lines)

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        types = {f.name: f.type for f in fields(cls)}
        layout_keys = {k for keys in cls._LAYOUT.values() for k in keys}
        values = {}
        section = None
        for ln, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                if section not in cls._LAYOUT:
                    raise ConfigError(f"line {ln}: unknown section [{section}]")
                continue
            if "=" not in line:
                raise ConfigError(f"line {ln}: expected key = value, got {raw!r}")
            if section is None:
                raise ConfigError(f"line {ln}: key outside of any [section]")
            key, _, val = (s.strip() for s in line.partition("="))
            if key not in layout_keys or key not in cls._LAYOUT[section]:
                raise ConfigError(f"line {ln}: unknown key {key!r} in [{section}]")
            typ = types[key]
            try:
                if typ in ("float", float):
                    values[key] = float(val)
                elif typ in ("int", int):
                    values[key] = int(val)
                elif typ in ("tuple", tuple):
                    values[key] = tuple(s.strip() for s in val.split(",") if s.strip())
                else:
                    values[key] = val
            except ValueError as exc:
                raise ConfigError(f"line {ln}: bad value for {key}: {val!r}") from exc
        try:
            return cls(**values)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return cls.parse(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
