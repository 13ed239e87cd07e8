"""Sectioned text configuration for the command-line harness.

INI syntax via configparser: sections [problem], [grid], [quadrature],
plus command-specific sections [lemma], [frac_apply], [evolve], [sweep].
Parse failures carry the section and field name.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .evolution import ProblemParams
from .grid import GridSpec
from .pv import PVQuadratureConfig


class ConfigError(ValueError):
    """Bad or missing configuration content."""


_sentinel = object()


def _get(parser, section, key, cast, default=_sentinel):
    if not parser.has_section(section):
        if default is not _sentinel:
            return default
        raise ConfigError(f"missing section [{section}]")
    if not parser.has_option(section, key):
        if default is not _sentinel:
            return default
        raise ConfigError(f"missing field {key!r} in section [{section}]")
    raw = parser.get(section, key)
    try:
        return cast(raw)
    except Exception as exc:
        raise ConfigError(f"bad value for [{section}] {key} = {raw!r}: {exc}") from exc


def _complex(raw: str) -> complex:
    return complex(raw.replace(" ", "").replace("i", "j"))


def _float_list(raw: str) -> list[float]:
    items = [s for s in (t.strip() for t in raw.split(",")) if s]
    return [float(s) for s in items]


@dataclass(frozen=True)
class HarnessConfig:
    """Everything a subcommand may need, parsed and validated."""

    params: ProblemParams | None
    grid: GridSpec | None
    quadrature: PVQuadratureConfig
    raw: configparser.ConfigParser

    def section(self, name: str) -> dict:
        return dict(self.raw.items(name)) if self.raw.has_section(name) else {}


def load_config(path: str | Path) -> HarnessConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc

    params = None
    if parser.has_section("problem"):
        n = _get(parser, "problem", "n", int)
        p = _get(parser, "problem", "p", float)
        lam = _get(parser, "problem", "lambda", _complex)
        alpha_raw = parser.get("problem", "alpha", fallback="auto").strip()
        alpha = None if alpha_raw in ("auto", "") else _complex(alpha_raw)
        try:
            params = ProblemParams(n=n, p=p, lam=lam, alpha=alpha)
        except ValueError as exc:
            raise ConfigError(f"bad [problem] section: {exc}") from exc

    grid = None
    if parser.has_section("grid"):
        try:
            grid = GridSpec(n=params.n if params else _get(parser, "grid", "n", int),
                            L=_get(parser, "grid", "L", float),
                            N=_get(parser, "grid", "N", int))
        except ValueError as exc:
            raise ConfigError(f"bad [grid] section: {exc}") from exc

    kwargs = {}
    for key, cast in (("eps0", float), ("growth", float), ("y_max", float),
                      ("radial_nodes", int), ("angular_nodes", int), ("tol", float)):
        val = _get(parser, "quadrature", key, cast, default=None)
        if val is not None:
            kwargs[key] = val
    try:
        quad = PVQuadratureConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"bad [quadrature] section: {exc}") from exc

    return HarnessConfig(params=params, grid=grid, quadrature=quad, raw=parser)


def parse_float_list(cfg: HarnessConfig, section: str, key: str, default=None):
    raw = cfg.section(section).get(key)
    if raw is None or raw.strip() == "":
        if default is not None:
            return default
        return []
    try:
        return _float_list(raw)
    except Exception as exc:
        raise ConfigError(f"bad value for [{section}] {key} = {raw!r}: {exc}") from exc
