"""Pension reform loss modelling (C++ core)."""

import json
import os
from pathlib import Path

_DATA = Path(__file__).with_name("data")
if _DATA.is_dir():
    os.environ.setdefault("PENSIONLAB_DATA", str(_DATA))

from . import _core  # noqa: E402
from ._core import (  # noqa: E402,F401
    ParseError,
    ValidationError,
    annual_devaluation,
    average_retirement_erosion,
    erosion_factor,
    implied_adjustment,
    monte_carlo_devaluation,
    weighted_quantile,
)


def project(request: dict) -> dict:
    """Same contract as POST /api/project. Raises ValueError (400) or TypeError (422)."""
    return json.loads(_core._project(json.dumps(request)))


def presets() -> list:
    return json.loads(_core._presets())["presets"]


def erosion(d: float, years: int) -> dict:
    return json.loads(_core._erosion({"d": repr(float(d)), "years": str(int(years))}))


def schema() -> dict:
    return json.loads(_core._schema())


def replay_summary(heatmap: str = "", percent: str = "", money: str = "") -> dict:
    """Statistics of the published CPI 2.8% grids weighted by the heat map."""
    return json.loads(_core._replay_summary(heatmap, percent, money))


def cohort_summary(cpi: float, rules_old="uss2021", rules_new="uuk2021", profile="modeller", heatmap="") -> dict:
    return json.loads(_core._cohort_summary(cpi, rules_old, rules_new, profile, heatmap))
