"""JSON scenario files: schema validation and conversion to library types."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from .dayahead import ScenarioDistribution
from .demand import DemandProfile
from .market import UtilitySpec
from .procurement import as_price
from .rate import RateSpec


class ScenarioError(ValueError):
    """Validation failure; ``path`` locates the offending field."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.path = path


def load_schema() -> dict:
    return json.loads(resources.files("ddservices").joinpath("schema.json").read_text())


def rational(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class Scenario:
    horizon: int
    digest: str
    name: str | None = None
    loads: tuple | None = None
    rate_specs: tuple[tuple[int, RateSpec], ...] = ()
    supply: tuple[int, ...] | None = None
    distribution: ScenarioDistribution | None = None
    c_da: Fraction | None = None
    c_rt: Fraction | None = None
    utility: UtilitySpec | None = None
    consumers: int | None = None
    seed: int | None = None
    y_cap: int | None = None

    def durations(self) -> DemandProfile:
        """All loads as unit-rate durations; rate specs expand to ``max_rate`` loads."""
        out: list[int] = []
        for item in self.loads or ():
            if isinstance(item, RateSpec):
                out.extend(item.unit_durations())
            else:
                out.append(item)
        return DemandProfile(tuple(out), self.horizon)

    def require(self, *fields: str) -> None:
        for name in fields:
            if getattr(self, name) is None:
                raise ScenarioError(f"field {name!r} is required for this command", name)


def _check_length(vec, T, where):
    if len(vec) != T:
        raise ScenarioError(f"{where} has {len(vec)} slots, horizon is {T}", where)


def parse_scenario(raw: bytes) -> Scenario:
    """Validate ``raw`` JSON against the schema and build a :class:`Scenario`.

    Raises :class:`ScenarioError` for schema or consistency problems and
    :class:`ddservices.rate.UnservableSpecError` for a rate spec that cannot
    be met within the horizon.
    """
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ScenarioError(f"not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(data, load_schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ScenarioError(exc.message, path) from exc

    T = data["horizon"]
    kw: dict = {"horizon": T, "digest": "sha256:" + hashlib.sha256(raw).hexdigest()}
    kw["name"] = data.get("name")
    if "loads" in data:
        loads, specs = [], []
        for i, item in enumerate(data["loads"]):
            if isinstance(item, int):
                item = {"duration": item}
            if "duration" in item:
                if item["duration"] > T:
                    raise ScenarioError(f"duration {item['duration']} exceeds horizon {T}", f"loads/{i}")
                loads.append(item["duration"])
            else:
                spec = RateSpec(item["energy"], item["max_rate"], T)
                loads.append(spec)
                specs.append((i, spec))
        kw["loads"] = tuple(loads)
        kw["rate_specs"] = tuple(specs)
    if "supply" in data:
        _check_length(data["supply"], T, "supply")
        kw["supply"] = tuple(data["supply"])
    if "scenarios" in data:
        pairs = []
        for i, s in enumerate(data["scenarios"]):
            _check_length(s["supply"], T, f"scenarios/{i}/supply")
            pairs.append((tuple(s["supply"]), rational(s["probability"])))
        try:
            kw["distribution"] = ScenarioDistribution.from_pairs(pairs)
        except ValueError as exc:
            raise ScenarioError(str(exc), "scenarios") from exc
    prices = data.get("prices", {})
    for key in ("c_da", "c_rt"):
        if key in prices:
            try:
                kw[key] = as_price(rational(prices[key]))
            except (ValueError, ZeroDivisionError) as exc:
                raise ScenarioError(str(exc), f"prices/{key}") from exc
    if "utility" in data:
        u = data["utility"]
        if len(u["values"]) != T + 1:
            raise ScenarioError(f"utility needs {T + 1} values U(0..T)", "utility/values")
        try:
            kw["utility"] = UtilitySpec(tuple(rational(v) for v in u["values"]), u["curvature"])
        except (ValueError, ZeroDivisionError) as exc:
            raise ScenarioError(str(exc), "utility") from exc
    for key in ("consumers", "seed", "y_cap"):
        if key in data:
            kw[key] = data[key]
    return Scenario(**kw)


def read_scenario(path: str | Path) -> Scenario:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}", "") from exc
    return parse_scenario(raw)
