"""Scenario configuration: dataclasses, JSON (de)serialisation, validation.

A scenario is a single JSON document.  Parsing is strict by default: unknown
keys anywhere in the document raise ConfigError with the offending field path;
pass ``strict=False`` to downgrade unknown keys to warnings.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

from .model import (
    AUTO_PHONE_MASS_LB,
    ComponentClass,
    DETECTABLE_CLASSES,
    Family,
    PhoneModel,
)


class ConfigError(ValueError):
    """Invalid scenario document; message carries the field path."""


@dataclass
class StationParams:
    """Timings (seconds) and capacities of the four line stations.

    ``inference_time_ms``, ``chiller_air_temp_c`` and ``chiller_airflow_scfm``
    are metadata constants copied into reports; the camera inference overlaps
    the pick cycle, so it does not extend the timeline.
    """

    cutting_cycle: float = 30.0
    pick_time: float = 7.0
    flip_time: float = 6.0
    chill_time: float = 30.0
    chill_batch_capacity: int = 4
    extract_time: float = 3.0
    transfer_time: float = 0.0
    cutter_capacity: int = 1
    robot_capacity: int = 1
    extractor_capacity: int = 1
    battery_mass_fraction: float = 0.2
    inference_time_ms: float = 19.7
    chiller_air_temp_c: float = -80.0
    chiller_airflow_scfm: float = 24.0
    # optional {field_name: [low, mode, high]} for sensitivity runs
    triangular: dict[str, list[float]] = field(default_factory=dict)

    _TIME_FIELDS = ("cutting_cycle", "pick_time", "flip_time", "chill_time",
                    "extract_time", "transfer_time")

    def validate(self) -> None:
        for name in self._TIME_FIELDS:
            if getattr(self, name) < 0:
                raise ConfigError(f"stations.{name}: must be >= 0")
        if self.chill_batch_capacity < 1:
            raise ConfigError("stations.chill_batch_capacity: must be >= 1")
        for name in ("cutter_capacity", "robot_capacity", "extractor_capacity"):
            if getattr(self, name) < 1:
                raise ConfigError(f"stations.{name}: must be >= 1")
        if not (0.0 <= self.battery_mass_fraction <= 1.0):
            raise ConfigError("stations.battery_mass_fraction: must be in [0, 1]")
        for name, tri in self.triangular.items():
            if name not in self._TIME_FIELDS:
                raise ConfigError(f"stations.triangular.{name}: not a station time field")
            if len(tri) != 3 or not (tri[0] <= tri[1] <= tri[2]) or tri[0] == tri[2]:
                raise ConfigError(f"stations.triangular.{name}: need [low, mode, high]")


@dataclass
class PerceptionParams:
    """Stochastic perception model used by the line simulation.

    ``confusion`` is "identity", "default", or an explicit 5x5 row-stochastic
    matrix.  ``subthreshold_prob`` is the chance a scan stays below the
    confidence threshold, triggering one re-scan and then manual exception.
    """

    confusion: Any = "identity"
    confidence_threshold: float = 0.8
    subthreshold_prob: float = 0.0
    detected_confidence: float = 0.95
    xray_audit: bool = False

    def validate(self) -> None:
        if isinstance(self.confusion, str):
            if self.confusion not in ("identity", "default"):
                raise ConfigError("perception.confusion: expected 'identity', 'default' or a 5x5 matrix")
        else:
            rows = self.confusion
            n = len(DETECTABLE_CLASSES)
            if (not isinstance(rows, (list, tuple)) or len(rows) != n
                    or any(not isinstance(r, (list, tuple)) or len(r) != n for r in rows)):
                raise ConfigError("perception.confusion: matrix must be 5x5")
        if not (0.0 <= self.confidence_threshold <= 1.0):
            raise ConfigError("perception.confidence_threshold: must be in [0, 1]")
        if not (0.0 <= self.subthreshold_prob <= 1.0):
            raise ConfigError("perception.subthreshold_prob: must be in [0, 1]")
        if not (0.0 <= self.detected_confidence <= 1.0):
            raise ConfigError("perception.detected_confidence: must be in [0, 1]")


@dataclass
class AssetLine:
    """One capital asset: purchase cost and electrical draw."""

    name: str
    capital_usd: float
    power_w: float
    maintenance_rate: Optional[float] = None  # overrides the global rate

    def validate(self) -> None:
        if self.capital_usd < 0:
            raise ConfigError(f"asset {self.name}: capital must be >= 0")
        if self.power_w < 0:
            raise ConfigError(f"asset {self.name}: power must be >= 0")


def default_assets() -> list[AssetLine]:
    return [
        AssetLine("Structural Equipment", 10_000, 500),
        AssetLine("Compressor", 820, 1050),
        AssetLine("Stepper Motors", 1_000, 1050),
        AssetLine("Chiller", 25_000, 200),
        AssetLine("Cutting System", 5_500, 2400),
        AssetLine("Working Area", 1_000, 0),
        AssetLine("Battery Remover", 2_000, 0),
        AssetLine("Gripper", 3_700, 0),
        AssetLine("UR5e", 31_062, 200),
        AssetLine("Computer", 2_996, 100),
        AssetLine("Camera", 334, 50),
    ]


@dataclass
class EconParams:
    """Global economic constants plus the asset table."""

    electricity_rate: float = 0.1713   # USD/kWh
    hours_per_day: float = 8.0
    days_per_year: float = 300.0
    amortization_years: float = 20.0
    maintenance_rate: float = 0.02     # fraction of capital per year
    labor_rate: float = 35.0           # USD/h
    operators: int = 1
    revenue_per_lb: float = 1.38       # USD/lb
    phone_mass: float = AUTO_PHONE_MASS_LB  # lb
    auto_phones_per_hour: float = 120.0
    manual_minutes_per_phone: float = 9.6
    manual_phones_per_hour: float = 6.16
    manual_yearly_lbs: float = 5755.0
    unsupervised_multiplier: float = 3.0
    scale_opex_with_throughput: bool = False
    assets: list[AssetLine] = field(default_factory=default_assets)

    def validate(self) -> None:
        for name in ("electricity_rate", "hours_per_day", "days_per_year",
                     "maintenance_rate", "labor_rate", "revenue_per_lb",
                     "manual_minutes_per_phone", "manual_yearly_lbs"):
            if getattr(self, name) < 0:
                raise ConfigError(f"economics.{name}: must be >= 0")
        if self.hours_per_day > 24:
            raise ConfigError("economics.hours_per_day: must be <= 24")
        if self.amortization_years <= 0:
            raise ConfigError("economics.amortization_years: must be > 0")
        if self.operators < 0:
            raise ConfigError("economics.operators: must be >= 0")
        if self.unsupervised_multiplier <= 0:
            raise ConfigError("economics.unsupervised_multiplier: must be > 0")
        for a in self.assets:
            a.validate()


@dataclass
class ScenarioConfig:
    """Everything one run needs: fleet mix, station/perception/economic
    parameters, the seed, and the replication count."""

    seed: int = 42
    replications: int = 1
    lot_size: int = 200
    phone_mix: dict[str, float] = field(default_factory=lambda: {"android_ref": 0.5, "iphone_ref": 0.5})
    models: list[PhoneModel] = field(default_factory=lambda: [
        PhoneModel("android_ref", Family.ANDROID_LIKE),
        PhoneModel("iphone_ref", Family.IPHONE_LIKE),
    ])
    stations: StationParams = field(default_factory=StationParams)
    perception: PerceptionParams = field(default_factory=PerceptionParams)
    economics: EconParams = field(default_factory=EconParams)

    def validate(self) -> None:
        if self.lot_size < 0:
            raise ConfigError("lot_size: must be >= 0")
        if self.replications < 1:
            raise ConfigError("replications: must be >= 1")
        if not (0 <= self.seed < 2**63):
            raise ConfigError("seed: must fit in 64 bits")
        by_id = {m.id: m for m in self.models}
        if len(by_id) != len(self.models):
            raise ConfigError("models: duplicate model id")
        if not self.phone_mix:
            raise ConfigError("phone_mix: must name at least one model")
        for mid, frac in self.phone_mix.items():
            if mid not in by_id:
                raise ConfigError(f"phone_mix.{mid}: unknown model id")
            if frac < 0:
                raise ConfigError(f"phone_mix.{mid}: fraction must be >= 0")
        if abs(sum(self.phone_mix.values()) - 1.0) > 1e-9:
            raise ConfigError("phone_mix: fractions must sum to 1")
        self.stations.validate()
        self.perception.validate()
        self.economics.validate()

    def model(self, model_id: str) -> PhoneModel:
        for m in self.models:
            if m.id == model_id:
                return m
        raise ConfigError(f"unknown model id {model_id!r}")

    # -- serialisation ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "replications": self.replications,
            "lot_size": self.lot_size,
            "phone_mix": dict(self.phone_mix),
            "models": [_model_to_dict(m) for m in self.models],
            "stations": _station_dict(self.stations),
            "perception": {
                "confusion": self.perception.confusion if isinstance(self.perception.confusion, str)
                             else [list(map(float, r)) for r in self.perception.confusion],
                "confidence_threshold": self.perception.confidence_threshold,
                "subthreshold_prob": self.perception.subthreshold_prob,
                "detected_confidence": self.perception.detected_confidence,
                "xray_audit": self.perception.xray_audit,
            },
            "economics": _econ_dict(self.economics),
        }

    @classmethod
    def from_dict(cls, doc: dict, strict: bool = True) -> "ScenarioConfig":
        _check_keys(doc, {"seed", "replications", "lot_size", "phone_mix", "models",
                          "stations", "perception", "economics"}, "scenario", strict)
        models = [_model_from_dict(m, i, strict) for i, m in enumerate(doc.get("models", []))]
        cfg = cls(
            seed=int(doc.get("seed", 42)),
            replications=int(doc.get("replications", 1)),
            lot_size=int(doc.get("lot_size", 200)),
            phone_mix={str(k): float(v) for k, v in doc.get("phone_mix", {}).items()},
            models=models or ScenarioConfig().models,
            stations=_station_from_dict(doc.get("stations", {}), strict),
            perception=_perception_from_dict(doc.get("perception", {}), strict),
            economics=_econ_from_dict(doc.get("economics", {}), strict),
        )
        cfg.validate()
        return cfg


def _check_keys(doc: dict, allowed: set[str], path: str, strict: bool) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = sorted(set(doc) - allowed)
    if unknown:
        msg = f"{path}: unknown key(s) {', '.join(unknown)}"
        if strict:
            raise ConfigError(msg)
        warnings.warn(msg, stacklevel=3)


def _model_to_dict(m: PhoneModel) -> dict:
    return {
        "id": m.id,
        "family": m.family.value,
        "mass_lb": m.mass_lb,
        "manifest": [c.value for c in m.manifest],
        "battery_host": m.battery_host.value if m.battery_host else None,
        "mass_fractions": list(m.mass_fractions),
    }


def _model_from_dict(d: dict, index: int, strict: bool) -> PhoneModel:
    path = f"models[{index}]"
    _check_keys(d, {"id", "family", "mass_lb", "manifest", "battery_host", "mass_fractions"},
                path, strict)
    try:
        family = Family(d["family"])
    except (KeyError, ValueError):
        raise ConfigError(f"{path}.family: expected one of {[f.value for f in Family]}")
    try:
        manifest = tuple(ComponentClass(c) for c in d.get("manifest", ()))
        host = ComponentClass(d["battery_host"]) if d.get("battery_host") else None
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}")
    try:
        return PhoneModel(
            id=str(d.get("id", "")),
            family=family,
            mass_lb=float(d.get("mass_lb", AUTO_PHONE_MASS_LB)),
            manifest=manifest,
            battery_host=host,
            mass_fractions=tuple(float(f) for f in d.get("mass_fractions", ())),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}")


_STATION_KEYS = {f.name for f in fields(StationParams)}


def _station_dict(s: StationParams) -> dict:
    d = {name: getattr(s, name) for name in (
        "cutting_cycle", "pick_time", "flip_time", "chill_time", "chill_batch_capacity",
        "extract_time", "transfer_time", "cutter_capacity", "robot_capacity",
        "extractor_capacity", "battery_mass_fraction", "inference_time_ms",
        "chiller_air_temp_c", "chiller_airflow_scfm")}
    d["triangular"] = {k: list(v) for k, v in s.triangular.items()}
    return d


def _station_from_dict(d: dict, strict: bool) -> StationParams:
    _check_keys(d, _STATION_KEYS, "stations", strict)
    kwargs = {k: d[k] for k in d if k in _STATION_KEYS}
    if "triangular" in kwargs:
        kwargs["triangular"] = {str(k): [float(x) for x in v]
                                for k, v in kwargs["triangular"].items()}
    s = StationParams(**kwargs)
    s.validate()
    return s


_PERCEPTION_KEYS = {f.name for f in fields(PerceptionParams)}


def _perception_from_dict(d: dict, strict: bool) -> PerceptionParams:
    _check_keys(d, _PERCEPTION_KEYS, "perception", strict)
    p = PerceptionParams(**{k: d[k] for k in d if k in _PERCEPTION_KEYS})
    p.validate()
    return p


_ECON_KEYS = {f.name for f in fields(EconParams)}


def _econ_dict(e: EconParams) -> dict:
    d = {name: getattr(e, name) for name in (
        "electricity_rate", "hours_per_day", "days_per_year", "amortization_years",
        "maintenance_rate", "labor_rate", "operators", "revenue_per_lb", "phone_mass",
        "auto_phones_per_hour", "manual_minutes_per_phone", "manual_phones_per_hour",
        "manual_yearly_lbs", "unsupervised_multiplier", "scale_opex_with_throughput")}
    d["assets"] = [{"name": a.name, "capital_usd": a.capital_usd, "power_w": a.power_w,
                    "maintenance_rate": a.maintenance_rate} for a in e.assets]
    return d


def _econ_from_dict(d: dict, strict: bool) -> EconParams:
    _check_keys(d, _ECON_KEYS, "economics", strict)
    kwargs = {k: d[k] for k in d if k in _ECON_KEYS and k != "assets"}
    assets = []
    for i, a in enumerate(d.get("assets", [])):
        _check_keys(a, {"name", "capital_usd", "power_w", "maintenance_rate"},
                    f"economics.assets[{i}]", strict)
        assets.append(AssetLine(str(a.get("name", f"asset{i}")),
                                float(a.get("capital_usd", 0)),
                                float(a.get("power_w", 0)),
                                a.get("maintenance_rate")))
    e = EconParams(assets=assets or default_assets(), **kwargs)
    e.validate()
    return e


def load_scenario(path: str | Path, strict: bool = True) -> ScenarioConfig:
    """Parse and validate a scenario JSON file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {p}: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario {p} is not valid JSON: {exc}")
    return ScenarioConfig.from_dict(doc, strict=strict)


def default_scenario_path() -> Path:
    """Path of the bundled default scenario."""
    return Path(__file__).parent / "data" / "default_scenario.json"
