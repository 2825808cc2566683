"""Scenario configuration: the economics, technology catalog, and defaults
that parameterize every county subproblem.

Scenarios are read from a JSON file; `"defaults": "table2"` starts from the
bundled base-case assumptions (200 MW facility, 150 MWh lithium-ion battery,
5 $/MWh export price, 20 $/MWh curtailment penalty, 20 years at 1.2%) and
any further keys override the preset.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .domain import (
    DispatchableTechParams,
    EconomicParams,
    LoadSpec,
    StorageParams,
    SubstationCost,
    VgTechParams,
    _require,
)


@dataclass(frozen=True)
class CountyDefaults:
    """Fallbacks for county attributes the datasets may not carry."""

    water_price: float = 0.001            # $/L
    water_risk: float = 1.0
    water_risk_penalty: float = 1.0e5     # $ per risk unit
    fiber_km: float = 50.0
    trans_km: float = 20.0
    fiber_unit_cost: float = 50_000.0     # $/km
    transmission_unit_cost: float = 1_000.0   # $/(MW km)
    substation_fixed: float = 2.0e6       # $
    substation_slope: float = 20_000.0    # $/MW
    geothermal_cf: float = 0.85           # annual average when no series exists

    def __post_init__(self):
        for name in ("water_price", "water_risk", "water_risk_penalty",
                     "fiber_km", "trans_km", "fiber_unit_cost",
                     "transmission_unit_cost", "substation_fixed",
                     "substation_slope"):
            _require(getattr(self, name) >= 0, name,
                     f"must be >= 0, got {getattr(self, name)}")
        _require(0 <= self.geothermal_cf <= 1, "geothermal_cf",
                 f"must be in [0, 1], got {self.geothermal_cf}")

    def substation(self) -> SubstationCost:
        return SubstationCost(fixed=self.substation_fixed,
                              slope=self.substation_slope)


@dataclass(frozen=True)
class Scenario:
    economics: EconomicParams
    load: LoadSpec
    vg_techs: tuple = ()               # VgTechParams, solar/wind/geothermal
    dispatchables: tuple = ()          # DispatchableTechParams
    storage: Optional[StorageParams] = None
    county_defaults: CountyDefaults = field(default_factory=CountyDefaults)
    mode: str = "sized"                # sized | paper_literal

    def __post_init__(self):
        object.__setattr__(self, "vg_techs", tuple(self.vg_techs))
        object.__setattr__(self, "dispatchables", tuple(self.dispatchables))
        _require(self.mode in ("sized", "paper_literal"), "mode",
                 f"must be 'sized' or 'paper_literal', got {self.mode!r}")
        names = [t.tech for t in self.vg_techs] + \
                [t.tech for t in self.dispatchables]
        _require(len(names) == len(set(names)), "vg_techs",
                 f"duplicate tech ids in catalog: {names}")

    @property
    def vg_tech_ids(self) -> tuple:
        """Non-dispatchable renewables (the paper's VG set)."""
        return tuple(t.tech for t in self.vg_techs if not t.is_dispatchable)

    @property
    def geo_tech_ids(self) -> tuple:
        return tuple(t.tech for t in self.vg_techs if t.is_dispatchable)

    @property
    def dispatchable_ids(self) -> tuple:
        return tuple(t.tech for t in self.dispatchables)

    def vg_params(self, tech: str) -> VgTechParams:
        for t in self.vg_techs:
            if t.tech == tech:
                return t
        raise KeyError(f"unknown collocated tech {tech!r}")

    def with_penetration(self, b: float) -> "Scenario":
        return replace(self, economics=replace(self.economics,
                                               penetration_fraction=b))

    def with_profile(self, hourly_it: Sequence[float]) -> "Scenario":
        return replace(self, load=replace(self.load,
                                          hourly_it_profile=tuple(hourly_it)))

    def fingerprint(self) -> str:
        return hashlib.sha256(
            json.dumps(to_dict(self), sort_keys=True).encode()).hexdigest()


def table2_preset() -> dict:
    """Base-case assumption set as a plain scenario dict.

    Technology cost figures are editable placeholders in the same units as
    real catalogs; only the facility size, storage size, export price,
    curtailment penalty, lifetime, and discount rate are fixed assumptions.
    """
    return {
        "economics": {
            "years": 20,
            "discount_rate": 0.012,
            "aggregation_weight": 91.25,
            "export_price": 5.0,
            "curtailment_penalty": 20.0,
            "weight_transmission": 1.0,
            "weight_telecom": 1.0,
            "weight_water": 1.0,
            "penetration_fraction": 1.0,
            "min_locations": 1,
            "reserve_multiplier": 1.0,
            "headroom": 1.2,
        },
        "load": {
            "it_capacity_mw": 200.0,
            "pue_by_climate": {"hot": 1.35, "mixed": 1.2, "cold": 1.1},
            "wue_by_climate": {"hot": 1.8, "mixed": 0.8, "cold": 0.3},
        },
        "vg_techs": [
            {"tech": "solar", "capex": 1.1e6, "fixed_om": 15_000.0,
             "variable_om": 0.0},
            {"tech": "wind", "capex": 1.6e6, "fixed_om": 30_000.0,
             "variable_om": 0.0},
            {"tech": "geothermal", "capex": 6.0e6, "fixed_om": 80_000.0,
             "variable_om": 3.0, "is_dispatchable": True},
        ],
        "dispatchables": [
            {"tech": "smr", "capacity_mw": 50.0, "capex": 8.0e6,
             "fixed_om": 100_000.0, "min_output_fraction": 0.5,
             "ramp_rate": 0.25, "startup_cost_fraction": 1.0e-4,
             "operating_cost_fraction": 0.027},
        ],
        "storage": {
            "capacity_mwh": 150.0,
            "max_charge_rate": 0.5,
            "max_discharge_rate": 0.5,
            "min_soc_mwh": 0.0,
            "self_discharge": 0.001,
            "charge_eff": 0.92,
            "discharge_eff": 0.92,
            "round_trip": 0.85,
        },
        "county_defaults": {
            "water_price_per_l": 0.001,
            "water_risk": 1.0,
            "water_risk_penalty": 1.0e5,
            "fiber_km": 50.0,
            "trans_km": 20.0,
            "fiber_unit_cost_per_km": 50_000.0,
            "transmission_unit_cost_per_mw_km": 1_000.0,
            "substation_fixed": 2.0e6,
            "substation_slope_per_mw": 20_000.0,
            "geothermal_cf": 0.85,
        },
        "mode": "sized",
    }


_PRESETS = {"table2": table2_preset}


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def from_dict(raw: dict, it_profile: Optional[Sequence[float]] = None) -> Scenario:
    """Build a Scenario from the JSON schema dict.

    it_profile supplies the representative-hour IT load when the scenario
    file does not embed one (the usual case: it comes from load.csv).
    """
    preset_name = raw.get("defaults")
    data = dict(raw)
    data.pop("defaults", None)
    if preset_name is not None:
        if preset_name not in _PRESETS:
            raise ValueError(f"unknown defaults preset {preset_name!r}")
        data = _merge(_PRESETS[preset_name](), data)

    eco = data["economics"]
    economics = EconomicParams(
        years=int(eco["years"]),
        discount_rate=float(eco["discount_rate"]),
        aggregation_weight=float(eco["aggregation_weight"]),
        export_price=float(eco["export_price"]),
        curtailment_penalty=float(eco["curtailment_penalty"]),
        weight_transmission=float(eco.get("weight_transmission", 1.0)),
        weight_telecom=float(eco.get("weight_telecom", 1.0)),
        weight_water=float(eco.get("weight_water", 1.0)),
        penetration_fraction=float(eco.get("penetration_fraction", 1.0)),
        min_locations=int(eco.get("min_locations", 1)),
        reserve_multiplier=float(eco.get("reserve_multiplier", 1.0)),
        headroom=float(eco.get("headroom", 1.0)),
    )

    load_raw = data["load"]
    profile = load_raw.get("hourly_it_profile", it_profile)
    if profile is None:
        raise ValueError("no IT profile: supply load.csv or "
                         "load.hourly_it_profile in the scenario")
    load = LoadSpec(
        it_capacity=float(load_raw["it_capacity_mw"]),
        hourly_it_profile=tuple(float(v) for v in profile),
        pue_by_climate=dict(load_raw["pue_by_climate"]),
        wue_by_climate=dict(load_raw["wue_by_climate"]),
    )

    vg_techs = tuple(
        VgTechParams(
            tech=t["tech"],
            capex=float(t["capex"]),
            fixed_om=float(t["fixed_om"]),
            variable_om=(tuple(t["variable_om"])
                         if isinstance(t["variable_om"], list)
                         else float(t.get("variable_om", 0.0))),
            is_dispatchable=bool(t.get("is_dispatchable", False)),
        )
        for t in data.get("vg_techs", [])
    )

    dispatchables = tuple(
        DispatchableTechParams(
            tech=t["tech"],
            capacity_mw=float(t["capacity_mw"]),
            capex=float(t["capex"]),
            fixed_om=float(t["fixed_om"]),
            min_output_fraction=float(t["min_output_fraction"]),
            ramp_rate=float(t["ramp_rate"]),
            startup_cost_fraction=float(t["startup_cost_fraction"]),
            operating_cost_fraction=float(t["operating_cost_fraction"]),
        )
        for t in data.get("dispatchables", [])
    )

    storage = None
    if data.get("storage"):
        s = data["storage"]
        storage = StorageParams(
            capacity=float(s["capacity_mwh"]),
            max_charge_rate=float(s["max_charge_rate"]),
            max_discharge_rate=float(s["max_discharge_rate"]),
            min_soc=float(s.get("min_soc_mwh", 0.0)),
            self_discharge=float(s.get("self_discharge", 0.0)),
            charge_eff=float(s.get("charge_eff", 1.0)),
            discharge_eff=float(s.get("discharge_eff", 1.0)),
            round_trip=s.get("round_trip"),
        )

    cd = data.get("county_defaults", {})
    county_defaults = CountyDefaults(
        water_price=float(cd.get("water_price_per_l", 0.001)),
        water_risk=float(cd.get("water_risk", 1.0)),
        water_risk_penalty=float(cd.get("water_risk_penalty", 1.0e5)),
        fiber_km=float(cd.get("fiber_km", 50.0)),
        trans_km=float(cd.get("trans_km", 20.0)),
        fiber_unit_cost=float(cd.get("fiber_unit_cost_per_km", 50_000.0)),
        transmission_unit_cost=float(
            cd.get("transmission_unit_cost_per_mw_km", 1_000.0)),
        substation_fixed=float(cd.get("substation_fixed", 2.0e6)),
        substation_slope=float(cd.get("substation_slope_per_mw", 20_000.0)),
        geothermal_cf=float(cd.get("geothermal_cf", 0.85)),
    )

    return Scenario(
        economics=economics,
        load=load,
        vg_techs=vg_techs,
        dispatchables=dispatchables,
        storage=storage,
        county_defaults=county_defaults,
        mode=data.get("mode", "sized"),
    )


def load_scenario(path, it_profile: Optional[Sequence[float]] = None) -> Scenario:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"scenario file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from exc
    return from_dict(raw, it_profile=it_profile)


def to_dict(scenario: Scenario) -> dict:
    """Canonical dict form, used for fingerprinting and manifests."""
    eco = scenario.economics
    return {
        "economics": {
            "years": eco.years,
            "discount_rate": eco.discount_rate,
            "aggregation_weight": eco.aggregation_weight,
            "export_price": eco.export_price,
            "curtailment_penalty": eco.curtailment_penalty,
            "weight_transmission": eco.weight_transmission,
            "weight_telecom": eco.weight_telecom,
            "weight_water": eco.weight_water,
            "penetration_fraction": eco.penetration_fraction,
            "min_locations": eco.min_locations,
            "reserve_multiplier": eco.reserve_multiplier,
            "headroom": eco.headroom,
        },
        "load": {
            "it_capacity_mw": scenario.load.it_capacity,
            "hourly_it_profile": list(scenario.load.hourly_it_profile),
            "pue_by_climate": dict(sorted(scenario.load.pue_by_climate.items())),
            "wue_by_climate": dict(sorted(scenario.load.wue_by_climate.items())),
        },
        "vg_techs": [
            {"tech": t.tech, "capex": t.capex, "fixed_om": t.fixed_om,
             "variable_om": (list(t.variable_om)
                             if isinstance(t.variable_om, tuple)
                             else t.variable_om),
             "is_dispatchable": t.is_dispatchable}
            for t in scenario.vg_techs
        ],
        "dispatchables": [
            {"tech": t.tech, "capacity_mw": t.capacity_mw, "capex": t.capex,
             "fixed_om": t.fixed_om,
             "min_output_fraction": t.min_output_fraction,
             "ramp_rate": t.ramp_rate,
             "startup_cost_fraction": t.startup_cost_fraction,
             "operating_cost_fraction": t.operating_cost_fraction}
            for t in scenario.dispatchables
        ],
        "storage": None if scenario.storage is None else {
            "capacity_mwh": scenario.storage.capacity,
            "max_charge_rate": scenario.storage.max_charge_rate,
            "max_discharge_rate": scenario.storage.max_discharge_rate,
            "min_soc_mwh": scenario.storage.min_soc,
            "self_discharge": scenario.storage.self_discharge,
            "charge_eff": scenario.storage.charge_eff,
            "discharge_eff": scenario.storage.discharge_eff,
            "round_trip": scenario.storage.round_trip,
        },
        "county_defaults": {
            "water_price_per_l": scenario.county_defaults.water_price,
            "water_risk": scenario.county_defaults.water_risk,
            "water_risk_penalty": scenario.county_defaults.water_risk_penalty,
            "fiber_km": scenario.county_defaults.fiber_km,
            "trans_km": scenario.county_defaults.trans_km,
            "fiber_unit_cost_per_km": scenario.county_defaults.fiber_unit_cost,
            "transmission_unit_cost_per_mw_km":
                scenario.county_defaults.transmission_unit_cost,
            "substation_fixed": scenario.county_defaults.substation_fixed,
            "substation_slope_per_mw": scenario.county_defaults.substation_slope,
            "geothermal_cf": scenario.county_defaults.geothermal_cf,
        },
        "mode": scenario.mode,
    }
