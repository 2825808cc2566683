"""Core value types shared by every other module.

All types are immutable after construction and validate their invariants
eagerly; a bad field raises ValueError naming the field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

VG_KIND = "vg"
GEO_KIND = "geothermal"
DISPATCHABLE_KIND = "dispatchable"

HOURS_PER_YEAR = 8760


def _require(cond: bool, field_name: str, message: str) -> None:
    if not cond:
        raise ValueError(f"{field_name}: {message}")


def capital_recovery_factor(discount_rate: float, years: int) -> float:
    """Annuity factor converting capital cost into an equivalent yearly stream.

    rho = delta (1 + delta)^Y / ((1 + delta)^Y - 1)
    """
    if discount_rate <= 0:
        raise ValueError(f"discount_rate: must be > 0, got {discount_rate}")
    if years < 1:
        raise ValueError(f"years: must be >= 1, got {years}")
    growth = (1.0 + discount_rate) ** years
    return discount_rate * growth / (growth - 1.0)


@dataclass(frozen=True)
class EconomicParams:
    years: int                       # project lifetime, years
    discount_rate: float             # fraction per year
    aggregation_weight: float        # days each representative day stands for
    export_price: float              # $/MWh paid for exported energy
    curtailment_penalty: float       # $/MWh
    weight_transmission: float = 1.0  # 0 disables grid energy + network capital terms
    weight_telecom: float = 1.0       # 0 disables fiber capital term
    weight_water: float = 1.0         # 0 disables water opex + risk terms
    penetration_fraction: float = 1.0  # cap on VG->load and storage->load share
    min_locations: int = 1
    reserve_multiplier: float = 1.0    # adequacy margin on the hourly balance
    headroom: float = 1.0              # contingency factor on the grid tie rating

    def __post_init__(self):
        _require(self.years >= 1, "years", f"must be >= 1, got {self.years}")
        _require(self.discount_rate > 0, "discount_rate",
                 f"must be > 0, got {self.discount_rate}")
        _require(self.aggregation_weight > 0, "aggregation_weight",
                 f"must be > 0, got {self.aggregation_weight}")
        _require(self.export_price >= 0, "export_price",
                 f"must be >= 0, got {self.export_price}")
        _require(self.curtailment_penalty >= 0, "curtailment_penalty",
                 f"must be >= 0, got {self.curtailment_penalty}")
        for name in ("weight_transmission", "weight_telecom", "weight_water"):
            _require(getattr(self, name) >= 0, name,
                     f"must be >= 0, got {getattr(self, name)}")
        _require(self.penetration_fraction >= 0, "penetration_fraction",
                 f"must be >= 0, got {self.penetration_fraction}")
        _require(self.min_locations >= 1, "min_locations",
                 f"must be >= 1, got {self.min_locations}")
        _require(self.reserve_multiplier >= 1, "reserve_multiplier",
                 f"must be >= 1, got {self.reserve_multiplier}")
        _require(self.headroom >= 1, "headroom",
                 f"must be >= 1, got {self.headroom}")

    @property
    def crf(self) -> float:
        return capital_recovery_factor(self.discount_rate, self.years)


@dataclass(frozen=True)
class LoadSpec:
    """IT load and the climate-dependent facility multipliers.

    The hourly profile is in IT MWh per representative hour; 96 entries for
    the canonical four-seasonal-day year, shorter in reduced test fixtures.
    """

    it_capacity: float                     # nameplate IT load, MW
    hourly_it_profile: tuple               # MWh per representative hour
    pue_by_climate: Mapping[str, float]    # climate zone -> kWh/kWh
    wue_by_climate: Mapping[str, float]    # climate zone -> L/kWh

    def __post_init__(self):
        profile = tuple(float(v) for v in self.hourly_it_profile)
        object.__setattr__(self, "hourly_it_profile", profile)
        _require(self.it_capacity >= 0, "it_capacity",
                 f"must be >= 0, got {self.it_capacity}")
        _require(len(profile) >= 1, "hourly_it_profile", "must be non-empty")
        for h, v in enumerate(profile):
            _require(v >= 0, "hourly_it_profile",
                     f"hour {h} is negative ({v})")
            _require(v <= self.it_capacity + 1e-9, "hourly_it_profile",
                     f"hour {h} ({v}) exceeds it_capacity ({self.it_capacity})")
        for zone, pue in self.pue_by_climate.items():
            _require(pue >= 1.0, "pue_by_climate",
                     f"zone {zone!r} has PUE {pue} < 1.0")
        for zone, wue in self.wue_by_climate.items():
            _require(wue >= 0.0, "wue_by_climate",
                     f"zone {zone!r} has WUE {wue} < 0")

    @property
    def n_hours(self) -> int:
        return len(self.hourly_it_profile)


def facility_demand(load: LoadSpec, climate_zone: str):
    """Facility energy (MWh) and water (L) per hour for one climate zone.

    Energy is the IT profile scaled by PUE; water is the IT profile in kWh
    scaled by WUE (the MWh -> kWh conversion happens here, never in the
    optimization model).
    """
    if climate_zone not in load.pue_by_climate:
        raise KeyError(f"climate zone {climate_zone!r} missing from pue_by_climate")
    if climate_zone not in load.wue_by_climate:
        raise KeyError(f"climate zone {climate_zone!r} missing from wue_by_climate")
    profile = np.asarray(load.hourly_it_profile, dtype=float)
    energy = load.pue_by_climate[climate_zone] * profile
    water = load.wue_by_climate[climate_zone] * profile * 1000.0
    return energy, water


@dataclass(frozen=True)
class VgTechParams:
    """Collocated plant parameters for solar, wind, and geothermal."""

    tech: str
    capex: float                     # $/MW
    fixed_om: float                  # $/MW-yr
    variable_om: float | tuple = 0.0  # $/MWh, scalar or per-hour sequence
    is_dispatchable: bool = False     # True only for geothermal-style plants

    def __post_init__(self):
        _require(bool(self.tech), "tech", "must be non-empty")
        _require(self.capex >= 0, "capex", f"must be >= 0, got {self.capex}")
        _require(self.fixed_om >= 0, "fixed_om",
                 f"must be >= 0, got {self.fixed_om}")
        if isinstance(self.variable_om, (int, float)):
            _require(self.variable_om >= 0, "variable_om",
                     f"must be >= 0, got {self.variable_om}")
        else:
            vom = tuple(float(v) for v in self.variable_om)
            object.__setattr__(self, "variable_om", vom)
            for h, v in enumerate(vom):
                _require(v >= 0, "variable_om", f"hour {h} is negative ({v})")

    def variable_om_at(self, hour: int) -> float:
        if isinstance(self.variable_om, tuple):
            return self.variable_om[hour]
        return float(self.variable_om)


@dataclass(frozen=True)
class DispatchableTechParams:
    """Fuel-based plant parameters (SMR, gas, diesel, biomass).

    capacity_mw is the catalog block size standing in for P^max; the paper
    symbols min/ramp/startup are all fractions of it.
    """

    tech: str
    capacity_mw: float               # block size, MW
    capex: float                     # $/MW
    fixed_om: float                  # $/MW-yr
    min_output_fraction: float       # P^min as fraction of capacity
    ramp_rate: float                 # MW/h as fraction of capacity
    startup_cost_fraction: float     # fraction of capex-valued block per start
    operating_cost_fraction: float   # fraction of capex per year, drives $/MWh

    def __post_init__(self):
        _require(bool(self.tech), "tech", "must be non-empty")
        _require(self.capacity_mw >= 0, "capacity_mw",
                 f"must be >= 0, got {self.capacity_mw}")
        _require(self.capex >= 0, "capex", f"must be >= 0, got {self.capex}")
        _require(self.fixed_om >= 0, "fixed_om",
                 f"must be >= 0, got {self.fixed_om}")
        _require(0 <= self.min_output_fraction <= 1, "min_output_fraction",
                 f"must be in [0, 1], got {self.min_output_fraction}")
        _require(self.ramp_rate > 0, "ramp_rate",
                 f"must be > 0, got {self.ramp_rate}")
        _require(self.startup_cost_fraction >= 0, "startup_cost_fraction",
                 f"must be >= 0, got {self.startup_cost_fraction}")
        _require(self.operating_cost_fraction >= 0, "operating_cost_fraction",
                 f"must be >= 0, got {self.operating_cost_fraction}")

    @property
    def variable_om(self) -> float:
        """$/MWh equivalent of the yearly operating-cost fraction.

        A plant at full output all year spends operating_cost_fraction * capex
        per MW, spread over 8760 MWh.
        """
        return self.operating_cost_fraction * self.capex / HOURS_PER_YEAR


@dataclass(frozen=True)
class StorageParams:
    capacity: float                  # usable energy, MWh
    max_charge_rate: float           # fraction of capacity per hour
    max_discharge_rate: float        # fraction of capacity per hour
    min_soc: float = 0.0             # MWh
    self_discharge: float = 0.0      # fraction lost per hour
    charge_eff: float = 1.0
    discharge_eff: float = 1.0
    round_trip: Optional[float] = None  # consistency check only

    def __post_init__(self):
        _require(self.capacity >= 0, "capacity",
                 f"must be >= 0, got {self.capacity}")
        _require(self.max_charge_rate >= 0, "max_charge_rate",
                 f"must be >= 0, got {self.max_charge_rate}")
        _require(self.max_discharge_rate >= 0, "max_discharge_rate",
                 f"must be >= 0, got {self.max_discharge_rate}")
        _require(0 <= self.min_soc <= self.capacity, "min_soc",
                 f"must be in [0, capacity], got {self.min_soc}")
        _require(0 <= self.self_discharge < 1, "self_discharge",
                 f"must be in [0, 1), got {self.self_discharge}")
        _require(0 < self.charge_eff <= 1, "charge_eff",
                 f"must be in (0, 1], got {self.charge_eff}")
        _require(0 < self.discharge_eff <= 1, "discharge_eff",
                 f"must be in (0, 1], got {self.discharge_eff}")
        if self.round_trip is not None:
            implied = self.charge_eff * self.discharge_eff
            _require(abs(implied - self.round_trip) <= 0.05, "round_trip",
                     f"inconsistent with charge_eff*discharge_eff={implied:.4f}")


@dataclass(frozen=True)
class SubstationCost:
    """Substation build cost as fixed + slope * transmission rating."""

    fixed: float = 0.0               # $
    slope: float = 0.0               # $/MW

    def __post_init__(self):
        _require(self.fixed >= 0, "fixed", f"must be >= 0, got {self.fixed}")
        _require(self.slope >= 0, "slope", f"must be >= 0, got {self.slope}")


@dataclass(frozen=True)
class CountyRecord:
    """One candidate location with its resource, price, and network data.

    capacity_factors and grid_price usually arrive via the profiles table;
    records parsed from counties.csv alone carry None until merged.
    """

    fips: str
    name: str
    lat: float
    lon: float
    climate_zone: str
    vg_capacity: Mapping[str, float] = field(default_factory=dict)   # tech -> MW
    capacity_factors: Mapping[str, object] = field(default_factory=dict)  # tech -> array or scalar
    grid_price: Optional[tuple] = None       # $/MWh per hour
    water_price: float = 0.0                 # $/L
    water_risk: float = 0.0                  # dimensionless index
    water_risk_penalty: float = 0.0          # $ per risk unit
    fiber_distance: float = 0.0              # km
    transmission_distance: float = 0.0       # km
    fiber_unit_cost: float = 0.0             # $/km
    transmission_unit_cost: float = 0.0      # $/(MW km)
    substation: SubstationCost = field(default_factory=SubstationCost)

    def __post_init__(self):
        _require(bool(self.fips), "fips", "must be non-empty")
        _require(-90 <= self.lat <= 90, "lat", f"out of range: {self.lat}")
        _require(-180 <= self.lon <= 180, "lon", f"out of range: {self.lon}")
        caps = {t: float(v) for t, v in self.vg_capacity.items()}
        object.__setattr__(self, "vg_capacity", caps)
        for tech, cap in caps.items():
            _require(cap >= 0, "vg_capacity",
                     f"tech {tech!r} capacity {cap} is negative")
        cfs = {}
        for tech, cf in self.capacity_factors.items():
            if np.isscalar(cf):
                values = np.asarray([float(cf)])
                cfs[tech] = float(cf)
            else:
                arr = np.asarray(cf, dtype=float)
                values = arr
                cfs[tech] = tuple(arr.tolist())
            bad = np.where((values < 0) | (values > 1))[0]
            _require(bad.size == 0, "capacity_factors",
                     f"tech {tech!r} value {values[bad[0]] if bad.size else 0} "
                     "outside [0, 1]")
        object.__setattr__(self, "capacity_factors", cfs)
        if self.grid_price is not None:
            prices = tuple(float(v) for v in self.grid_price)
            object.__setattr__(self, "grid_price", prices)
            for h, p in enumerate(prices):
                _require(p >= 0, "grid_price", f"hour {h} is negative ({p})")
        for name in ("water_price", "water_risk", "water_risk_penalty",
                     "fiber_distance", "transmission_distance",
                     "fiber_unit_cost", "transmission_unit_cost"):
            _require(getattr(self, name) >= 0, name,
                     f"must be >= 0, got {getattr(self, name)}")

    def capacity_factor_series(self, tech: str, n_hours: int) -> np.ndarray:
        """Dense per-hour capacity factors; scalars broadcast to the horizon."""
        cf = self.capacity_factors.get(tech)
        if cf is None:
            raise KeyError(f"county {self.fips}: no capacity factors for {tech!r}")
        if isinstance(cf, tuple):
            arr = np.asarray(cf, dtype=float)
            if arr.size != n_hours:
                raise ValueError(
                    f"county {self.fips}: {tech} capacity-factor series has "
                    f"{arr.size} hours, expected {n_hours}")
            return arr
        return np.full(n_hours, float(cf))


@dataclass(frozen=True)
class CostBreakdown:
    """Objective decomposition; values() sum to the objective exactly."""

    components: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "components",
                           dict(sorted(self.components.items())))

    def total(self) -> float:
        return float(sum(self.components.values()))

    def get(self, key: str, default: float = 0.0) -> float:
        return self.components.get(key, default)

    def capital_total(self) -> float:
        return float(sum(v for k, v in self.components.items()
                         if k.startswith("capital_")))


@dataclass(frozen=True)
class DispatchSolution:
    """Per-hour dispatch, sized capacities, and the cost decomposition."""

    fips: str
    status: str
    objective: float
    breakdown: CostBreakdown
    n_hours: int
    to_load: Mapping[str, np.ndarray]       # tech -> MWh to the facility
    to_storage: Mapping[str, np.ndarray]    # VG tech -> MWh into storage
    exported: Mapping[str, np.ndarray]      # VG tech -> MWh exported
    curtailed: Mapping[str, np.ndarray]     # VG tech -> MWh curtailed
    grid_import: np.ndarray                 # MWh per hour
    storage_charge: np.ndarray
    storage_discharge: np.ndarray
    storage_soc: np.ndarray
    commitment: Mapping[str, np.ndarray]    # dispatchable tech -> {0,1}
    startups: Mapping[str, np.ndarray]      # dispatchable tech -> [0,1]
    built_capacity: Mapping[str, float]     # tech -> MW
    transmission_rating: float              # MW
    gap: float = 0.0

    def __post_init__(self):
        rel = max(1.0, abs(self.objective))
        delta = abs(self.breakdown.total() - self.objective) / rel
        _require(delta <= 1e-6, "breakdown",
                 f"components sum differs from objective by {delta:.2e} relative")

    def vg_load_energy(self, vg_techs: Sequence[str]) -> float:
        """Energy serving the load from VG plus storage discharge, MWh."""
        direct = sum(float(self.to_load[t].sum()) for t in vg_techs
                     if t in self.to_load)
        return direct + float(self.storage_discharge.sum())


@dataclass(frozen=True)
class CountyOutcome:
    """Result of one county subproblem inside a SitingResult."""

    fips: str
    status: str                       # optimal | infeasible | gap_limit | ...
    objective: Optional[float]
    breakdown: Optional[CostBreakdown]
    solution: Optional[DispatchSolution]
    gap: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.objective is not None


@dataclass(frozen=True)
class SitingResult:
    outcomes: tuple                   # CountyOutcome per county, registry order
    selected: tuple                   # fips with x_l = 1
    fingerprint: str
    all_infeasible: bool = False

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        object.__setattr__(self, "selected", tuple(self.selected))

    @property
    def aggregate_objective(self) -> Optional[float]:
        if self.all_infeasible:
            return None
        chosen = {o.fips: o for o in self.outcomes}
        return float(sum(chosen[f].objective for f in self.selected))

    def outcome(self, fips: str) -> CountyOutcome:
        for o in self.outcomes:
            if o.fips == fips:
                return o
        raise KeyError(f"no outcome for county {fips!r}")
