"""Dataset parsers and derived per-county quantities.

File formats (UTF-8, comma-delimited, '.' decimal point):

  counties.csv     fips,name,lat,lon,climate_zone,water_price_per_l,water_risk,
                   fiber_km,trans_km,cap_solar_mw,cap_wind_mw,cap_geo_mw
                   (fiber_km/trans_km optional; computed from fiber nodes or
                   defaults when blank)
  profiles.csv     fips,series,hour,value   series in {solar_cf, wind_cf,
                   grid_price}; hour 0-based, length 96 or 8760 per series
  fiber_nodes.csv  node_id,lat,lon
  load.csv         hour,it_mw   (96 or 8760 rows)
"""

from __future__ import annotations

import csv
import hashlib
import logging
from dataclasses import dataclass, field, replace
from math import asin, cos, radians, sin, sqrt
from pathlib import Path
from typing import Optional

import numpy as np

from .domain import CountyRecord
from .scenario import CountyDefaults

log = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0
SEASONS = 4
SEASON_HOURS = 8760 // SEASONS            # 2190
SEASONAL_WEIGHT = 8760 / (SEASONS * 24.0)  # 91.25 days per representative day

PROFILE_SERIES = ("solar_cf", "wind_cf", "grid_price")
_CF_SERIES = {"solar_cf": "solar", "wind_cf": "wind"}


class IngestError(ValueError):
    """Schema or content problem in an input file."""


@dataclass(frozen=True)
class FiberNodeSet:
    """Backbone points with fiber connectivity (typically major cities)."""

    nodes: tuple  # (node_id, lat, lon)

    def __post_init__(self):
        nodes = tuple((str(n), float(lat), float(lon))
                      for n, lat, lon in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        for node_id, lat, lon in nodes:
            if not -90 <= lat <= 90 or not -180 <= lon <= 180:
                raise IngestError(
                    f"fiber node {node_id!r}: coordinates ({lat}, {lon}) "
                    "outside [-90,90] x [-180,180]")

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class CountyRegistry:
    """Ordered county records keyed by fips, plus source provenance."""

    counties: tuple = ()
    provenance: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "counties", tuple(self.counties))
        object.__setattr__(self, "provenance", tuple(self.provenance))
        seen = set()
        for rec in self.counties:
            if rec.fips in seen:
                raise IngestError(f"duplicate fips {rec.fips!r} in registry")
            seen.add(rec.fips)

    def __len__(self) -> int:
        return len(self.counties)

    def __iter__(self):
        return iter(self.counties)

    def get(self, fips: str) -> CountyRecord:
        for rec in self.counties:
            if rec.fips == fips:
                return rec
        raise KeyError(f"unknown fips {fips!r}")

    @property
    def fips_codes(self) -> tuple:
        return tuple(rec.fips for rec in self.counties)

    def subset(self, fips_codes) -> "CountyRegistry":
        wanted = list(fips_codes)
        missing = [f for f in wanted if f not in self.fips_codes]
        if missing:
            raise KeyError(f"unknown fips {missing}")
        return CountyRegistry(
            counties=tuple(r for r in self.counties if r.fips in wanted),
            provenance=self.provenance)

    def with_profiles(self, tables: "ProfileTables") -> "CountyRegistry":
        """Attach capacity factors and grid prices from a profiles table."""
        out = []
        for rec in self.counties:
            cfs = dict(rec.capacity_factors)
            price = rec.grid_price
            for (fips, series), values in tables.series.items():
                if fips != rec.fips:
                    continue
                if series in _CF_SERIES:
                    cfs[_CF_SERIES[series]] = tuple(values)
                elif series == "grid_price":
                    price = tuple(values)
            out.append(replace(rec, capacity_factors=cfs, grid_price=price))
        return CountyRegistry(counties=tuple(out),
                              provenance=self.provenance + tables.provenance)

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        for rec in self.counties:
            digest.update(repr((
                rec.fips, rec.name, rec.lat, rec.lon, rec.climate_zone,
                sorted(rec.vg_capacity.items()),
                sorted(rec.capacity_factors.items()),
                rec.grid_price, rec.water_price, rec.water_risk,
                rec.water_risk_penalty, rec.fiber_distance,
                rec.transmission_distance, rec.fiber_unit_cost,
                rec.transmission_unit_cost,
                (rec.substation.fixed, rec.substation.slope),
            )).encode())
        return digest.hexdigest()


@dataclass(frozen=True)
class ProfileTables:
    """Dense per-(fips, series) hourly values from profiles.csv."""

    series: dict = field(default_factory=dict)  # (fips, series) -> np.ndarray
    provenance: tuple = ()


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance on a 6371.0 km sphere."""
    phi1, lam1, phi2, lam2 = map(radians, (lat1, lon1, lat2, lon2))
    a = sin((phi2 - phi1) / 2.0) ** 2 + \
        cos(phi1) * cos(phi2) * sin((lam2 - lam1) / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * asin(min(1.0, sqrt(a)))


def nearest_fiber_distance(county: CountyRecord, nodes: FiberNodeSet) -> float:
    """Distance from the county centroid to the closest fiber node, km."""
    if len(nodes) == 0:
        raise IngestError("fiber node set is empty")
    return min(haversine_km(county.lat, county.lon, lat, lon)
               for _, lat, lon in nodes.nodes)


def aggregate_seasonal(hourly) -> np.ndarray:
    """Collapse an 8760-hour year into four 24-hour representative days.

    The year splits into four equal 2190-hour seasons (91.25 days). Days that
    straddle a season boundary contribute to both neighbors in proportion to
    the overlap, so each representative hour is a weighted hour-of-day mean
    with total weight exactly 91.25. That makes the reconstruction identity
    sum(output) * 91.25 == sum(input) hold to rounding for any input.
    """
    values = np.asarray(hourly, dtype=float)
    if values.shape != (8760,):
        raise IngestError(f"expected 8760 hourly values, got {values.shape}")
    days = values.reshape(365, 24)
    starts = np.arange(365) * 24.0
    out = np.empty((SEASONS, 24))
    for s in range(SEASONS):
        lo, hi = SEASON_HOURS * s, SEASON_HOURS * (s + 1)
        overlap = np.minimum(hi, starts + 24.0) - np.maximum(lo, starts)
        weights = np.clip(overlap, 0.0, 24.0) / 24.0
        out[s] = weights @ days / SEASONAL_WEIGHT
    return out.reshape(SEASONS * 24)


def _open_rows(path: Path):
    if not path.exists():
        raise IngestError(f"input file not found: {path}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


def _parse_float(text: str, path: Path, line: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise IngestError(
            f"{path}:{line}: column {column!r}: not a number: {text!r}")


def _optional_float(text: str, default: Optional[float], path: Path,
                    line: int, column: str) -> Optional[float]:
    if text is None or text.strip() == "":
        return default
    return _parse_float(text, path, line, column)


COUNTY_COLUMNS = ("fips", "name", "lat", "lon", "climate_zone",
                  "water_price_per_l", "water_risk", "fiber_km", "trans_km",
                  "cap_solar_mw", "cap_wind_mw", "cap_geo_mw")
_OPTIONAL_COUNTY_COLUMNS = {"water_price_per_l", "water_risk",
                            "fiber_km", "trans_km"}


def load_counties(path, defaults: Optional[CountyDefaults] = None,
                  fiber_nodes: Optional[FiberNodeSet] = None) -> CountyRegistry:
    """Parse counties.csv into a validated registry.

    Blank optional cells take scenario defaults; fiber_km is derived from the
    fiber node set when one is provided and the cell is blank.
    """
    path = Path(path)
    defaults = defaults or CountyDefaults()
    rows = _open_rows(path)
    if not rows:
        raise IngestError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    required = [c for c in COUNTY_COLUMNS if c not in _OPTIONAL_COUNTY_COLUMNS]
    missing = [c for c in required if c not in header]
    if missing:
        raise IngestError(f"{path}:1: missing required columns {missing}")
    unknown = [c for c in header if c not in COUNTY_COLUMNS]
    if unknown:
        raise IngestError(f"{path}:1: unknown columns {unknown}")
    idx = {c: header.index(c) for c in header}

    records = []
    seen = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise IngestError(
                f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")

        def cell(col):
            return row[idx[col]].strip() if col in idx else ""

        fips = cell("fips")
        if fips in seen:
            raise IngestError(
                f"{path}:{lineno}: duplicate fips {fips!r} "
                f"(first seen on line {seen[fips]})")
        seen[fips] = lineno

        caps = {}
        for col, tech in (("cap_solar_mw", "solar"), ("cap_wind_mw", "wind"),
                          ("cap_geo_mw", "geothermal")):
            value = _parse_float(cell(col), path, lineno, col)
            if value < 0:
                raise IngestError(
                    f"{path}:{lineno}: column {col!r}: negative capacity {value}")
            caps[tech] = value

        fiber_km = _optional_float(cell("fiber_km"), None, path, lineno,
                                   "fiber_km")
        lat = _parse_float(cell("lat"), path, lineno, "lat")
        lon = _parse_float(cell("lon"), path, lineno, "lon")
        if fiber_km is None:
            if fiber_nodes is not None and len(fiber_nodes) > 0:
                fiber_km = min(haversine_km(lat, lon, nlat, nlon)
                               for _, nlat, nlon in fiber_nodes.nodes)
            else:
                fiber_km = defaults.fiber_km
                log.warning("%s:%d: fiber_km missing for %s, using default %.1f",
                            path, lineno, fips, fiber_km)
        trans_km = _optional_float(cell("trans_km"), None, path, lineno,
                                   "trans_km")
        if trans_km is None:
            trans_km = defaults.trans_km
            log.warning("%s:%d: trans_km missing for %s, using default %.1f",
                        path, lineno, fips, trans_km)
        water_price = _optional_float(cell("water_price_per_l"), None, path,
                                      lineno, "water_price_per_l")
        if water_price is None:
            water_price = defaults.water_price
            log.warning("%s:%d: water price missing for %s, using default %g",
                        path, lineno, fips, water_price)
        water_risk = _optional_float(cell("water_risk"), None, path, lineno,
                                     "water_risk")
        if water_risk is None:
            water_risk = defaults.water_risk
            log.warning("%s:%d: water risk missing for %s, using default %g",
                        path, lineno, fips, water_risk)

        try:
            rec = CountyRecord(
                fips=fips,
                name=cell("name"),
                lat=lat,
                lon=lon,
                climate_zone=cell("climate_zone"),
                vg_capacity=caps,
                capacity_factors={"geothermal": defaults.geothermal_cf},
                water_price=water_price,
                water_risk=water_risk,
                water_risk_penalty=defaults.water_risk_penalty,
                fiber_distance=fiber_km,
                transmission_distance=trans_km,
                fiber_unit_cost=defaults.fiber_unit_cost,
                transmission_unit_cost=defaults.transmission_unit_cost,
                substation=defaults.substation(),
            )
        except ValueError as exc:
            raise IngestError(f"{path}:{lineno}: {exc}") from exc
        records.append(rec)

    return CountyRegistry(counties=tuple(records),
                          provenance=(str(path),))


def load_fiber_nodes(path) -> FiberNodeSet:
    path = Path(path)
    rows = _open_rows(path)
    if not rows or [h.strip() for h in rows[0]] != ["node_id", "lat", "lon"]:
        raise IngestError(f"{path}:1: expected header node_id,lat,lon")
    nodes = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise IngestError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
        nodes.append((row[0].strip(),
                      _parse_float(row[1], path, lineno, "lat"),
                      _parse_float(row[2], path, lineno, "lon")))
    try:
        return FiberNodeSet(nodes=tuple(nodes))
    except IngestError as exc:
        raise IngestError(f"{path}: {exc}") from exc


def load_profiles(path, registry: CountyRegistry) -> ProfileTables:
    """Parse long-format profiles.csv into dense 96-hour series.

    Series of length 8760 are aggregated to the 96 representative hours;
    series of length 96 pass through. Gaps, unknown counties, bad hours, and
    out-of-range values are rejected with their location.
    """
    path = Path(path)
    rows = _open_rows(path)
    if not rows or [h.strip() for h in rows[0]] != ["fips", "series", "hour",
                                                    "value"]:
        raise IngestError(f"{path}:1: expected header fips,series,hour,value")
    known = set(registry.fips_codes)
    collected: dict = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise IngestError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
        fips, series = row[0].strip(), row[1].strip()
        if fips not in known:
            raise IngestError(f"{path}:{lineno}: unknown fips {fips!r}")
        if series not in PROFILE_SERIES:
            raise IngestError(
                f"{path}:{lineno}: unknown series {series!r} "
                f"(expected one of {PROFILE_SERIES})")
        try:
            hour = int(row[2])
        except ValueError:
            raise IngestError(f"{path}:{lineno}: hour {row[2]!r} is not an integer")
        if not (0 <= hour < 8760):
            raise IngestError(f"{path}:{lineno}: hour {hour} outside 0..8759")
        value = _parse_float(row[3], path, lineno, "value")
        if series in _CF_SERIES and not (0.0 <= value <= 1.0):
            raise IngestError(
                f"{path}:{lineno}: capacity factor {value} outside [0, 1]")
        if series == "grid_price" and value < 0:
            raise IngestError(f"{path}:{lineno}: negative price {value}")
        key = (fips, series)
        hours = collected.setdefault(key, {})
        if hour in hours:
            raise IngestError(
                f"{path}:{lineno}: duplicate hour {hour} for {key}")
        hours[hour] = value

    dense: dict = {}
    for key, hours in collected.items():
        n = len(hours)
        if n not in (96, 8760):
            expected = 96 if n < 2000 else 8760
            missing = sorted(set(range(expected)) - set(hours))
            gap = missing[0] if missing else max(hours) + 1
            raise IngestError(
                f"{path}: series {key} has {n} hours, expected {expected}; "
                f"first missing hour {gap}")
        bad = sorted(h for h in hours if h >= n)
        if bad:
            raise IngestError(
                f"{path}: series {key} of length {n} has hour {bad[0]} "
                f"outside 0..{n - 1}")
        values = np.array([hours[h] for h in range(n)])
        if n == 8760:
            values = aggregate_seasonal(values)
        dense[key] = values
    return ProfileTables(series=dense, provenance=(str(path),))


def load_it_profile(path) -> np.ndarray:
    """Parse load.csv (hour,it_mw) into a 96-hour representative profile."""
    path = Path(path)
    rows = _open_rows(path)
    if not rows or [h.strip() for h in rows[0]] != ["hour", "it_mw"]:
        raise IngestError(f"{path}:1: expected header hour,it_mw")
    hours = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise IngestError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        try:
            hour = int(row[0])
        except ValueError:
            raise IngestError(f"{path}:{lineno}: hour {row[0]!r} is not an integer")
        value = _parse_float(row[1], path, lineno, "it_mw")
        if value < 0:
            raise IngestError(f"{path}:{lineno}: negative load {value}")
        if hour in hours:
            raise IngestError(f"{path}:{lineno}: duplicate hour {hour}")
        hours[hour] = value
    n = len(hours)
    if n not in (96, 8760):
        raise IngestError(f"{path}: expected 96 or 8760 rows, got {n}")
    missing = sorted(set(range(n)) - set(hours))
    if missing:
        raise IngestError(f"{path}: missing hour {missing[0]}")
    values = np.array([hours[h] for h in range(n)])
    if n == 8760:
        values = aggregate_seasonal(values)
    return values
