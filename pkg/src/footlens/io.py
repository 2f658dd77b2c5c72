"""File formats: footprint geometry, facade naming, temporal CSV.

GeoJSON Polygon (exterior ring only) and WKT POLYGON are accepted for
footprints. WGS-84 input is projected to local meters with an
equirectangular projection about the footprint's mean latitude; projected
input is taken as meters as-is.
"""

import csv
import json
import re

import numpy as np

from .encoding import TemporalSeries
from .errors import InputError
from .geometry import FootprintPolygon

_EARTH_RADIUS = 6371008.8


def load_footprint(path, crs="meters", name="footprint"):
    """Read a footprint polygon from a GeoJSON or WKT file.

    Parameters
    ----------
    path : str
        File ending in .json/.geojson (GeoJSON) or anything else (WKT).
    crs : str
        'meters' for projected coordinates, 'wgs84' for lon/lat degrees.
    name : str
        Polygon identifier.

    Returns
    -------
    FootprintPolygon
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read footprint file: {exc}") from exc

    if path.endswith((".json", ".geojson")):
        ring = _ring_from_geojson(text, path)
    else:
        ring = _ring_from_wkt(text, path)

    ring = np.asarray(ring, dtype=float)
    if crs == "wgs84":
        ring = _project_wgs84(ring)
    elif crs != "meters":
        raise InputError(f"unknown crs {crs!r}; expected 'meters' or 'wgs84'")
    return FootprintPolygon(vertices=ring, name=name)


def _ring_from_geojson(text, path):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    geom = doc
    if geom.get("type") == "FeatureCollection":
        feats = geom.get("features") or []
        if not feats:
            raise InputError(f"{path}: empty FeatureCollection")
        geom = feats[0]
    if geom.get("type") == "Feature":
        geom = geom.get("geometry") or {}
    if geom.get("type") != "Polygon":
        raise InputError(f"{path}: expected a Polygon geometry, got "
                         f"{geom.get('type')!r}")
    rings = geom.get("coordinates") or []
    if not rings:
        raise InputError(f"{path}: Polygon has no rings")
    if len(rings) > 1:
        raise InputError(f"{path}: interior rings (holes) are unsupported")
    return rings[0]


def _ring_from_wkt(text, path):
    # Hole detection must precede the ring match: a second ring group also
    # breaks the exterior-ring pattern below.
    if re.search(r"\)\s*,\s*\(", text):
        raise InputError(f"{path}: interior rings (holes) are unsupported")
    m = re.search(r"POLYGON\s*\(\(([^)]*)\)\)", text, flags=re.IGNORECASE)
    if not m:
        raise InputError(f"{path}: no WKT POLYGON found")
    pts = []
    for token in m.group(1).split(","):
        parts = token.split()
        if len(parts) < 2:
            raise InputError(f"{path}: malformed WKT coordinate {token!r}")
        pts.append((float(parts[0]), float(parts[1])))
    return pts


def _project_wgs84(ring):
    lon = np.radians(ring[:, 0])
    lat = np.radians(ring[:, 1])
    lat0 = lat.mean()
    x = _EARTH_RADIUS * np.cos(lat0) * lon
    y = _EARTH_RADIUS * lat
    return np.column_stack([x - x.mean(), y - y.mean()])


def load_facade_names(polygon, path):
    """Display names for facades from a sidecar JSON {edge_index: name}.

    Facade identity stays the integer edge index everywhere; names only
    label output documents.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            mapping = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read facade map: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    n = polygon.n_vertices
    names = {}
    for key, value in mapping.items():
        try:
            k = int(key)
        except ValueError as exc:
            raise InputError(f"{path}: non-integer edge index {key!r}") from exc
        if not 0 <= k < n:
            raise InputError(f"{path}: edge index {k} out of range "
                             f"0..{n - 1}")
        names[k] = str(value)
    return names


def load_series_csv(path):
    """Read facade time series from CSV with header facade_id,time_index,value.

    Returns
    -------
    list of TemporalSeries
        One per facade_id, values ordered by time_index, facades sorted.
    """
    rows = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise InputError(f"{path}: empty CSV")
            expected = ["facade_id", "time_index", "value"]
            if [h.strip() for h in header] != expected:
                raise InputError(f"{path}: header must be "
                                 f"{','.join(expected)}, got {','.join(header)}")
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != 3:
                    raise InputError(f"{path}:{lineno}: expected 3 columns, "
                                     f"got {len(row)}")
                fac, tix, val = (c.strip() for c in row)
                try:
                    f = int(fac)
                except ValueError as exc:
                    raise InputError(f"{path}:{lineno}: bad facade_id "
                                     f"{fac!r}") from exc
                try:
                    t = int(tix)
                except ValueError as exc:
                    raise InputError(f"{path}:{lineno}: bad time_index "
                                     f"{tix!r}") from exc
                try:
                    v = float(val)
                except ValueError as exc:
                    raise InputError(f"{path}:{lineno}: bad value "
                                     f"{val!r}") from exc
                rows.append((f, t, v))
    except OSError as exc:
        raise InputError(f"cannot read series CSV: {exc}") from exc

    by_facade = {}
    for fac, t, v in rows:
        by_facade.setdefault(fac, {})
        if t in by_facade[fac]:
            raise InputError(f"{path}: duplicate (facade {fac!r}, time {t})")
        by_facade[fac][t] = v

    out = []
    for fac in sorted(by_facade):
        tmap = by_facade[fac]
        times = sorted(tmap)
        if times != list(range(len(times))):
            raise InputError(f"{path}: facade {fac} time indices must be "
                             f"0..{len(times) - 1} without gaps")
        out.append(TemporalSeries(facade_id=fac,
                                  values=np.array([tmap[t] for t in times])))
    return out
