"""Command-line pipeline: footprint + series in, lens documents out.

Writes layout.json, viewer.json, lens.svg and report.json into the output
directory. All artifacts are staged and renamed into place only after the
whole pipeline succeeds, so a failing run leaves no partial outputs.
Geometry documents are byte-stable across runs; report.json carries timings
and is the one deliberately unstable file.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .config import PipelineConfig, load_config_file, merge_config, \
    parse_filter
from .encoding import TemporalSeries, bind_series, export_layout_json, \
    filter_values, reorder
from .errors import FootlensError
from .geometry import distance_field, rasterize
from .io import load_facade_names, load_footprint, load_series_csv
from .partition import compute_cutlines, partition
from .ribbons import assemble_layout, layout_to_dict
from .scmap import diskmap_from_json, diskmap_to_json, solve_parameters
from .skeleton import extract_signature, skeletonize
from .svg_render import render_svg


def build_parser():
    ap = argparse.ArgumentParser(
        prog="footlens",
        description="Render a building footprint as a nested temporal lens.")
    ap.add_argument("--footprint", help="GeoJSON or WKT polygon file")
    ap.add_argument("--data", help="CSV of facade_id,time_index,value")
    ap.add_argument("--facades", help="JSON sidecar naming facade indices")
    ap.add_argument("--out", help="output directory (default: out)")
    ap.add_argument("--config", help="KEY=VALUE config file; flags win")
    ap.add_argument("--crs", choices=["meters", "wgs84"],
                    help="footprint coordinate system (default: meters)")
    ap.add_argument("--ribbons", type=int, help="ribbon count (default: 4)")
    ap.add_argument("--grid-res", type=int, dest="grid_res",
                    help="raster cells across the footprint (default: 512)")
    ap.add_argument("--quad-order", type=int, dest="quad_order",
                    help="quadrature points per panel (default: 8)")
    ap.add_argument("--max-vertices", type=int, dest="max_vertices",
                    help="per-subregion corner limit (default: 32)")
    ap.add_argument("--rays", type=int,
                    help="radial resolution per subregion (default: 720)")
    ap.add_argument("--order",
                    help="chrono | attribute:{mean,max,min} | wrap:K")
    ap.add_argument("--filter", help="LO:HI:P desaturates values outside "
                    "[LO, HI] to saturation*P")
    ap.add_argument("--two-tone", dest="two_tone", action="store_const",
                    const=True, help="split cells between palette stops")
    ap.add_argument("--glyphs", action="store_const", const=True,
                    help="draw time-direction markers on the SVG")
    ap.add_argument("--cyclic", action="store_const", const=True,
                    help="treat the series as cyclic (enables wrap:K)")
    ap.add_argument("--time-direction", dest="time_direction",
                    choices=["inner-earliest", "outer-earliest"],
                    help="where the earliest step sits (default: "
                    "inner-earliest)")
    ap.add_argument("--debug-dumps", dest="debug_dumps",
                    action="store_const", const=True,
                    help="write raster, skeleton, partition and graph dumps")
    ap.add_argument("--use-cache", dest="use_cache", action="store_const",
                    const=True, help="reuse solved maps keyed by geometry")
    ap.add_argument("--threads", type=int,
                    help="parallel map solves (default: 1)")
    ap.add_argument("--version", action="version",
                    version=f"%(prog)s {__version__}")
    return ap


class _Staged:
    """Write-then-rename output staging; nothing lands until commit()."""

    def __init__(self, root):
        self.root = root
        self.pending = []

    def stage(self, relpath, text):
        final = os.path.join(self.root, relpath)
        os.makedirs(os.path.dirname(final) or ".", exist_ok=True)
        tmp = final + ".part"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        self.pending.append((tmp, final))

    def commit(self):
        for tmp, final in self.pending:
            os.replace(tmp, final)
        self.pending = []

    def abort(self):
        for tmp, _ in self.pending:
            try:
                os.remove(tmp)
            except OSError:
                pass
        self.pending = []


def _polygon_key(polygon, quad_order, max_vertices):
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(polygon.vertices, dtype=float).tobytes())
    h.update(repr(list(polygon.facade_ids)).encode())
    h.update(f"q{quad_order}v{max_vertices}".encode())
    return h.hexdigest()[:20]


def _solve_maps(nodes, cfg, cache_dir):
    def solve_one(node):
        key = _polygon_key(node.polygon, cfg.quad_order, cfg.max_vertices)
        path = os.path.join(cache_dir, f"{key}.json") if cache_dir else None
        if path and os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                return node.id, diskmap_from_json(fh.read(),
                                                  polygon=node.polygon), True
        dm = solve_parameters(node.polygon, quadrature_order=cfg.quad_order,
                              max_vertices=cfg.max_vertices)
        if path:
            os.makedirs(cache_dir, exist_ok=True)
            tmp = path + ".part"
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(diskmap_to_json(dm))
            os.replace(tmp, path)
        return node.id, dm, False

    if cfg.threads > 1 and len(nodes) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(solve_one, nodes))
    else:
        results = [solve_one(n) for n in nodes]
    maps = {nid: dm for nid, dm, _ in results}
    hits = sum(1 for _, _, hit in results if hit)
    return maps, hits


def _pgm(values, maxval=255):
    arr = np.asarray(values)
    lines = [f"P2", f"{arr.shape[1]} {arr.shape[0]}", str(maxval)]
    for row in arr[::-1]:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def _debug_dumps(staged, grid, dist, skel, graph, cutlines):
    occ = np.where(grid.bits, 255, 0)
    staged.stage("debug/raster.pgm", _pgm(occ))
    dmax = float(dist.values.max()) or 1.0
    staged.stage("debug/distance.pgm",
                 _pgm(np.round(dist.values / dmax * 255)))
    staged.stage("debug/skeleton.pgm", _pgm(np.where(skel.cells, 255, 0)))

    feats = []
    for node in graph.nodes:
        ring = [[float(x), float(y)] for x, y in node.polygon.vertices]
        ring.append(ring[0])
        feats.append({"type": "Feature",
                      "properties": {"id": node.id,
                                     "facades": [str(f) for f in
                                                 node.polygon.facade_ids]},
                      "geometry": {"type": "Polygon",
                                   "coordinates": [ring]}})
    for i, cut in enumerate(cutlines):
        coords = [[float(x), float(y)] for x, y in cut.endpoints]
        feats.append({"type": "Feature",
                      "properties": {"cut": i, "radius": float(cut.radius)},
                      "geometry": {"type": "LineString",
                                   "coordinates": coords}})
    staged.stage("debug/partition.geojson",
                 json.dumps({"type": "FeatureCollection",
                             "features": feats}, sort_keys=True, indent=1))

    dot = ["digraph partition {"]
    for node in graph.nodes:
        dot.append(f'  "{node.id}";')
    for a, b, _ in graph.edges:
        dot.append(f'  "{a}" -> "{b}";')
    dot.append("}")
    staged.stage("debug/graph.dot", "\n".join(dot) + "\n")


def run_pipeline(cfg):
    """Execute the full pipeline for a validated config.

    Returns the report dict after committing all artifacts.
    """
    timings = {}
    t0 = time.perf_counter()

    footprint = load_footprint(cfg.footprint, crs=cfg.crs)
    names = load_facade_names(footprint, cfg.facades) if cfg.facades else {}
    series = load_series_csv(cfg.data)
    if cfg.cyclic:
        series = [TemporalSeries(s.facade_id, s.values, cyclic=True)
                  for s in series]
    timings["load"] = time.perf_counter() - t0

    t = time.perf_counter()
    grid = rasterize(footprint, resolution=cfg.grid_res)
    dist = distance_field(footprint, grid)
    skel = skeletonize(grid)
    sig = extract_signature(skel)
    timings["skeleton"] = time.perf_counter() - t

    t = time.perf_counter()
    cutlines = compute_cutlines(footprint, skel, sig, dist)
    graph = partition(footprint, cutlines)
    timings["partition"] = time.perf_counter() - t

    t = time.perf_counter()
    cache_dir = os.path.join(cfg.out, "cache") if cfg.use_cache else None
    maps, cache_hits = _solve_maps(graph.nodes, cfg, cache_dir)
    timings["maps"] = time.perf_counter() - t

    t = time.perf_counter()
    layout = assemble_layout(footprint, graph.nodes, maps, cutlines,
                             n_ribbons=cfg.ribbons, n_rays=cfg.rays)
    timings["layout"] = time.perf_counter() - t

    t = time.perf_counter()
    lens = bind_series(layout, series, time_direction=cfg.time_direction,
                       two_tone=cfg.two_tone)
    if cfg.order != "chrono":
        lens = reorder(lens, cfg.order)
    if cfg.filter is not None:
        lo, hi, p = parse_filter(cfg.filter)
        lens = filter_values(lens, lo, hi, p)
    svg = render_svg(lens, draw_glyphs=cfg.glyphs)
    layout_doc = layout_to_dict(layout)
    if names:
        layout_doc["facade_names"] = {str(k): names[k]
                                      for k in sorted(names)}
    timings["encode"] = time.perf_counter() - t

    staged = _Staged(cfg.out)
    try:
        staged.stage("layout.json", json.dumps(layout_doc, sort_keys=True,
                                               separators=(",", ":")) + "\n")
        staged.stage("viewer.json", export_layout_json(lens) + "\n")
        staged.stage("lens.svg", svg)
        if cfg.debug_dumps:
            _debug_dumps(staged, grid, dist, skel, graph, cutlines)
        report = {
            "version": __version__,
            "backend": BACKEND,
            "nodes": len(graph.nodes),
            "cutlines": len(cutlines),
            "cells": len(layout.cells),
            "ribbons": cfg.ribbons,
            "depth": float(layout.depth),
            "cache_hits": cache_hits,
            "warnings": list(layout.warnings),
            "timings": {k: round(v, 6) for k, v in timings.items()},
            "total_seconds": round(time.perf_counter() - t0, 6),
        }
        staged.stage("report.json", json.dumps(report, indent=2,
                                               sort_keys=True) + "\n")
        staged.commit()
    except BaseException:
        staged.abort()
        raise
    return report


def main(argv=None):
    args = build_parser().parse_args(argv)
    flag_values = {k: v for k, v in vars(args).items() if k != "config"}
    try:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = merge_config(file_values, flag_values)
        report = run_pipeline(cfg)
    except FootlensError as exc:
        print(f"footlens: error: {exc}", file=sys.stderr)
        return exc.exit_code
    print(f"footlens: {report['nodes']} subregions, {report['cells']} cells "
          f"-> {cfg.out} ({report['total_seconds']:.2f}s, "
          f"{report['backend']} backend)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
