"""Regenerate the viewer test fixtures from the footlens CLI.

The TypeScript tests compare the viewer's recomputed cell colors against
the renderer without needing Python at test time, so the expected values
are frozen here: one base viewer document plus the documents produced by
a batch of (ordering, filter) flag combinations. Rerun after any change
to the encoding pipeline:

    python3 scripts/make_fixtures.py

Requires an installed footlens (pip install -e ../.. or equivalent).
"""

import json
import math
import random
import shutil
import tempfile
from pathlib import Path

from footlens.cli import main as footlens_main

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "test" / "fixtures"

SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]

# One series per facade, one value per season; exactly representable
# binary fractions so CSV text, JSON, and IEEE doubles all agree.
SEASONS = {
    0: [1.0, 3.5, 2.25, 0.5],
    1: [2.0, 4.75, 3.0, 1.25],
    2: [0.25, 1.5, 5.0, 2.75],
    3: [3.25, 6.0, 4.5, 2.5],
}

# Mirrors the viewer's legend: seven equal value bins, one per palette
# stop, suppressed at this saturation factor when toggled off.
LEGEND_P = 0.25


def write_inputs(tmp):
    fp = tmp / "square.geojson"
    ring = SQUARE + [SQUARE[0]]
    fp.write_text(json.dumps({"type": "Polygon", "coordinates": [ring]}))
    csv = tmp / "seasons.csv"
    rows = ["facade_id,time_index,value"]
    for facade, values in sorted(SEASONS.items()):
        for t, v in enumerate(values):
            rows.append(f"{facade},{t},{v!r}")
    csv.write_text("\n".join(rows) + "\n")
    return fp, csv


def run_cli(tmp, fp, csv, extra):
    out = tmp / "out"
    if out.exists():
        shutil.rmtree(out)
    args = ["--footprint", str(fp), "--data", str(csv), "--out", str(out),
            "--grid-res", "128", "--rays", "180", "--cyclic"] + extra
    rc = footlens_main(args)
    if rc != 0:
        raise SystemExit(f"footlens exited {rc} for {extra}")
    return json.loads((out / "viewer.json").read_text())


def cell_colors(doc):
    colors = {}
    for cell in doc["cells"]:
        assert len(cell["parts"]) == 1, "expected flat cells"
        colors[f"{cell['ribbon']},{cell['facade']}"] = cell["parts"][0]["color"]
    return colors


def state_flags(order, filt):
    extra = ["--order", order]
    if filt is not None:
        lo, hi, p = filt
        extra += ["--filter", f"{lo!r}:{hi!r}:{p!r}"]
    return extra


def random_states(rng, count):
    orders = ["chrono", "attribute:mean", "attribute:max", "attribute:min",
              "wrap:1", "wrap:2", "wrap:3"]
    states = []
    for _ in range(count):
        order = rng.choice(orders)
        if rng.random() < 0.3:
            filt = None
        else:
            a = round(rng.uniform(0.0, 6.5), 2)
            b = round(rng.uniform(0.0, 6.5), 2)
            lo, hi = min(a, b), max(a, b)
            p = round(rng.uniform(0.0, 1.0), 2)
            filt = [lo, hi, p]
        states.append((order, filt))
    return states


def legend_filter(vmin, vmax, first_on, last_on):
    # Same arithmetic, in the same order, as the viewer's legendFilter.
    w = (vmax - vmin) / 7.0
    lo = vmin if first_on == 0 else vmin + first_on * w
    hi = vmax if last_on == 6 else vmin + (last_on + 1) * w
    return [lo, hi, LEGEND_P]


def main():
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as td:
        tmp = Path(td)
        fp, csv = write_inputs(tmp)

        base = run_cli(tmp, fp, csv, [])
        (FIXTURE_DIR / "square_viewer.json").write_text(
            json.dumps(base, sort_keys=True, separators=(",", ":")))

        vmin = base["normalization"]["vmin"]
        vmax = base["normalization"]["vmax"]
        rng = random.Random(7)
        randomized = random_states(rng, 20)
        fixed = [("chrono", None),
                 ("wrap:1", None),
                 ("attribute:mean", None),
                 ("chrono", [2.0, 5.0, 1.0]),
                 ("chrono", legend_filter(vmin, vmax, 1, 6))]

        def freeze(order, filt):
            doc = run_cli(tmp, fp, csv, state_flags(order, filt))
            return {"order": order, "filter": filt,
                    "assignment": doc["assignment"],
                    "colors": cell_colors(doc)}

        states = {
            "random_states": [freeze(o, f) for o, f in randomized],
            "fixed_states": [freeze(o, f) for o, f in fixed],
        }
        (FIXTURE_DIR / "cli_states.json").write_text(
            json.dumps(states, sort_keys=True, separators=(",", ":")))

        # Two-tone split expectations: bin stop colors plus the in-bin
        # fraction that decides where the cell's arc is divided.
        from footlens.encoding import EncodedLens, TemporalSeries, two_tone_parts

        def tt_table(filter_range):
            series = {f: TemporalSeries(facade_id=f, values=v, cyclic=True)
                      for f, v in SEASONS.items()}
            lens = EncodedLens(layout=None, series=series,
                               assignment=tuple(base["assignment"]),
                               vmin=vmin, vmax=vmax, two_tone=True,
                               filter_range=filter_range, cyclic=True)
            table = {}
            for ribbon in range(4):
                for facade in SEASONS:
                    lo, hi, f = two_tone_parts(lens, ribbon, facade)
                    table[f"{ribbon},{facade}"] = [lo, hi, f]
            return table

        two_tone = {"plain": tt_table(None),
                    "filtered": tt_table((1.5, 4.0, 0.3))}
        (FIXTURE_DIR / "two_tone.json").write_text(
            json.dumps(two_tone, sort_keys=True, separators=(",", ":")))

    print(f"fixtures written to {FIXTURE_DIR}")


if __name__ == "__main__":
    main()
