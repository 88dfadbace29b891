#!/usr/bin/env python3
"""Generates the bundled network fixtures in data/.

City networks are synthetic: every line is a gentle arc across a disk and
wherever two lines cross, both share an interchange station at the crossing.
With X crossings over L lines, m - n = X - L, so arcs are added until that
difference matches; the remaining stations are spread along the arcs. Every
written document is checked for its sizes and for crossing-free edges.
Output is deterministic.
"""

import argparse
import json
import math
import pathlib
import random

PALETTE = ["#e3000f", "#a862a4", "#e20a16", "#009540", "#00a0e2", "#f49400",
           "#7a4b29", "#6a6a6a", "#0064b0", "#c6a700"]

CITIES = {
    # name: (n, m, lines, seed base)
    "montreal": (65, 66, 4, 100),
    "vienna": (90, 96, 6, 200),
    "washington": (97, 101, 6, 300),
    "sydney": (173, 181, 8, 400),
}


def bezier(p0, p1, p2, t):
    a = (1 - t) ** 2
    b = 2 * (1 - t) * t
    c = t ** 2
    return (a * p0[0] + b * p1[0] + c * p2[0], a * p0[1] + b * p1[1] + c * p2[1])


def seg_cross(a, b, c, d):
    """Proper crossing parameters (t, u) of ab and cd, or None."""
    rx, ry = b[0] - a[0], b[1] - a[1]
    sx, sy = d[0] - c[0], d[1] - c[1]
    den = rx * sy - ry * sx
    if abs(den) < 1e-12:
        return None
    qx, qy = c[0] - a[0], c[1] - a[1]
    t = (qx * sy - qy * sx) / den
    u = (qx * ry - qy * rx) / den
    if 1e-6 < t < 1 - 1e-6 and 1e-6 < u < 1 - 1e-6:
        return t, u
    return None


def random_arc(rng, radius):
    a = rng.uniform(0, 2 * math.pi)
    b = a + math.pi + rng.uniform(-1.0, 1.0)
    p0 = (radius * math.cos(a), radius * math.sin(a))
    p2 = (radius * rng.uniform(0.55, 1.0) * math.cos(b), radius * rng.uniform(0.55, 1.0) * math.sin(b))
    mid = ((p0[0] + p2[0]) / 2, (p0[1] + p2[1]) / 2)
    bend = radius * rng.uniform(-0.35, 0.35)
    dx, dy = p2[0] - p0[0], p2[1] - p0[1]
    ln = math.hypot(dx, dy)
    p1 = (mid[0] - dy / ln * bend, mid[1] + dx / ln * bend)
    return [bezier(p0, p1, p2, i / 200) for i in range(201)]


def curve_crossings(A, B):
    """Crossings of two dense polylines as (arc index a, t, arc index b, u, point)."""
    out = []
    for i in range(len(A) - 1):
        ax0, ax1 = min(A[i][0], A[i + 1][0]), max(A[i][0], A[i + 1][0])
        ay0, ay1 = min(A[i][1], A[i + 1][1]), max(A[i][1], A[i + 1][1])
        for j in range(len(B) - 1):
            if max(B[j][0], B[j + 1][0]) < ax0 or min(B[j][0], B[j + 1][0]) > ax1:
                continue
            if max(B[j][1], B[j + 1][1]) < ay0 or min(B[j][1], B[j + 1][1]) > ay1:
                continue
            r = seg_cross(A[i], A[i + 1], B[j], B[j + 1])
            if r:
                t, u = r
                p = (A[i][0] + t * (A[i + 1][0] - A[i][0]), A[i][1] + t * (A[i + 1][1] - A[i][1]))
                out.append((i + t, j + u, p))
    return out


def arc_position(curve, s):
    """Point at fractional dense index s."""
    i = min(int(s), len(curve) - 2)
    t = s - i
    a, b = curve[i], curve[i + 1]
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def try_city(n, m, nlines, seed):
    rng = random.Random(seed)
    radius = 10.0
    target = m - n  # = crossings - lines
    curves = [random_arc(rng, radius)]
    found = []  # (line a, s_a, line b, s_b, point)
    for _ in range(400):
        if len(found) - len(curves) == target and len(curves) >= nlines:
            break
        c = random_arc(rng, radius)
        new = []
        for li, other in enumerate(curves):
            for sa, sb, p in curve_crossings(other, c):
                new.append((li, sa, len(curves), sb, p))
        if len(found) + len(new) - (len(curves) + 1) > target:
            continue
        if not new:
            continue  # keep the network connected
        pts = [f[4] for f in found + new]
        if any(math.dist(pts[a], pts[b]) < 0.8 for a in range(len(pts)) for b in range(a + 1, len(pts))):
            continue
        curves.append(c)
        found.extend(new)
    else:
        return None
    if len(found) - len(curves) != target:
        return None
    crossings = len(found)
    regular = n - crossings

    # Anchors per line: endpoints and crossing positions, in dense index units.
    anchors = [[0.0, float(len(c) - 1)] for c in curves]
    for (la, sa, lb, sb, p) in found:
        anchors[la].append(sa)
        anchors[lb].append(sb)
    for a in anchors:
        a.sort()
    # Regular stations: the two endpoints of every line plus interior ones
    # spread over intervals in proportion to their length.
    interior = regular - 2 * len(curves)
    if interior < 0:
        return None
    intervals = []
    for li, a in enumerate(anchors):
        for k in range(len(a) - 1):
            intervals.append((li, a[k], a[k + 1]))
    total = sum(b - a for _, a, b in intervals)
    shares = [(b - a) / total * interior for _, a, b in intervals]
    counts = [int(x) for x in shares]
    rest = sorted(range(len(shares)), key=lambda i: -(shares[i] - counts[i]))
    for i in rest[: interior - sum(counts)]:
        counts[i] += 1
    lines = []
    for li, c in enumerate(curves):
        seq = []
        for (lj, a, b), cnt in zip(intervals, counts):
            if lj != li:
                continue
            seq.append(a)
            seq.extend(a + (b - a) * (q + 1) / (cnt + 1) for q in range(cnt))
        seq.append(float(len(c) - 1))
        lines.append([arc_position(c, s) for s in seq])
    # Crossing points must be reproduced exactly as shared stations.
    cross_pts = [f[4] for f in found]
    return lines, cross_pts


def assemble(prefix, lines, cross_pts):
    stations = []
    ids = {}
    snap = {}
    for p in cross_pts:
        snap[(round(p[0], 6), round(p[1], 6))] = p

    def key(p):
        return (round(p[0], 6), round(p[1], 6))

    def station(p):
        k = key(p)
        if k not in ids:
            sid = f"{prefix}{len(ids) + 1:03d}"
            ids[k] = sid
            stations.append({"id": sid, "name": f"{prefix.upper()} {len(ids)}", "x": k[0], "y": k[1]})
        return ids[k]

    out_lines = []
    for li, seq in enumerate(lines):
        out_lines.append({"id": f"L{li + 1}", "color": PALETTE[li % len(PALETTE)],
                          "stations": [station(p) for p in seq]})
    return {"stations": stations, "lines": out_lines}


def check(doc):
    """Counts and planarity of the written document."""
    pos = {s["id"]: (s["x"], s["y"]) for s in doc["stations"]}
    edges = set()
    for L in doc["lines"]:
        st = L["stations"]
        for a, b in zip(st, st[1:]):
            if a == b:
                return None
            edges.add(tuple(sorted((a, b))))
    edges = sorted(edges)
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            e, f = edges[i], edges[j]
            if set(e) & set(f):
                continue
            if seg_cross(pos[e[0]], pos[e[1]], pos[f[0]], pos[f[1]]):
                return None
    short = min(math.dist(pos[a], pos[b]) for a, b in edges)
    if short < 0.15:
        return None
    return len(doc["stations"]), len(edges)


def city(name, n, m, nlines, seed_base):
    for seed in range(seed_base, seed_base + 5000):
        r = try_city(n, m, nlines, seed)
        if r:
            doc = assemble(name[0], *r)
            if check(doc) == (n, m):
                return doc, seed
    raise SystemExit(f"no seed found for {name}")


def micro():
    return {
        "path3": {
            "stations": [{"id": "a", "name": "A", "x": 0, "y": 0},
                         {"id": "b", "name": "B", "x": 1.0, "y": 0.1},
                         {"id": "c", "name": "C", "x": 2.0, "y": 0.0}],
            "lines": [{"id": "1", "color": "#e3000f", "stations": ["a", "b", "c"]}],
        },
        "cross": {
            "stations": [{"id": "w", "name": "West", "x": 0, "y": 0},
                         {"id": "e", "name": "East", "x": 2, "y": 0.2},
                         {"id": "s", "name": "South", "x": 1.1, "y": -1},
                         {"id": "n", "name": "North", "x": 0.9, "y": 1.1}],
            "lines": [{"id": "red", "color": "#e3000f", "stations": ["w", "e"]},
                      {"id": "blue", "color": "#0064b0", "stations": ["s", "n"]}],
        },
        "star6": {
            "stations": [{"id": "hub", "name": "Hub", "x": 0, "y": 0}] + [
                {"id": f"s{i}", "name": f"Spoke {i}",
                 "x": round(2 * math.cos(math.radians(60 * i + 10)), 6),
                 "y": round(2 * math.sin(math.radians(60 * i + 10)), 6)} for i in range(6)],
            "lines": [{"id": "A", "color": "#e3000f", "stations": ["s0", "hub", "s3"]},
                      {"id": "B", "color": "#009540", "stations": ["s1", "hub", "s4"]},
                      {"id": "C", "color": "#0064b0", "stations": ["s2", "hub", "s5"]}],
        },
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[2] / "data"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, (n, m, nl, base) in CITIES.items():
        doc, seed = city(name, n, m, nl, base)
        (out / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print(f"{name}: n={n} m={m} lines={len(doc['lines'])} seed={seed}")
    for name, doc in micro().items():
        (out / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print(f"{name}: written")


if __name__ == "__main__":
    main()
