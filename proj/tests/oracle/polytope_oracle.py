"""Reference computations for 3D reflexive polytopes using exact fractions.

Independent of the C++ library: facets by cross products, facet volumes as
3 * vol(cone over the facet), Star sums by direct incidence.
"""
import itertools
import json
import sys
from fractions import Fraction


def cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def facets(points):
    pts = sorted(set(map(tuple, points)))
    found = {}
    for a, b, c in itertools.combinations(pts, 3):
        n = cross(sub(b, a), sub(c, a))
        if n == (0, 0, 0):
            continue
        off = dot(n, a)
        vals = [dot(n, p) - off for p in pts]
        if all(v <= 0 for v in vals):
            pass
        elif all(v >= 0 for v in vals):
            n = tuple(-x for x in n)
            off = -off
        else:
            continue
        on = frozenset(p for p, v in zip(pts, vals) if v == 0)
        found[on] = (n, off)
    return found


def vertices(points):
    fs = facets(points)
    out = set()
    for on in fs:
        for p in on:
            inc = [fs[f][0] for f in fs if p in f]
            # rank 3 iff some triple of incident normals is independent
            if any(dot(cross(x, y), z) != 0 for x, y, z in itertools.combinations(inc, 3)):
                out.add(p)
    return out


def reflexive_normals(points):
    """Map facet vertex set -> integral normal n with <n, x> = 1, or None."""
    verts = vertices(points)
    if len(verts) < 4:
        return None
    result = {}
    for on, (n, off) in facets(points).items():
        if off <= 0:
            return None
        q = [Fraction(x, off) for x in n]
        if any(x.denominator != 1 for x in q):
            return None
        result[frozenset(on & verts)] = tuple(int(x) for x in q)
    return result


def polygon_cone_volume(face_pts):
    """|det| sum over a fan triangulation: 3 * vol(conv(0, face))."""
    pts = list(face_pts)
    c = tuple(Fraction(sum(p[i] for p in pts), len(pts)) for i in range(3))
    n = cross(sub(pts[1], pts[0]), sub(pts[2], pts[0]))
    if len(pts) > 3:
        for a, b, d in itertools.combinations(pts, 3):
            n = cross(sub(b, a), sub(d, a))
            if n != (0, 0, 0):
                break
    # orthonormal-free angular order: project to plane using two axes
    ax = max(range(3), key=lambda i: abs(n[i]))
    u, v = [i for i in range(3) if i != ax]
    import math
    pts.sort(key=lambda p: math.atan2(float(p[v] - c[v]), float(p[u] - c[u])))
    total = Fraction(0)
    for i in range(1, len(pts) - 1):
        total += abs(dot(pts[0], cross(pts[i], pts[i + 1])))
    return total / 2


def analyse(points):
    nd = reflexive_normals(points)
    if nd is None:
        return {"reflexive": False}
    verts = sorted(vertices(points))
    dual_pts = list(nd.values())
    dd = reflexive_normals(dual_pts)
    assert dd is not None
    mu = {f: polygon_cone_volume(f) for f in nd}
    tot = sum(mu.values())
    mu = {f: w / tot for f, w in mu.items()}
    nu = {f: polygon_cone_volume(f) for f in dd}
    tot = sum(nu.values())
    nu = {f: w / tot for f, w in nu.items()}
    # facet tau of the dual <-> vertex m_tau of the original
    checks = []
    for tau, m in dd.items():
        lhs = nu[tau]
        rhs = sum(w for f, w in mu.items() if m in f)
        checks.append(("dual", m, lhs, rhs))
    for sigma, n in nd.items():
        lhs = mu[sigma]
        rhs = sum(w for f, w in nu.items() if n in f)
        checks.append(("primal", n, lhs, rhs))
    violations = [c for c in checks if c[2] > c[3]]
    equalities = [c for c in checks if c[2] == c[3]]
    li = all(dot(m, n) != 0 for m in verts for n in dual_pts)
    return {
        "reflexive": True,
        "vertices": len(verts),
        "facets": len(nd),
        "li": li,
        "structural_ok": not violations,
        "violations": len(violations),
        "equalities": len(equalities),
        "worst": None if not violations else max(violations, key=lambda c: c[2] - c[3]),
        "mu": sorted(mu.values()),
    }


if __name__ == "__main__":
    import ast
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        name, pts = line.split(":", 1)
        res = analyse(ast.literal_eval(pts))
        print(name, {k: (str(v) if isinstance(v, (Fraction, tuple)) else v) for k, v in res.items() if k != "mu"})


def analyse_full(points):
    """JSON-friendly summary with every inequality and all facet weights."""
    nd = reflexive_normals(points)
    if nd is None:
        return {"reflexive": False}
    verts = sorted(vertices(points))
    dual_pts = list(nd.values())
    dd = reflexive_normals(dual_pts)
    weights = {}
    for name, faces in (("mu", nd), ("nu", dd)):
        raw = {f: polygon_cone_volume(f) for f in faces}
        tot = sum(raw.values())
        weights[name] = {f: w / tot for f, w in raw.items()}
    mu, nu = weights["mu"], weights["nu"]
    rows = []
    for tau, m in dd.items():
        rows.append(("tau", m, nu[tau], sum(w for f, w in mu.items() if m in f)))
    for sigma, n in nd.items():
        rows.append(("sigma", n, mu[sigma], sum(w for f, w in nu.items() if n in f)))
    viol = [r for r in rows if r[2] > r[3]]
    worst_slack = max((r[2] - r[3] for r in viol), default=None)
    return {
        "reflexive": True,
        "vertices": len(verts),
        "facets": len(nd),
        "dual_facets": len(dd),
        "li": all(dot(m, n) != 0 for m in verts for n in dual_pts),
        "structural_ok": not viol,
        "equalities": sum(1 for r in rows if r[2] == r[3]),
        "violations": [{"kind": k, "vertex": list(v), "lhs": str(l), "rhs": str(r)} for k, v, l, r in viol],
        "worst_slack": None if worst_slack is None else str(worst_slack),
        "facet_weights": sorted(str(w) for w in mu.values()),
        "facet_volumes": sorted(str(polygon_cone_volume(f)) for f in nd),
    }
