#pragma once

// Half-plane clipping of convex polygons and intervals, templated on the
// scalar so the same code runs over exact rationals and doubles. Every edge
// (or interval end) remembers which clipping line produced it; -1 marks the
// original boundary.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "hessian_ot/exact.hpp"

namespace hessian_ot::clip {

inline double as_double(double x) { return x; }
inline double as_double(const Rational& x) { return to_double(x); }

template <class T>
struct Point2 {
  T x, y;
  bool operator==(const Point2& o) const { return x == o.x && y == o.y; }
};

/// Edge i runs from vertices[i] to vertices[(i + 1) % n] and carries tags[i].
template <class T>
struct Polygon {
  std::vector<Point2<T>> vertices;
  std::vector<long> tags;
  bool empty() const { return vertices.size() < 3; }
};

/// Keeps the part of a convex polygon with ax * x + ay * y <= b.
template <class T>
Polygon<T> clip(const Polygon<T>& poly, const T& ax, const T& ay, const T& b, long tag) {
  Polygon<T> out;
  const std::size_t n = poly.vertices.size();
  if (n == 0) return out;
  auto emit = [&](Point2<T> p, long t) {
    if (!out.vertices.empty() && out.vertices.back() == p) {
      out.tags.back() = t;
      return;
    }
    out.vertices.push_back(std::move(p));
    out.tags.push_back(t);
  };
  std::vector<T> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = ax * poly.vertices[i].x + ay * poly.vertices[i].y - b;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const auto& p = poly.vertices[i];
    const auto& q = poly.vertices[j];
    const bool p_in = f[i] <= 0, q_in = f[j] <= 0;
    if (p_in) emit(p, poly.tags[i]);
    if (p_in != q_in) {
      T s = f[i] / (f[i] - f[j]);
      Point2<T> cut{p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)};
      emit(std::move(cut), p_in ? tag : poly.tags[i]);
    }
  }
  if (out.vertices.size() > 1 && out.vertices.back() == out.vertices.front()) {
    out.vertices.pop_back();
    out.tags.pop_back();
  }
  if (out.vertices.size() < 3) return {};
  return out;
}

template <class T>
T area(const Polygon<T>& poly) {
  T twice = 0;
  const std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly.vertices[i];
    const auto& b = poly.vertices[(i + 1) % n];
    twice += a.x * b.y - a.y * b.x;
  }
  return twice / 2;
}

/// Area centroid; the vertex average for degenerate polygons.
template <class T>
Point2<T> centroid(const Polygon<T>& poly) {
  const std::size_t n = poly.vertices.size();
  T twice = 0, cx = 0, cy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly.vertices[i];
    const auto& b = poly.vertices[(i + 1) % n];
    T cross = a.x * b.y - a.y * b.x;
    twice += cross;
    cx += (a.x + b.x) * cross;
    cy += (a.y + b.y) * cross;
  }
  if (twice == 0) {
    T sx = 0, sy = 0;
    for (const auto& v : poly.vertices) {
      sx += v.x;
      sy += v.y;
    }
    return {sx / T(static_cast<long>(n)), sy / T(static_cast<long>(n))};
  }
  return {cx / (3 * twice), cy / (3 * twice)};
}

/// Length of edge i in double precision.
template <class T>
double edge_length(const Polygon<T>& poly, std::size_t i) {
  const auto& a = poly.vertices[i];
  const auto& b = poly.vertices[(i + 1) % poly.vertices.size()];
  double dx = as_double(b.x - a.x), dy = as_double(b.y - a.y);
  return std::hypot(dx, dy);
}

template <class T>
struct Interval {
  T lo, hi;
  long lo_tag = -1, hi_tag = -1;
  bool empty() const { return !(lo < hi); }
};

/// Keeps the part of an interval with a * x <= b.
template <class T>
Interval<T> clip(Interval<T> iv, const T& a, const T& b, long tag) {
  if (a == 0) {
    if (b < 0) iv.hi = iv.lo;
    return iv;
  }
  T cut = b / a;
  if (a > 0) {
    if (cut < iv.hi) {
      iv.hi = cut;
      iv.hi_tag = tag;
    }
  } else if (cut > iv.lo) {
    iv.lo = cut;
    iv.lo_tag = tag;
  }
  return iv;
}

}  // namespace hessian_ot::clip
