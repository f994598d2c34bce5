#include "hessian_ot/exact.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace hessian_ot {

namespace mp = boost::multiprecision;

Integer dot(const LatticeVector& a, const LatticeVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  Integer s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rational dot(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rational dot(const LatticeVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += Rational(a[i]) * b[i];
  return s;
}

RationalVector to_rational(const LatticeVector& v) {
  RationalVector out;
  out.reserve(v.size());
  for (const auto& x : v) out.emplace_back(x);
  return out;
}

RationalMatrix to_rational(const IntegerMatrix& m) {
  RationalMatrix out;
  out.reserve(m.size());
  for (const auto& row : m) out.push_back(to_rational(row));
  return out;
}

bool is_integral(const RationalVector& v) {
  for (const auto& x : v)
    if (mp::denominator(x) != 1) return false;
  return true;
}

LatticeVector to_lattice(const RationalVector& v) {
  LatticeVector out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (mp::denominator(x) != 1) throw std::domain_error("vector is not integral");
    out.push_back(mp::numerator(x));
  }
  return out;
}

Integer gcd_of(const LatticeVector& v) {
  Integer g = 0;
  for (const auto& x : v) g = mp::gcd(g, x);
  return mp::abs(g);
}

bool is_primitive(const LatticeVector& v) { return gcd_of(v) == 1; }

Rational determinant(RationalMatrix m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

Integer determinant(const IntegerMatrix& in) {
  // Bareiss fraction-free elimination.
  IntegerMatrix m = in;
  const std::size_t n = m.size();
  if (n == 0) return 1;
  int sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[p], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> row_reduce(RationalMatrix& m, std::size_t columns) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < columns && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    Rational inv = 1 / m[r][c];
    for (std::size_t k = c; k < columns; ++k) m[r][k] *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (std::size_t k = c; k < columns; ++k) m[i][k] -= f * m[r][k];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

std::size_t rank(RationalMatrix m) {
  if (m.empty()) return 0;
  return row_reduce(m, m.front().size()).size();
}

std::optional<RationalVector> solve(RationalMatrix a, RationalVector b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("solve: dimension mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw std::invalid_argument("solve: matrix not square");
    a[i].push_back(b[i]);
  }
  auto pivots = row_reduce(a, n + 1);
  if (pivots.size() < n || pivots.back() >= n) return std::nullopt;
  RationalVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n];
  return x;
}

std::vector<RationalVector> nullspace(RationalMatrix a, std::size_t columns) {
  auto pivots = row_reduce(a, columns);
  std::vector<bool> is_pivot(columns, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<RationalVector> basis;
  for (std::size_t free = 0; free < columns; ++free) {
    if (is_pivot[free]) continue;
    RationalVector v(columns, Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

IntegerMatrix hermite_normal_form(IntegerMatrix rows) {
  if (rows.empty()) return rows;
  const std::size_t n = rows.front().size();
  std::size_t p = 0;
  for (std::size_t c = 0; c < n && p < rows.size(); ++c) {
    // Euclid on column c among rows p.. until a single nonzero remains.
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t r = p; r < rows.size(); ++r) {
        if (rows[r][c] == 0) continue;
        if (best == rows.size() || mp::abs(rows[r][c]) < mp::abs(rows[best][c])) best = r;
      }
      if (best == rows.size()) break;
      std::swap(rows[p], rows[best]);
      bool done = true;
      for (std::size_t r = p + 1; r < rows.size(); ++r) {
        if (rows[r][c] == 0) continue;
        Integer q = rows[r][c] / rows[p][c];
        for (std::size_t k = 0; k < n; ++k) rows[r][k] -= q * rows[p][k];
        if (rows[r][c] != 0) done = false;
      }
      if (done) break;
    }
    if (rows[p][c] == 0) continue;
    if (rows[p][c] < 0)
      for (auto& x : rows[p]) x = -x;
    for (std::size_t r = 0; r < p; ++r) {
      // floor division so that 0 <= entry < pivot
      Integer q = rows[r][c] / rows[p][c];
      if (rows[r][c] - q * rows[p][c] < 0) q -= 1;
      if (q != 0)
        for (std::size_t k = 0; k < n; ++k) rows[r][k] -= q * rows[p][k];
    }
    ++p;
  }
  rows.resize(p);
  return rows;
}

IntegerMatrix transpose(const IntegerMatrix& m) {
  if (m.empty()) return {};
  IntegerMatrix t(m.front().size(), LatticeVector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

RationalMatrix transpose(const RationalMatrix& m) {
  if (m.empty()) return {};
  RationalMatrix t(m.front().size(), RationalVector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.empty()) return {};
  const std::size_t inner = b.size();
  const std::size_t cols = b.empty() ? 0 : b.front().size();
  RationalMatrix out(a.size(), RationalVector(cols, Rational(0)));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != inner) throw std::invalid_argument("multiply: dimension mismatch");
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

std::optional<RationalMatrix> inverse(const RationalMatrix& m) {
  const std::size_t n = m.size();
  RationalMatrix aug(n, RationalVector(2 * n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw std::invalid_argument("inverse: matrix not square");
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = m[i][j];
    aug[i][n + i] = 1;
  }
  auto pivots = row_reduce(aug, 2 * n);
  if (pivots.size() < n || pivots[n - 1] >= n) return std::nullopt;
  RationalMatrix inv(n, RationalVector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
  return inv;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::vector<double> to_double(const RationalVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

std::vector<double> to_double(const LatticeVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.convert_to<double>());
  return out;
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::domain_error("rational_from_double: non-finite value");
  if (x == 0) return 0;
  int exponent = 0;
  double mantissa = std::frexp(x, &exponent);
  // mantissa * 2^53 is an exact integer
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational q{Integer(scaled)};
  if (exponent > 0) {
    Integer p = 1;
    p <<= exponent;
    q *= Rational(p);
  } else if (exponent < 0) {
    Integer p = 1;
    p <<= -exponent;
    q /= Rational(p);
  }
  return q;
}

std::string to_string(const Rational& q) {
  if (mp::denominator(q) == 1) return mp::numerator(q).str();
  return mp::numerator(q).str() + "/" + mp::denominator(q).str();
}

std::string to_string(const Integer& z) { return z.str(); }

namespace {

// Boost's GMP backend reads a leading '0' as an octal prefix.
Integer decimal_integer(const std::string& digits) {
  std::size_t first = digits.find_first_not_of('0');
  if (first == std::string::npos) return 0;
  return Integer(digits.substr(first));
}

}  // namespace

Rational parse_rational(const std::string& text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("malformed rational '" + text + "'");
  };
  if (text.empty()) return fail();
  auto parse_int = [&](const std::string& s) -> Integer {
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) fail();
    for (std::size_t k = i; k < s.size(); ++k)
      if (s[k] < '0' || s[k] > '9') fail();
    Integer z = decimal_integer(s.substr(i));
    return s[0] == '-' ? Integer(-z) : z;
  };
  if (auto slash = text.find('/'); slash != std::string::npos) {
    Integer num = parse_int(text.substr(0, slash));
    std::string den_text = text.substr(slash + 1);
    if (den_text.empty() || den_text[0] == '-' || den_text[0] == '+') fail();
    Integer den = parse_int(den_text);
    if (den == 0) fail();
    return Rational(num, den);
  }
  if (auto dot_pos = text.find('.'); dot_pos != std::string::npos) {
    std::string whole = text.substr(0, dot_pos);
    std::string frac = text.substr(dot_pos + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole = whole.substr(1);
    if (whole.empty() && frac.empty()) fail();
    for (char c : whole + frac)
      if (c < '0' || c > '9') fail();
    Integer num = decimal_integer(whole + frac);
    Integer den = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) den *= 10;
    Rational q(num, den);
    return negative ? Rational(-q) : q;
  }
  return Rational(parse_int(text));
}

}  // namespace hessian_ot
