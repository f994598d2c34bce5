#pragma once

// Exact integer/rational arithmetic and the small dense linear algebra the
// lattice code needs. Matrices are row-major vectors of rows.

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace hessian_ot {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

using LatticeVector = std::vector<Integer>;
using RationalVector = std::vector<Rational>;
using IntegerMatrix = std::vector<LatticeVector>;
using RationalMatrix = std::vector<RationalVector>;

Integer dot(const LatticeVector& a, const LatticeVector& b);
Rational dot(const RationalVector& a, const RationalVector& b);
Rational dot(const LatticeVector& a, const RationalVector& b);

RationalVector to_rational(const LatticeVector& v);
RationalMatrix to_rational(const IntegerMatrix& m);
bool is_integral(const RationalVector& v);
// Throws std::domain_error when some entry has a nontrivial denominator.
LatticeVector to_lattice(const RationalVector& v);

Integer gcd_of(const LatticeVector& v);
bool is_primitive(const LatticeVector& v);

Rational determinant(RationalMatrix m);
Integer determinant(const IntegerMatrix& m);

std::size_t rank(RationalMatrix m);

/// Unique solution of A x = b, or nullopt when A is singular. A must be square.
std::optional<RationalVector> solve(RationalMatrix a, RationalVector b);

/// Basis of the right null space {x : A x = 0} over Q. `columns` is needed
/// when A has no rows.
std::vector<RationalVector> nullspace(RationalMatrix a, std::size_t columns);

/// Row-style Hermite normal form of the lattice spanned by the rows.
/// Zero rows are dropped; the result is unique for the row lattice.
IntegerMatrix hermite_normal_form(IntegerMatrix rows);

/// Matrix transpose / product helpers for small exact matrices.
IntegerMatrix transpose(const IntegerMatrix& m);
RationalMatrix transpose(const RationalMatrix& m);
RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b);
std::optional<RationalMatrix> inverse(const RationalMatrix& m);

double to_double(const Rational& q);
std::vector<double> to_double(const RationalVector& v);
std::vector<double> to_double(const LatticeVector& v);

/// Exact value of a finite double (every finite double is dyadic).
Rational rational_from_double(double x);

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

/// Parses "p", "p/q", or a decimal literal such as "-0.125" exactly.
/// Throws std::invalid_argument on malformed text.
Rational parse_rational(const std::string& text);

}  // namespace hessian_ot
