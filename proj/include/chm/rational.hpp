#pragma once
/**
 * @file rational.hpp
 * @brief Exact rational arithmetic used for simplicial weights.
 */

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace chm {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact conversion; every finite double is dyadic.
inline Rational rational_from_double(double x) { return Rational(x); }

inline std::string rational_str(const Rational& r) { return r.str(); }

}  // namespace chm
