#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace polylab {

// Exact scalar for the algebraic identity tests; double is the default
// scalar everywhere else.
using Rational = boost::multiprecision::cpp_rational;

} // namespace polylab
