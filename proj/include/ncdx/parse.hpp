#pragma once

#include <string>

#include "ncdx/ratfunc.hpp"

namespace ncdx {

/// Parses the canonical expression grammar over x, u, z, t with integer
/// literals and + - * / ^ (nonnegative or negative integer exponents).
/// This is the inverse of RatFunc::str() / MPoly::str(), and is also used
/// for entries of matrices and operators in job documents.
RatFunc parse_ratfunc(const std::string &text, const Rat &u_scale = Rat(1));

/// Same grammar, but the result must be a polynomial (SchemaError otherwise).
MPoly parse_poly(const std::string &text);

} // namespace ncdx
