#pragma once

// JSON forms of the library's value types.

#include <cstddef>

#include "json.hpp"
#include "ppt/bounds.hpp"
#include "ppt/core.hpp"
#include "ppt/transport.hpp"

namespace ppt {

using Json = nlohmann::json;

/// Finite doubles as numbers; +inf, -inf and NaN as the strings "inf", "-inf", "nan".
Json number_to_json(double v);
/// Accepts numbers and the strings above.
double number_from_json(const Json& j);

/// Array of coordinate arrays. With hex_floats the coordinates are C99
/// hexadecimal strings ("0x1.8p-1"), which round-trip bit for bit.
Json configuration_to_json(const Configuration& omega, bool hex_floats = false);
/// Accepts numbers or hexadecimal strings per coordinate. `dim` is used for the
/// empty configuration and checked against the atoms otherwise.
Configuration configuration_from_json(const Json& j, std::size_t dim = 0);

Json seed_to_json(const SeedSpec& s);
Json estimate_to_json(const Estimate& e);
Json bound_to_json(const BoundResult& b);
/// Sparse triplets [i, j, weight] for the nonzero weights.
Json plan_to_json(const TransportPlan& plan);

}  // namespace ppt
