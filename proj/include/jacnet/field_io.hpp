#pragma once

#include <string>

#include "jacnet/field.hpp"

namespace jacnet {

/// JSON object {d_in, d_out, hidden, activation:{kind, epsilon?, k?},
/// w1:[[...]], b1:[...], w2:[[...]], b2:[...]} with full fp64 round-trip
/// precision.
std::string field_to_json(const JacobianField& f);
JacobianField field_from_json(const std::string& text);

void save_field(const JacobianField& f, const std::string& path);
JacobianField load_field(const std::string& path);

}  // namespace jacnet
