#pragma once

#include <json.hpp>

#include "pairing/families.hpp"

namespace pairing {

// All integers are lowercase 0x-prefixed hex strings; extension elements are
// coefficient arrays, little-endian by exponent.

nlohmann::json element_to_json(const ExtElement& a);
ExtElement element_from_json(const nlohmann::json& j, const ExtFieldSpec& spec);

nlohmann::json spec_to_json(const ExtFieldSpec& spec);
std::shared_ptr<const ExtFieldSpec> spec_from_json(const nlohmann::json& j);

nlohmann::json context_to_json(const PairingContext& ctx);
// Validates primality, curve membership, generator orders and the G2
// eigenvalue on load.
std::unique_ptr<PairingContext> context_from_json(const nlohmann::json& j);

nlohmann::json family_to_json(const CurveFamily& f);
CurveFamily family_from_json(const nlohmann::json& j);  // runs family_verify

nlohmann::json catalog_to_json();

}  // namespace pairing
