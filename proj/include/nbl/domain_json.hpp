#pragma once

#include <json.hpp>

#include "nbl/geometry.hpp"

namespace nbl {

// Schemas:
//   {"type":"parallelogram","v1":[a,b],"v2":[c,d]}
//   {"type":"strip","l":L,"g":{profile},"h":{profile}}
//   profile: {"offset":c0,"slope":c1,"terms":[{"amp":A,"k":K,"kind":"sin"}]}
// Parsing throws DegenerateDomain on semantic violations and
// nlohmann::json::exception on malformed documents.

nlohmann::json profile_to_json(const WidthProfile& p);
WidthProfile profile_from_json(const nlohmann::json& j);

nlohmann::json domain_to_json(const Domain& d);
Domain domain_from_json(const nlohmann::json& j);

}  // namespace nbl
