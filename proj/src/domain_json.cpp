#include "nbl/domain_json.hpp"

#include <cmath>

namespace nbl {

nlohmann::json profile_to_json(const WidthProfile& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : p.terms()) {
    terms.push_back({{"amp", t.amplitude},
                     {"k", t.frequency},
                     {"kind", t.kind == TrigKind::sin ? "sin" : "cos"}});
  }
  return {{"offset", p.offset()}, {"slope", p.slope()}, {"terms", terms}};
}

WidthProfile profile_from_json(const nlohmann::json& j) {
  double offset = j.value("offset", 0.0);
  double slope = j.value("slope", 0.0);
  std::vector<TrigTerm> terms;
  if (j.contains("terms")) {
    for (const auto& t : j.at("terms")) {
      TrigTerm term;
      term.amplitude = t.at("amp").get<double>();
      term.frequency = t.at("k").get<int>();
      std::string kind = t.at("kind").get<std::string>();
      if (kind == "sin") {
        term.kind = TrigKind::sin;
      } else if (kind == "cos") {
        term.kind = TrigKind::cos;
      } else {
        throw DegenerateDomain("profile term kind must be 'sin' or 'cos'");
      }
      terms.push_back(term);
    }
  }
  return WidthProfile(offset, slope, std::move(terms));
}

nlohmann::json domain_to_json(const Domain& d) {
  if (const auto* p = std::get_if<Parallelogram>(&d)) {
    auto v = p->spanning_vectors();
    return {{"type", "parallelogram"},
            {"v1", {v[0].x, v[0].y}},
            {"v2", {v[1].x, v[1].y}}};
  }
  const auto& s = std::get<StripDomain>(d);
  if (!s.lower().spec || !s.upper().spec) {
    throw DegenerateDomain(
        "strip profiles outside the serializable class cannot be dumped");
  }
  return {{"type", "strip"},
          {"l", s.length()},
          {"g", profile_to_json(*s.lower().spec)},
          {"h", profile_to_json(*s.upper().spec)}};
}

Domain domain_from_json(const nlohmann::json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "parallelogram") {
    auto v1 = j.at("v1");
    auto v2 = j.at("v2");
    if (!v1.is_array() || v1.size() != 2 || !v2.is_array() || v2.size() != 2) {
      throw DegenerateDomain("spanning vectors must be [x, y] pairs");
    }
    return parallelogram_from_vectors(
        Vec2{v1[0].get<double>(), v1[1].get<double>()},
        Vec2{v2[0].get<double>(), v2[1].get<double>()});
  }
  if (type == "strip") {
    double l = j.at("l").get<double>();
    WidthProfile g = profile_from_json(j.at("g"));
    WidthProfile h = profile_from_json(j.at("h"));
    return StripDomain(l, bind_profile(g, l), bind_profile(h, l));
  }
  throw DegenerateDomain("domain type must be 'parallelogram' or 'strip'");
}

}  // namespace nbl
