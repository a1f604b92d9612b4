#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace magweyl {

using ParameterMap = std::map<std::string, double>;

struct ScenarioInfo {
  std::string name;
  std::string description;
  ParameterMap defaults;
};

const std::vector<ScenarioInfo>& scenario_catalog();

// Builds a registry scenario. Unknown override keys are errors. Torus scenarios
// ("const2d", "resonant4d") derive their side lengths from integer flux counts
// when mu and h are known and no explicit length is given:
// (mu/h) B L^2 = 2 pi N.
Scenario make_scenario(const std::string& name, const ParameterMap& overrides = {},
                       std::optional<double> mu = std::nullopt, std::optional<double> h = std::nullopt);

// Same operator in coordinates x = O y for orthogonal O. The domain becomes the
// bounding box of the rotated original.
Scenario rotate_scenario(const Scenario& s, const Mat& O);

}  // namespace magweyl
