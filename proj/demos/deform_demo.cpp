// Deforms each scenario's tool across a few parameter draws and writes the
// polygons as SVG, a quick visual check of the cage parameterizations.
#include <cstdio>
#include <filesystem>

#include "toolmorph/io.hpp"
#include "toolmorph/rng.hpp"
#include "toolmorph/scenario.hpp"

using namespace toolmorph;

int main() {
  std::filesystem::create_directories("deform_demo_out");
  Rng rng(2024);
  for (ScenarioId id : {ScenarioId::Winding, ScenarioId::Flipping, ScenarioId::Pushing}) {
    const ScenarioSpec spec = default_spec(id);
    const ToolShape tool = spec.make_tool_shape();
    for (int variant = 0; variant < 3; ++variant) {
      Eigen::VectorXd theta = spec.theta0.values;
      if (variant > 0)
        for (int k = 0; k < spec.d(); ++k)
          theta[k] = rng.uniform(spec.theta0.lower_bounds[k], spec.theta0.upper_bounds[k]);
      const DeformedShape def = deform(tool, spec.theta0.with_values(theta));
      const auto path = "deform_demo_out/" + to_string(id) + "_" + std::to_string(variant) + ".svg";
      write_polygon_svg(path, def.vertices);
      std::printf("wrote %s (%zu vertices)\n", path.c_str(), def.vertices.size());
    }
  }
  return 0;
}
