// Rolls one variation of each scenario and prints key signals, useful when
// tuning scene constants.
#include <cstdio>

#include "toolmorph/losses.hpp"
#include "toolmorph/rollout.hpp"

using namespace toolmorph;

namespace {

void run(ScenarioId id, std::uint64_t seed, int index) {
  ScenarioSpec spec = default_spec(id);
  spec.rng_seed = seed;
  const ToolShape tool = spec.make_tool_shape();
  const DeformedShape def = deform(tool, spec.theta0);
  const TaskVariation var = sample_variation(spec, seed, index);
  const Trajectory traj = rollout(var, def, spec.policy, spec.world);
  const Dual loss = scenario_task_loss(spec, traj);

  std::printf("%-9s idx=%d angle=%+.3f pos=(%+.3f,%+.3f) loss=%10.5f ok=%d",
              to_string(id).c_str(), index, var.angle, var.position.x(),
              var.position.y(), loss.value(), success(spec, traj) ? 1 : 0);
  switch (id) {
    case ScenarioId::Winding:
      std::printf(" h0=%.4f hH=%.4f", traj.initial_value("h0"), traj.channel("h").back().value());
      break;
    case ScenarioId::Flipping:
      std::printf(" phiH=%.3f boxx=%.3f", traj.channel("phi").back().value(),
                  traj.initial_value("box_px"));
      break;
    case ScenarioId::Pushing:
      std::printf(" pea=(%.3f,%.3f)", traj.channel("x").back().value(),
                  traj.channel("y").back().value());
      break;
    case ScenarioId::Reaching:
      std::printf(" tip=(%.3f,%.3f)", traj.channel("px").back().value(),
                  traj.channel("py").back().value());
      break;
  }
  std::printf("\n");
}

}  // namespace

int main() {
  for (int i = 0; i < 6; ++i) run(ScenarioId::Winding, 1, i);
  for (int i = 0; i < 6; ++i) run(ScenarioId::Flipping, 1, i);
  for (int i = 0; i < 6; ++i) run(ScenarioId::Pushing, 1, i);
  for (int i = 0; i < 3; ++i) run(ScenarioId::Reaching, 1, i);
  return 0;
}
