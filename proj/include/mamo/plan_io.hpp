#ifndef MAMO_PLAN_IO_HPP
#define MAMO_PLAN_IO_HPP

#include <mamo/planner.hpp>
#include <mamo/scene.hpp>

#include <string>
#include <vector>

namespace mamo {

/// On-disk plan: scene fingerprint, interpolation step, and the action
/// sequence; enough to re-execute without any planner state.
struct PlanFile
{
    std::string scene_hash;
    std::string variant;
    std::uint64_t seed = 0;
    int dof = 0;
    double amp_step = 0.05;
    double cost = 0.0;
    std::vector<Action> actions;
};

PlanFile plan_file_from_result(
    const PlanResult& result,
    const Scene& scene,
    const PlannerParams& params,
    const std::string& variant_name,
    std::uint64_t seed);

std::string plan_to_string(const PlanFile& plan);
PlanFile plan_from_string(const std::string& text);
PlanFile load_plan(const std::string& path);
void save_plan(const PlanFile& plan, const std::string& path);

/// Replay verdict: the external correctness oracle for a stored plan.
struct ReplayReport
{
    bool valid = false;        // zero violations and goal satisfied
    bool goal_met = false;
    bool hash_match = true;    // plan fingerprint vs this scene
    std::vector<Violation> violations;
    std::vector<std::string> notes;       // per-action failure descriptions
    std::vector<WorldState> states;       // start plus one state per action
};

/// Re-executes the action sequence through the validity checks and the
/// pushing oracle. Throws std::invalid_argument on structural mismatch
/// (wrong joint count, malformed actions).
ReplayReport replay(
    const Scene& scene,
    const PlanFile& plan,
    double sim_latency_seconds = 0.0);

} // namespace mamo

#endif
