#ifndef MAMO_BENCH_HPP
#define MAMO_BENCH_HPP

#include <mamo/planner.hpp>
#include <mamo/scene.hpp>

#include <string>
#include <vector>

namespace mamo {

enum class Difficulty { Easy, Difficult };
const char* difficulty_name(Difficulty d);

struct SceneSetSpec
{
    GenParams base;        // per-scene seeds are derived from the spec seed
    int count = 0;
    std::string label;     // scene id prefix, e.g. "tabletop"
};

struct ExperimentSpec
{
    std::vector<SceneSetSpec> scene_sets;
    std::vector<std::string> variants;
    PlannerParams params;
    std::uint64_t seed = 1;
    double easy_threshold = 100.0;   // synthetic seconds for the Naive split

    void validate() const;
};

struct MetricsRecord
{
    std::string scene_id;
    std::uint64_t scene_seed = 0;
    std::string variant;
    Difficulty difficulty = Difficulty::Difficult;
    std::string status;              // success / timeout / exhausted / error
    bool success = false;
    double planning_time = 0.0;      // synthetic seconds
    double simulation_time = 0.0;    // synthetic seconds
    long sim_calls_stage1 = 0;
    long sim_calls_stage2 = 0;
    long expansions = 0;
    double path_cost = 0.0;          // NaN when unsolved
};

struct ExperimentResult
{
    std::vector<MetricsRecord> records;
    std::string csv;
    std::string summary;
    double wall_seconds = 0.0;   // informational; not serialized
};

/// Runs the Naive variant on the scene: Easy iff it succeeds with synthetic
/// planning time strictly below the threshold. The full Naive result is
/// optionally returned for reuse.
Difficulty classify_difficulty(
    const Scene& scene,
    const PlannerParams& params,
    std::uint64_t planner_seed,
    double easy_threshold,
    PlanResult* naive_result = nullptr);

/// Paired experiment: every variant sees the identical scene and the
/// identical planner seed. Individual run failures become failure records.
/// Deterministic: same spec, byte-identical CSV and summary.
ExperimentResult run_experiment(const ExperimentSpec& spec);

std::string metrics_to_csv(const std::vector<MetricsRecord>& records);
std::string summarize_records(const std::vector<MetricsRecord>& records);

} // namespace mamo

#endif
