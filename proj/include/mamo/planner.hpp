#ifndef MAMO_PLANNER_HPP
#define MAMO_PLANNER_HPP

#include <mamo/physics.hpp>
#include <mamo/robot.hpp>
#include <mamo/scene.hpp>
#include <mamo/validity.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mamo {

struct PlannerParams
{
    double delta = 0.2;        // end-effector radius for terminal-primitive eligibility
    double beta = 0.5;         // soft-duplicate radius, joint-space L2
    double t_sim = 1200.0;      // synthetic time before deferred simulations start
    double t_max = 1800.0;     // synthetic planning budget
    int n_subgoals = 3;        // N
    int m_samples = 8;         // M
    double w1 = 100.0;         // heuristic inflation on every queue
    double w2 = 10.0;          // anchor factor bounding inadmissible expansions
    double amp_step = 0.05;    // joint-space interpolation step for AMPs

    // synthetic clock: one action evaluation = check_cost, one simulator
    // call = sim_cost
    double check_cost = 0.03;
    double sim_cost = 1.5;

    std::vector<double> primitive_deltas;   // empty -> 4/7 deg defaults
    long expansion_cap = 500000;
    int sample_budget_factor = 50;          // sampling budget = factor * M
    bool use_wall_clock = false;            // gate on wall time instead
    // IK is re-run per generated connection primitive, seeded at its source
    // so the target lands in the same arm fold; false reuses one shared IK
    // solution for every connection
    bool fresh_ik_per_amp = true;
    double sim_latency_seconds = 0.0;       // forwarded to the oracle
    bool record_events = true;

    void validate() const;   // throws std::invalid_argument
};

/// key/value text form, one `name value` pair per line.
PlannerParams params_from_string(const std::string& text);
PlannerParams load_params(const std::string& path);
std::string params_to_string(const PlannerParams& params);

/// Either a single-joint move or a terminal goal-connection primitive
/// (an interpolated joint-space path to an IK solution of the goal).
struct Action
{
    enum class Kind { Primitive, Amp };
    Kind kind = Kind::Primitive;
    JointStep step{0, 0.0};               // Primitive payload
    Configuration target;                 // Amp payload
    std::vector<Configuration> path;      // Amp payload, source..target
    double cost = 0.0;
};

Action make_primitive_action(const Configuration& from, const JointStep& step);
Action make_amp_action(const Configuration& from, const Configuration& target, double amp_step);

/// Planner ablation switches.
struct VariantConfig
{
    enum class Subgoals { None, One, N };
    std::string name;
    Subgoals subgoals = Subgoals::None;
    bool simulate_samples = false;   // stage 1 simulates the M samples
    bool use_dd = false;             // soft duplicate detection
    bool zero_t_sim = false;         // simulations allowed from the outset
};

/// name in {SPAMP, Naive, Naive+DD, SubG, SubG+DD, Phase1}; throws otherwise.
VariantConfig make_variant(const std::string& name);
const std::vector<std::string>& variant_names();

enum class SubgoalGrade { Phase1, Phase2 };

struct Subgoal
{
    Configuration source;
    Action amp;
    SubgoalGrade grade = SubgoalGrade::Phase1;
    std::optional<SimOutcome> outcome;   // present for simulated samples
};

struct SubgoalStats
{
    long samples_tried = 0;
    long sim_calls = 0;
    ValidityCounters validity;
};

/// Stage 1: rejection-sample source configurations near the goal until M
/// Phase-1-valid connection primitives are found (or the budget runs out),
/// simulate them concurrently, and return up to N subgoals preferring
/// Phase-2-clean ones. Deterministic in the rng state: results are joined
/// in sample order before selection.
std::vector<Subgoal> get_valid_subgoals(
    const Scene& scene,
    const PlannerParams& params,
    Rng& rng,
    SubgoalStats* stats = nullptr);

/// Goal-connection primitive from c, or nullopt when the end effector is
/// farther than delta from the goal position or IK fails.
std::optional<Action> generate_amp(
    const RobotModel& robot,
    const Configuration& c,
    const GoalSpec& goal,
    Rng& rng,
    const PlannerParams& params);

/// Same eligibility check, but connects to a precomputed goal configuration.
std::optional<Action> generate_amp_to(
    const RobotModel& robot,
    const Configuration& c,
    const Configuration& target,
    const GoalSpec& goal,
    const PlannerParams& params);

struct QueueStatus
{
    bool empty = true;
    double time = 0.0;   // cumulative expansion time
};

/// Index of the non-empty queue with minimal cumulative expansion time,
/// ties to the lowest index; nullopt when every queue is empty.
std::optional<int> select_queue(const std::vector<QueueStatus>& queues);

/// True iff c lies strictly within beta (joint-space L2) of any entry.
bool soft_duplicate_check(
    const Configuration& c,
    const std::vector<Configuration>& registry,
    double beta);

// --- configuration lattice -------------------------------------------------
// Simple primitives move one joint by a fixed per-joint delta, so every
// state reachable from the start lies on an integer lattice; keys give
// exact duplicate detection and bit-stable configurations.

std::vector<int> lattice_key(
    const Configuration& start,
    const std::vector<double>& deltas,
    const Configuration& c);

Configuration lattice_config(
    const Configuration& start,
    const std::vector<double>& deltas,
    const std::vector<int>& key);

Configuration snap_to_lattice(
    const Configuration& start,
    const std::vector<double>& deltas,
    const Configuration& c);

// --- anchor heuristic --------------------------------------------------------

/// Grid geodesic distance (meters) to the goal cell over the distance-field
/// grid, 8-connected, cells blocked where the field does not clear
/// `clearance`. Blocked or unreachable queries return `blocked_value`, a
/// finite value larger than any geodesic.
struct AnchorHeuristic
{
    double origin_x = 0.0;
    double origin_y = 0.0;
    double resolution = 0.01;
    int nx = 0;
    int ny = 0;
    std::vector<double> dist;
    double blocked_value = 0.0;

    double at(const Vec2& p) const;
};

AnchorHeuristic build_anchor_heuristic(
    const DistanceField& field,
    const Vec2& goal_position,
    double clearance);

// --- planning ----------------------------------------------------------------

enum class PlanStatus { Success, Timeout, Exhausted };
const char* plan_status_name(PlanStatus status);

struct PlanEvent
{
    enum class Kind { Expand, Postpone, Park, Sim };
    Kind kind;
    int node = -1;
    int queue = -1;
    int stage = 0;           // Sim: 1 = sampling, 2 = search
    bool clean = false;      // Sim verdict
    bool from_drain = false; // Sim issued while draining the deferred queue
    double t = 0.0;          // synthetic time at the event
    Configuration config;    // source configuration (Postpone/Sim)
};

struct PlanStats
{
    std::vector<long> expansions_per_queue;
    long expansions = 0;
    long postponements = 0;
    long deferred_parked = 0;
    ValidityCounters validity;
    long sim_calls_stage1 = 0;
    long sim_calls_stage2 = 0;
    int subgoals_total = 0;
    int subgoals_phase2 = 0;
    long delta_sphere_expansions = 0;
    long amps_generated = 0;
    long amps_phase1_invalid = 0;
    double min_ee_goal_distance = 1e9;
    double synthetic_time = 0.0;
    double synthetic_sim_time = 0.0;
    double wall_seconds = 0.0;   // informational; excluded from determinism

    long sim_calls_total() const { return sim_calls_stage1 + sim_calls_stage2; }
};

struct PlanResult
{
    PlanStatus status = PlanStatus::Exhausted;
    std::vector<WorldState> path;    // start..goal states on success
    std::vector<Action> actions;     // path.size() - 1 actions on success
    double cost = 0.0;
    PlanStats stats;
    std::vector<PlanEvent> events;

    bool success() const { return status == PlanStatus::Success; }
};

/// Two-stage planning: subgoal sampling (per variant), then time-budgeted
/// multi-heuristic best-first search over the configuration lattice with
/// goal-connection primitives handled per the variant's simulation policy.
PlanResult plan(
    const Scene& scene,
    const PlannerParams& params,
    const VariantConfig& variant,
    std::uint64_t seed);

/// Deterministic fingerprint of everything except wall time; equal seeds
/// must yield equal signatures.
std::string plan_result_signature(const PlanResult& result);

} // namespace mamo

#endif
