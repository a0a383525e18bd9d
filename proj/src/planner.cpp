#include <mamo/planner.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace mamo {

void PlannerParams::validate() const
{
    if (!(delta > 0.0)) {
        throw std::invalid_argument("params.delta: must be > 0");
    }
    if (!(beta > 0.0)) {
        throw std::invalid_argument("params.beta: must be > 0");
    }
    if (t_sim < 0.0 || t_sim > t_max) {
        throw std::invalid_argument("params.t_sim: require 0 <= t_sim <= t_max");
    }
    if (n_subgoals < 1 || m_samples < n_subgoals) {
        throw std::invalid_argument("params.n_subgoals: require 1 <= N <= M");
    }
    if (w1 < 1.0 || w2 < 1.0) {
        throw std::invalid_argument("params.w1/w2: must be >= 1");
    }
    if (!(amp_step > 0.0)) {
        throw std::invalid_argument("params.amp_step: must be > 0");
    }
    if (!(check_cost > 0.0) || !(sim_cost > 0.0)) {
        throw std::invalid_argument("params.check_cost/sim_cost: must be > 0");
    }
}

std::string params_to_string(const PlannerParams& p)
{
    std::ostringstream os;
    auto put = [&](const char* k, double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        os << k << ' ' << buf << '\n';
    };
    put("delta", p.delta);
    put("beta", p.beta);
    put("t_sim", p.t_sim);
    put("t_max", p.t_max);
    os << "n_subgoals " << p.n_subgoals << '\n';
    os << "m_samples " << p.m_samples << '\n';
    put("w1", p.w1);
    put("w2", p.w2);
    put("amp_step", p.amp_step);
    put("check_cost", p.check_cost);
    put("sim_cost", p.sim_cost);
    os << "expansion_cap " << p.expansion_cap << '\n';
    os << "sample_budget_factor " << p.sample_budget_factor << '\n';
    os << "use_wall_clock " << (p.use_wall_clock ? 1 : 0) << '\n';
    os << "fresh_ik_per_amp " << (p.fresh_ik_per_amp ? 1 : 0) << '\n';
    put("sim_latency_seconds", p.sim_latency_seconds);
    os << "record_events " << (p.record_events ? 1 : 0) << '\n';
    if (!p.primitive_deltas.empty()) {
        os << "primitive_deltas";
        for (const double d : p.primitive_deltas) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.9g", d);
            os << ' ' << buf;
        }
        os << '\n';
    }
    return os.str();
}

PlannerParams params_from_string(const std::string& text)
{
    PlannerParams p;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') {
            continue;
        }
        auto want_double = [&]() {
            double v;
            if (!(ls >> v)) {
                throw std::invalid_argument(
                    "params parse: line " + std::to_string(lineno) +
                    ": '" + key + "' needs a numeric value");
            }
            return v;
        };
        if (key == "delta") p.delta = want_double();
        else if (key == "beta") p.beta = want_double();
        else if (key == "t_sim") p.t_sim = want_double();
        else if (key == "t_max") p.t_max = want_double();
        else if (key == "n_subgoals") p.n_subgoals = static_cast<int>(want_double());
        else if (key == "m_samples") p.m_samples = static_cast<int>(want_double());
        else if (key == "w1") p.w1 = want_double();
        else if (key == "w2") p.w2 = want_double();
        else if (key == "amp_step") p.amp_step = want_double();
        else if (key == "check_cost") p.check_cost = want_double();
        else if (key == "sim_cost") p.sim_cost = want_double();
        else if (key == "expansion_cap") p.expansion_cap = static_cast<long>(want_double());
        else if (key == "sample_budget_factor") p.sample_budget_factor = static_cast<int>(want_double());
        else if (key == "use_wall_clock") p.use_wall_clock = want_double() != 0;
        else if (key == "fresh_ik_per_amp") p.fresh_ik_per_amp = want_double() != 0;
        else if (key == "sim_latency_seconds") p.sim_latency_seconds = want_double();
        else if (key == "record_events") p.record_events = want_double() != 0;
        else if (key == "primitive_deltas") {
            double v;
            p.primitive_deltas.clear();
            while (ls >> v) {
                p.primitive_deltas.push_back(v);
            }
        } else {
            throw std::invalid_argument(
                "params parse: line " + std::to_string(lineno) +
                ": unknown key '" + key + "'");
        }
    }
    p.validate();
    return p;
}

PlannerParams load_params(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open params file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return params_from_string(buf.str());
}

Action make_primitive_action(const Configuration&, const JointStep& step)
{
    Action a;
    a.kind = Action::Kind::Primitive;
    a.step = step;
    a.cost = std::abs(step.delta);
    return a;
}

Action make_amp_action(const Configuration& from, const Configuration& target, double amp_step)
{
    Action a;
    a.kind = Action::Kind::Amp;
    a.target = target;
    a.path = interpolate(from, target, amp_step);
    a.cost = 0.0;
    for (size_t i = 1; i < a.path.size(); ++i) {
        a.cost += (a.path[i] - a.path[i - 1]).norm();
    }
    return a;
}

const std::vector<std::string>& variant_names()
{
    static const std::vector<std::string> names = {
        "SPAMP", "Naive", "Naive+DD", "SubG", "SubG+DD", "Phase1"};
    return names;
}

VariantConfig make_variant(const std::string& name)
{
    VariantConfig v;
    v.name = name;
    if (name == "SPAMP") {
        v.subgoals = VariantConfig::Subgoals::N;
        v.simulate_samples = true;
        v.use_dd = true;
        v.zero_t_sim = false;
    } else if (name == "Naive") {
        v.subgoals = VariantConfig::Subgoals::None;
        v.use_dd = false;
        v.zero_t_sim = true;
    } else if (name == "Naive+DD") {
        v.subgoals = VariantConfig::Subgoals::None;
        v.use_dd = true;
        v.zero_t_sim = true;
    } else if (name == "SubG") {
        v.subgoals = VariantConfig::Subgoals::One;
        v.use_dd = false;
        v.zero_t_sim = true;
    } else if (name == "SubG+DD") {
        v.subgoals = VariantConfig::Subgoals::One;
        v.use_dd = true;
        v.zero_t_sim = true;
    } else if (name == "Phase1") {
        v.subgoals = VariantConfig::Subgoals::N;
        v.simulate_samples = false;
        v.use_dd = false;
        v.zero_t_sim = true;
    } else {
        throw std::invalid_argument("unknown planner variant: " + name);
    }
    return v;
}

// --- lattice -----------------------------------------------------------------

std::vector<int> lattice_key(
    const Configuration& start,
    const std::vector<double>& deltas,
    const Configuration& c)
{
    std::vector<int> key(deltas.size());
    for (size_t j = 0; j < deltas.size(); ++j) {
        key[j] = static_cast<int>(std::llround((c[static_cast<int>(j)] - start[static_cast<int>(j)]) / deltas[j]));
    }
    return key;
}

Configuration lattice_config(
    const Configuration& start,
    const std::vector<double>& deltas,
    const std::vector<int>& key)
{
    Configuration c = start;
    for (size_t j = 0; j < deltas.size(); ++j) {
        c[static_cast<int>(j)] = start[static_cast<int>(j)] + key[j] * deltas[j];
    }
    return c;
}

Configuration snap_to_lattice(
    const Configuration& start,
    const std::vector<double>& deltas,
    const Configuration& c)
{
    return lattice_config(start, deltas, lattice_key(start, deltas, c));
}

// --- anchor heuristic --------------------------------------------------------

double AnchorHeuristic::at(const Vec2& p) const
{
    int ix = static_cast<int>(std::floor((p.x() - origin_x) / resolution));
    int iy = static_cast<int>(std::floor((p.y() - origin_y) / resolution));
    ix = std::clamp(ix, 0, nx - 1);
    iy = std::clamp(iy, 0, ny - 1);
    const double d = dist[static_cast<size_t>(iy) * nx + ix];
    return std::isfinite(d) ? d : blocked_value;
}

AnchorHeuristic build_anchor_heuristic(
    const DistanceField& field,
    const Vec2& goal_position,
    double clearance)
{
    AnchorHeuristic h;
    h.origin_x = field.origin_x;
    h.origin_y = field.origin_y;
    h.resolution = field.resolution;
    h.nx = field.nx;
    h.ny = field.ny;
    h.blocked_value = 4.0 * (h.nx + h.ny) * h.resolution;
    const double inf = std::numeric_limits<double>::infinity();
    h.dist.assign(static_cast<size_t>(h.nx) * h.ny, inf);

    const int gx = field.cell_x(goal_position.x());
    const int gy = field.cell_y(goal_position.y());
    auto blocked = [&](int ix, int iy) {
        return field.at_cell(ix, iy) <= clearance;
    };
    if (blocked(gx, gy)) {
        return h;   // every query falls back to blocked_value
    }

    using Item = std::pair<double, int>;   // (distance, cell index)
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> open;
    const int start_idx = gy * h.nx + gx;
    h.dist[start_idx] = 0.0;
    open.push({0.0, start_idx});
    const double diag = h.resolution * std::sqrt(2.0);
    while (!open.empty()) {
        const auto [d, idx] = open.top();
        open.pop();
        if (d > h.dist[idx]) {
            continue;
        }
        const int ix = idx % h.nx;
        const int iy = idx / h.nx;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) {
                    continue;
                }
                const int jx = ix + dx;
                const int jy = iy + dy;
                if (jx < 0 || jx >= h.nx || jy < 0 || jy >= h.ny || blocked(jx, jy)) {
                    continue;
                }
                const double step = (dx != 0 && dy != 0) ? diag : h.resolution;
                const int jdx = jy * h.nx + jx;
                if (d + step < h.dist[jdx]) {
                    h.dist[jdx] = d + step;
                    open.push({d + step, jdx});
                }
            }
        }
    }
    return h;
}

// --- small ops ---------------------------------------------------------------

std::optional<int> select_queue(const std::vector<QueueStatus>& queues)
{
    int best = -1;
    for (size_t i = 0; i < queues.size(); ++i) {
        if (queues[i].empty) {
            continue;
        }
        if (best < 0 || queues[i].time < queues[best].time) {
            best = static_cast<int>(i);
        }
    }
    if (best < 0) {
        return std::nullopt;
    }
    return best;
}

bool soft_duplicate_check(
    const Configuration& c,
    const std::vector<Configuration>& registry,
    double beta)
{
    for (const auto& entry : registry) {
        if ((c - entry).norm() < beta) {
            return true;
        }
    }
    return false;
}

std::optional<Action> generate_amp_to(
    const RobotModel& robot,
    const Configuration& c,
    const Configuration& target,
    const GoalSpec& goal,
    const PlannerParams& params)
{
    const Pose2 ee = end_effector_pose(robot, c);
    if ((ee.position() - goal.pose.position()).norm() > params.delta) {
        return std::nullopt;
    }
    return make_amp_action(c, target, params.amp_step);
}

std::optional<Action> generate_amp(
    const RobotModel& robot,
    const Configuration& c,
    const GoalSpec& goal,
    Rng& rng,
    const PlannerParams& params)
{
    const Pose2 ee = end_effector_pose(robot, c);
    if ((ee.position() - goal.pose.position()).norm() > params.delta) {
        return std::nullopt;
    }
    const auto target = inverse_kinematics(robot, goal, c, rng);
    if (!target) {
        return std::nullopt;
    }
    return make_amp_action(c, *target, params.amp_step);
}

// --- stage 1: subgoal sampling ------------------------------------------------

namespace {

struct KeyHash
{
    size_t operator()(const std::vector<int>& key) const
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const int v : key) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
            h *= 0x100000001b3ULL;
        }
        return static_cast<size_t>(h);
    }
};

struct SampledSubgoals
{
    std::vector<Subgoal> selected;
    std::vector<Configuration> failed_sources;   // simulated and found invalid
    long tried = 0;
    long sim_calls = 0;
};


SampledSubgoals sample_subgoals(
    const Scene& scene,
    const PlannerParams& params,
    const DistanceField& field,
    const std::vector<double>& deltas,
    const std::optional<Configuration>& shared_target,
    int n_return,
    int m_target,
    bool simulate,
    Rng& rng,
    ValidityCounters* counters)
{
    SampledSubgoals out;
    if (!shared_target) {
        return out;   // goal has no reachable configuration
    }
    const RobotModel& robot = scene.robot;
    const GoalSpec& goal = scene.goal;
    const Vec2 goal_pos = goal.pose.position();

    struct Sample
    {
        Configuration source;
        Action amp;
    };
    std::vector<Sample> samples;
    std::unordered_set<std::vector<int>, KeyHash> seen;
    const long budget =
        static_cast<long>(params.sample_budget_factor) * std::max(m_target, 1);

    for (long attempt = 0; attempt < budget &&
         static_cast<int>(samples.size()) < m_target; ++attempt)
    {
        ++out.tried;
        // pose drawn in the delta-disk around the goal with a bounded yaw
        // perturbation, then inverted from a random seed
        const double rad = params.delta * std::sqrt(rng.uniform01());
        const double theta = 2.0 * M_PI * rng.uniform01();
        GoalSpec probe;
        probe.pose = Pose2{
            goal_pos.x() + rad * std::cos(theta),
            goal_pos.y() + rad * std::sin(theta),
            normalize_angle(goal.pose.yaw + rng.uniform(-M_PI / 4.0, M_PI / 4.0))};
        probe.pos_tolerance = 0.02;
        probe.yaw_tolerance = 0.2;
        // random IK seed drawn around the known-valid goal fold, so the
        // solutions tend to stay inside the workspace
        Configuration seed(robot.dof());
        for (int j = 0; j < robot.dof(); ++j) {
            seed[j] = std::clamp(
                (*shared_target)[j] + rng.uniform(-0.5, 0.5),
                robot.joint_limits[j][0], robot.joint_limits[j][1]);
        }
        const auto ik = inverse_kinematics(robot, probe, seed, rng);
        if (!ik) {
            continue;
        }
        // snap to the search lattice so the planner can reach the source
        // exactly; re-validate afterwards
        const Configuration source =
            snap_to_lattice(scene.start.robot, deltas, *ik);
        if (!robot.within_limits(source)) {
            continue;
        }
        auto key = lattice_key(scene.start.robot, deltas, source);
        if (seen.count(key)) {
            continue;
        }
        if (!check_configuration(robot, source, field, scene.workspace, counters)) {
            continue;
        }
        auto amp = params.fresh_ik_per_amp
            ? generate_amp(robot, source, goal, rng, params)
            : generate_amp_to(robot, source, *shared_target, goal, params);
        if (!amp) {
            continue;
        }
        const Phase1Result p1 = check_phase1(
            robot, amp->path, field, scene.workspace, scene.objects,
            scene.start.objects, counters);
        if (!p1.valid()) {
            continue;
        }
        seen.insert(std::move(key));
        samples.push_back(Sample{source, std::move(*amp)});
    }

    if (!simulate) {
        for (int i = 0; i < static_cast<int>(samples.size()) && i < n_return; ++i) {
            Subgoal sg;
            sg.source = samples[i].source;
            sg.amp = samples[i].amp;
            sg.grade = SubgoalGrade::Phase1;
            out.selected.push_back(std::move(sg));
        }
        return out;
    }

    // simulate every sample concurrently; join in sample order so the
    // selection below is deterministic
    SimSettings sim_settings;
    sim_settings.latency_seconds = params.sim_latency_seconds;
    std::vector<std::future<std::optional<SimOutcome>>> futures;
    futures.reserve(samples.size());
    for (const auto& s : samples) {
        futures.push_back(std::async(std::launch::async, [&scene, &s, sim_settings] {
            return simulate_path(
                scene.robot, s.amp.path, scene.objects, scene.start.objects,
                scene.workspace, sim_settings);
        }));
    }
    std::vector<Subgoal> graded;
    graded.reserve(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        auto outcome = futures[i].get();
        ++out.sim_calls;
        Subgoal sg;
        sg.source = samples[i].source;
        sg.amp = samples[i].amp;
        const bool clean = outcome && outcome->clean();
        sg.grade = clean ? SubgoalGrade::Phase2 : SubgoalGrade::Phase1;
        if (outcome) {
            sg.outcome = std::move(*outcome);
        }
        if (!clean) {
            out.failed_sources.push_back(sg.source);
        }
        graded.push_back(std::move(sg));
    }
    for (const auto& sg : graded) {
        if (static_cast<int>(out.selected.size()) >= n_return) {
            break;
        }
        if (sg.grade == SubgoalGrade::Phase2) {
            out.selected.push_back(sg);
        }
    }
    for (const auto& sg : graded) {
        if (static_cast<int>(out.selected.size()) >= n_return) {
            break;
        }
        if (sg.grade == SubgoalGrade::Phase1) {
            out.selected.push_back(sg);
        }
    }
    return out;
}

} // namespace

std::vector<Subgoal> get_valid_subgoals(
    const Scene& scene,
    const PlannerParams& params,
    Rng& rng,
    SubgoalStats* stats)
{
    params.validate();
    const DistanceField field = build_distance_field(
        scene.workspace, scene.objects, scene.start.objects);
    const std::vector<double> deltas = params.primitive_deltas.empty()
        ? default_primitive_deltas(scene.robot.dof())
        : params.primitive_deltas;
    ValidityCounters counters;
    const auto target = find_valid_goal_configuration(
        scene.robot, scene.goal, field, scene.workspace, scene.start.robot,
        rng, 50, &counters);
    auto sampled = sample_subgoals(
        scene, params, field, deltas, target,
        params.n_subgoals, params.m_samples, true, rng, &counters);
    if (stats) {
        stats->samples_tried = sampled.tried;
        stats->sim_calls = sampled.sim_calls;
        stats->validity = counters;
    }
    return std::move(sampled.selected);
}

// --- search ------------------------------------------------------------------

const char* plan_status_name(PlanStatus status)
{
    switch (status) {
    case PlanStatus::Success:   return "success";
    case PlanStatus::Timeout:   return "timeout";
    case PlanStatus::Exhausted: return "exhausted";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SearchNode
{
    Configuration config;
    std::vector<int> key;      // empty for goal states reached by an Amp
    int poses_index = -1;      // -1 = initial scene poses
    double g = kInf;
    int parent = -1;
    Action act;
    Pose2 ee;
    double h_anchor = 0.0;
    std::vector<double> h_sub;
    bool closed_anchor = false;
    bool closed_inad = false;
    bool deferred_once = false;
    bool amp_done = false;
};

struct HeapEntry
{
    double key;
    long seq;
    int node;
    double g;   // node g at push time; stale entries are skipped
};

struct EntryCmp
{
    bool operator()(const HeapEntry& a, const HeapEntry& b) const
    {
        if (a.key != b.key) {
            return a.key > b.key;
        }
        return a.seq > b.seq;
    }
};

using Heap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, EntryCmp>;

struct DeferredEntry
{
    double key;
    long seq;
    int node;
    Action amp;
    bool postponed = false;   // soft-duplicate delay already applied
};

struct DeferredCmp
{
    bool operator()(const DeferredEntry& a, const DeferredEntry& b) const
    {
        if (a.key != b.key) {
            return a.key > b.key;
        }
        return a.seq > b.seq;
    }
};

class Search
{
public:
    Search(
        const Scene& scene,
        const PlannerParams& params,
        const VariantConfig& variant,
        const DistanceField& field,
        std::vector<double> deltas,
        std::optional<Configuration> shared_target,
        std::vector<Subgoal> subgoals,
        std::vector<Configuration> initial_registry,
        Rng& rng,
        PlanStats stage1_stats)
    :
        m_scene(scene),
        m_params(params),
        m_variant(variant),
        m_field(field),
        m_deltas(std::move(deltas)),
        m_target(std::move(shared_target)),
        m_subgoals(std::move(subgoals)),
        m_registry(std::move(initial_registry)),
        m_rng(rng),
        m_stats(std::move(stage1_stats)),
        m_wall_start(std::chrono::steady_clock::now()),
        m_reach(scene.robot.reach())
    {
        m_anchor = build_anchor_heuristic(
            field, scene.goal.pose.position(), scene.robot.max_thickness());
        m_num_queues = 1 + static_cast<int>(m_subgoals.size());
        m_heaps.resize(m_num_queues);
        m_queue_time.assign(m_num_queues, 0.0);
        m_stats.expansions_per_queue.assign(m_num_queues, 0);
        m_sim_settings.latency_seconds = params.sim_latency_seconds;

        m_t_gate = variant.zero_t_sim ? 0.0 : params.t_sim;
        bool any_phase2 = false;
        for (size_t i = 0; i < m_subgoals.size(); ++i) {
            if (m_subgoals[i].grade == SubgoalGrade::Phase2) {
                any_phase2 = true;
                m_phase2_by_key.emplace(
                    lattice_key(scene.start.robot, m_deltas, m_subgoals[i].source),
                    static_cast<int>(i));
            }
        }
        if (m_subgoals.empty() || !any_phase2) {
            m_t_gate = 0.0;   // nothing worth waiting for
        }
    }

    PlanResult run()
    {
        const int start_id = make_lattice_node(
            lattice_key(m_scene.start.robot, m_deltas, m_scene.start.robot));
        m_nodes[start_id].g = 0.0;
        push_all_queues(start_id);

        while (true) {
            if (elapsed() >= m_params.t_max ||
                m_stats.expansions >= m_params.expansion_cap)
            {
                return finish(PlanStatus::Timeout, -1, -1);
            }
            std::vector<QueueStatus> status(m_num_queues);
            bool open_empty = true;
            auto refresh_status = [&]() {
                open_empty = true;
                for (int q = 0; q < m_num_queues; ++q) {
                    purge(q);
                    status[q] = QueueStatus{m_heaps[q].empty(), m_queue_time[q]};
                    open_empty = open_empty && status[q].empty;
                }
            };
            refresh_status();
            if (!m_deferred.empty()) {
                // synthetic time only advances with work: when the open lists
                // starve before the gate, open it now instead of stalling
                if (open_empty && elapsed() < m_t_gate) {
                    m_t_gate = elapsed();
                }
                if (elapsed() >= m_t_gate) {
                    // one deferred simulation per iteration, interleaved with
                    // regular expansions
                    drain_one();
                    if (elapsed() >= m_params.t_max) {
                        return finish(PlanStatus::Timeout, -1, -1);
                    }
                    refresh_status();
                }
            }
            auto selected = select_queue(status);
            if (!selected) {
                if (!m_deferred.empty()) {
                    continue;   // keep draining
                }
                return finish(PlanStatus::Exhausted, -1, -1);
            }
            int qi = *selected;
            if (qi != 0 && !m_heaps[0].empty() &&
                m_heaps[qi].top().key > m_params.w2 * m_heaps[0].top().key)
            {
                qi = 0;   // anchor-factor guard
            }
            const HeapEntry entry = m_heaps[qi].top();
            m_heaps[qi].pop();
            const int xid = entry.node;

            if (goal_satisfied(m_scene.goal, m_nodes[xid].ee)) {
                return finish(PlanStatus::Success, xid, -1);
            }
            if (!m_nodes[xid].key.empty()) {
                const auto it = m_phase2_by_key.find(m_nodes[xid].key);
                if (it != m_phase2_by_key.end()) {
                    return finish(PlanStatus::Success, xid, it->second);
                }
            }
            expand(xid, qi, entry.key);
        }
    }

private:
    double synthetic() const
    {
        return m_params.check_cost * m_counters.action_evaluations +
               m_params.sim_cost *
                   (m_stats.sim_calls_stage1 + m_stats.sim_calls_stage2);
    }

    double wall() const
    {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - m_wall_start).count();
    }

    double elapsed() const
    {
        return m_params.use_wall_clock ? wall() : synthetic();
    }

    void record(PlanEvent ev)
    {
        if (m_params.record_events) {
            m_events.push_back(std::move(ev));
        }
    }

    double queue_heuristic(int q, const SearchNode& n) const
    {
        // the anchor value is a workspace distance in meters; dividing by
        // the arm reach converts it to a joint-space lower bound, keeping
        // anchor and subgoal keys commensurate for the w2 guard
        return q == 0 ? n.h_anchor / m_reach : n.h_sub[q - 1];
    }

    void push_entry(int q, int id)
    {
        const SearchNode& n = m_nodes[id];
        m_heaps[q].push(HeapEntry{
            n.g + m_params.w1 * queue_heuristic(q, n), m_seq++, id, n.g});
    }

    void push_all_queues(int id)
    {
        push_entry(0, id);
        for (int q = 1; q < m_num_queues; ++q) {
            push_entry(q, id);
        }
    }

    void purge(int q)
    {
        while (!m_heaps[q].empty()) {
            const HeapEntry& e = m_heaps[q].top();
            const SearchNode& n = m_nodes[e.node];
            const bool closed = (q == 0) ? n.closed_anchor : n.closed_inad;
            if (closed || e.g != n.g) {
                m_heaps[q].pop();
            } else {
                break;
            }
        }
    }

    int make_lattice_node(const std::vector<int>& key)
    {
        const auto it = m_by_key.find(key);
        if (it != m_by_key.end()) {
            return it->second;
        }
        SearchNode n;
        n.key = key;
        n.config = lattice_config(m_scene.start.robot, m_deltas, key);
        finish_node(n);
        const int id = static_cast<int>(m_nodes.size());
        m_nodes.push_back(std::move(n));
        m_by_key.emplace(key, id);
        return id;
    }

    int make_goal_node(const Configuration& config, int poses_index)
    {
        SearchNode n;
        n.config = config;
        n.poses_index = poses_index;
        finish_node(n);
        const int id = static_cast<int>(m_nodes.size());
        m_nodes.push_back(std::move(n));
        return id;
    }

    void finish_node(SearchNode& n)
    {
        n.ee = end_effector_pose(m_scene.robot, n.config);
        n.h_anchor = m_anchor.at(n.ee.position());
        n.h_sub.resize(m_subgoals.size());
        for (size_t i = 0; i < m_subgoals.size(); ++i) {
            n.h_sub[i] = (n.config - m_subgoals[i].source).norm();
        }
    }

    void try_insert(int id, double g, int parent, Action act)
    {
        SearchNode& n = m_nodes[id];
        if (n.closed_anchor || g >= n.g) {
            return;
        }
        n.g = g;
        n.parent = parent;
        n.act = std::move(act);
        push_entry(0, id);
        if (!n.closed_inad) {
            for (int q = 1; q < m_num_queues; ++q) {
                push_entry(q, id);
            }
        }
    }

    void simulate_amp(int xid, const Action& amp, bool from_drain)
    {
        const auto outcome = simulate_path(
            m_scene.robot, amp.path, m_scene.objects, m_scene.start.objects,
            m_scene.workspace, m_sim_settings);
        ++m_stats.sim_calls_stage2;
        const bool clean = outcome && outcome->clean();
        PlanEvent ev;
        ev.kind = PlanEvent::Kind::Sim;
        ev.node = xid;
        ev.stage = 2;
        ev.clean = clean;
        ev.from_drain = from_drain;
        ev.t = elapsed();
        ev.config = m_nodes[xid].config;
        record(std::move(ev));
        if (clean) {
            m_pose_overrides.push_back(outcome->final_poses);
            const int gid = make_goal_node(
                amp.target, static_cast<int>(m_pose_overrides.size()) - 1);
            try_insert(gid, m_nodes[xid].g + amp.cost, xid, amp);
        } else {
            m_registry.push_back(m_nodes[xid].config);
        }
    }

    void drain_one()
    {
        DeferredEntry e = m_deferred.top();
        m_deferred.pop();
        if (m_variant.use_dd && !e.postponed &&
            soft_duplicate_check(m_nodes[e.node].config, m_registry, m_params.beta))
        {
            e.postponed = true;
            e.key *= 2.0;
            e.seq = m_seq++;
            ++m_stats.postponements;
            PlanEvent ev;
            ev.kind = PlanEvent::Kind::Postpone;
            ev.node = e.node;
            ev.queue = -1;
            ev.from_drain = true;
            ev.t = elapsed();
            ev.config = m_nodes[e.node].config;
            record(std::move(ev));
            m_deferred.push(std::move(e));
            return;
        }
        simulate_amp(e.node, e.amp, true);
    }

    void expand(int xid, int qi, double popped_key)
    {
        const double t0 = elapsed();
        ++m_stats.expansions;
        ++m_stats.expansions_per_queue[qi];
        {
            PlanEvent ev;
            ev.kind = PlanEvent::Kind::Expand;
            ev.node = xid;
            ev.queue = qi;
            ev.t = t0;
            record(std::move(ev));
        }

        // snapshot; m_nodes may grow below
        const std::vector<int> key = m_nodes[xid].key;
        const Configuration config = m_nodes[xid].config;
        const double g = m_nodes[xid].g;
        const Pose2 ee = m_nodes[xid].ee;
        m_stats.min_ee_goal_distance = std::min(
            m_stats.min_ee_goal_distance,
            (ee.position() - m_scene.goal.pose.position()).norm());

        // single-joint moves: valid only when they touch nothing at all
        for (size_t j = 0; j < m_deltas.size(); ++j) {
            for (const int dir : {+1, -1}) {
                std::vector<int> succ_key = key;
                succ_key[j] += dir;
                const Configuration succ =
                    lattice_config(m_scene.start.robot, m_deltas, succ_key);
                if (!m_scene.robot.within_limits(succ)) {
                    continue;
                }
                const Phase1Result p1 = check_phase1(
                    m_scene.robot, {config, succ}, m_field, m_scene.workspace,
                    m_scene.objects, m_scene.start.objects, &m_counters);
                if (!p1.valid() || p1.contacts_movable) {
                    continue;
                }
                const int sid = make_lattice_node(succ_key);
                try_insert(
                    sid, g + m_deltas[j], xid,
                    make_primitive_action(
                        config,
                        JointStep{static_cast<int>(j), dir * m_deltas[j]}));
            }
        }

        // terminal goal-connection handling inside the delta-sphere
        bool postponed = false;
        if (!m_nodes[xid].amp_done &&
            (ee.position() - m_scene.goal.pose.position()).norm() <= m_params.delta)
        {
            ++m_stats.delta_sphere_expansions;
            if (m_variant.use_dd && !m_nodes[xid].deferred_once &&
                soft_duplicate_check(config, m_registry, m_params.beta))
            {
                // postpone: inflate this node's key and put it back in the
                // queue it came from; it simulates on its next expansion
                m_nodes[xid].deferred_once = true;
                ++m_stats.postponements;
                PlanEvent ev;
                ev.kind = PlanEvent::Kind::Postpone;
                ev.node = xid;
                ev.queue = qi;
                ev.t = elapsed();
                ev.config = config;
                record(std::move(ev));
                m_heaps[qi].push(HeapEntry{2.0 * popped_key, m_seq++, xid, g});
                postponed = true;
            } else {
                std::optional<Action> amp;
                if (m_params.fresh_ik_per_amp) {
                    amp = generate_amp(
                        m_scene.robot, config, m_scene.goal, m_rng, m_params);
                } else if (m_target) {
                    amp = generate_amp_to(
                        m_scene.robot, config, *m_target, m_scene.goal, m_params);
                }
                if (amp) {
                    ++m_stats.amps_generated;
                    const Phase1Result p1 = check_phase1(
                        m_scene.robot, amp->path, m_field, m_scene.workspace,
                        m_scene.objects, m_scene.start.objects, &m_counters);
                    if (!p1.valid()) {
                        ++m_stats.amps_phase1_invalid;
                    }
                    if (p1.valid()) {
                        if (!p1.contacts_movable) {
                            const int gid = free_goal_node(amp->target);
                            if (getenv("MAMO_DEBUG")) {
                                const Pose2 tee = m_nodes[gid].ee;
                                fprintf(stderr, "[free] gid=%d g=%.3f cost=%.3f key0=%.3f ee=(%.4f,%.4f,%.4f) goal_ok=%d\n",
                                    gid, g, amp->cost, g + amp->cost + m_params.w1*m_nodes[gid].h_anchor/m_reach,
                                    tee.x, tee.y, tee.yaw, (int)goal_satisfied(m_scene.goal, tee));
                            }
                            try_insert(gid, g + amp->cost, xid, *amp);
                        } else if (elapsed() > m_t_gate) {
                            simulate_amp(xid, *amp, false);
                        } else {
                            m_deferred.push(DeferredEntry{
                                g + m_nodes[xid].h_anchor / m_reach,
                                m_seq++, xid, *amp});
                            ++m_stats.deferred_parked;
                            PlanEvent ev;
                            ev.kind = PlanEvent::Kind::Park;
                            ev.node = xid;
                            ev.t = elapsed();
                            record(std::move(ev));
                        }
                    }
                }
                m_nodes[xid].amp_done = true;
            }
        }

        if (!postponed) {
            m_nodes[xid].closed_inad = true;
            if (qi == 0) {
                m_nodes[xid].closed_anchor = true;
            }
        }
        m_queue_time[qi] += elapsed() - t0;
    }

    int free_goal_node(const Configuration& target)
    {
        if (!m_params.fresh_ik_per_amp && m_free_goal_id >= 0) {
            return m_free_goal_id;
        }
        const int id = make_goal_node(target, -1);
        if (!m_params.fresh_ik_per_amp) {
            m_free_goal_id = id;
        }
        return id;
    }

    const std::map<int, Pose2>& poses_of(const SearchNode& n) const
    {
        return n.poses_index < 0 ? m_scene.start.objects
                                 : m_pose_overrides[n.poses_index];
    }

    PlanResult finish(PlanStatus status, int goal_id, int terminal_subgoal)
    {
        PlanResult res;
        res.status = status;
        if (status == PlanStatus::Success) {
            std::vector<int> chain;
            for (int id = goal_id; id >= 0; id = m_nodes[id].parent) {
                chain.push_back(id);
            }
            std::reverse(chain.begin(), chain.end());
            for (size_t i = 0; i < chain.size(); ++i) {
                const SearchNode& n = m_nodes[chain[i]];
                res.path.push_back(WorldState{n.config, poses_of(n)});
                if (i > 0) {
                    res.actions.push_back(n.act);
                }
            }
            res.cost = m_nodes[goal_id].g;
            if (terminal_subgoal >= 0) {
                const Subgoal& sg = m_subgoals[terminal_subgoal];
                res.path.push_back(
                    WorldState{sg.amp.target, sg.outcome->final_poses});
                res.actions.push_back(sg.amp);
                res.cost += sg.amp.cost;
            }
        }
        m_stats.validity.configuration_checks += m_counters.configuration_checks;
        m_stats.validity.action_evaluations += m_counters.action_evaluations;
        m_stats.synthetic_time = synthetic();
        m_stats.synthetic_sim_time =
            m_params.sim_cost *
            (m_stats.sim_calls_stage1 + m_stats.sim_calls_stage2);
        m_stats.wall_seconds = wall();
        res.stats = std::move(m_stats);
        res.events = std::move(m_events);
        return res;
    }

    const Scene& m_scene;
    const PlannerParams& m_params;
    const VariantConfig& m_variant;
    const DistanceField& m_field;
    std::vector<double> m_deltas;
    std::optional<Configuration> m_target;
    std::vector<Subgoal> m_subgoals;
    std::vector<Configuration> m_registry;
    Rng& m_rng;
    PlanStats m_stats;
    std::chrono::steady_clock::time_point m_wall_start;

    AnchorHeuristic m_anchor;
    SimSettings m_sim_settings;
    int m_num_queues = 1;
    std::vector<Heap> m_heaps;
    std::vector<double> m_queue_time;
    std::priority_queue<DeferredEntry, std::vector<DeferredEntry>, DeferredCmp>
        m_deferred;
    std::vector<SearchNode> m_nodes;
    std::unordered_map<std::vector<int>, int, KeyHash> m_by_key;
    std::unordered_map<std::vector<int>, int, KeyHash> m_phase2_by_key;
    std::vector<std::map<int, Pose2>> m_pose_overrides;
    std::vector<PlanEvent> m_events;
    ValidityCounters m_counters;
    long m_seq = 0;
    double m_t_gate = 0.0;
    int m_free_goal_id = -1;
    double m_reach = 1.0;
};

} // namespace

PlanResult plan(
    const Scene& scene,
    const PlannerParams& params,
    const VariantConfig& variant,
    std::uint64_t seed)
{
    params.validate();
    validate_scene(scene);
    const std::vector<double> deltas = params.primitive_deltas.empty()
        ? default_primitive_deltas(scene.robot.dof())
        : params.primitive_deltas;
    if (static_cast<int>(deltas.size()) != scene.robot.dof()) {
        throw std::invalid_argument("params.primitive_deltas: wrong joint count");
    }

    const DistanceField field = build_distance_field(
        scene.workspace, scene.objects, scene.start.objects);

    PlanStats stage1;
    ValidityCounters counters;
    if (!check_configuration(
            scene.robot, scene.start.robot, field, scene.workspace, &counters))
    {
        throw std::invalid_argument("plan: start configuration is not valid");
    }

    Rng rng(seed);
    const auto shared_target = find_valid_goal_configuration(
        scene.robot, scene.goal, field, scene.workspace, scene.start.robot,
        rng, 50, &counters);

    std::vector<Subgoal> subgoals;
    std::vector<Configuration> registry;
    if (variant.subgoals != VariantConfig::Subgoals::None) {
        const int n_return = variant.subgoals == VariantConfig::Subgoals::One
            ? 1 : params.n_subgoals;
        const int m_target =
            variant.simulate_samples ? params.m_samples : n_return;
        auto sampled = sample_subgoals(
            scene, params, field, deltas, shared_target,
            n_return, m_target, variant.simulate_samples, rng, &counters);
        subgoals = std::move(sampled.selected);
        stage1.sim_calls_stage1 = sampled.sim_calls;
        if (variant.use_dd) {
            registry = std::move(sampled.failed_sources);
        }
    }
    stage1.subgoals_total = static_cast<int>(subgoals.size());
    for (const auto& sg : subgoals) {
        if (sg.grade == SubgoalGrade::Phase2) {
            ++stage1.subgoals_phase2;
        }
    }
    stage1.validity = counters;

    Search search(
        scene, params, variant, field, deltas, shared_target,
        std::move(subgoals), std::move(registry), rng, std::move(stage1));
    return search.run();
}

std::string plan_result_signature(const PlanResult& r)
{
    std::ostringstream os;
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g,", v);
        os << buf;
    };
    os << plan_status_name(r.status) << ';';
    put(r.cost);
    for (const auto& state : r.path) {
        for (int j = 0; j < state.robot.size(); ++j) {
            put(state.robot[j]);
        }
        for (const auto& [id, pose] : state.objects) {
            os << id << ':';
            put(pose.x);
            put(pose.y);
            put(pose.yaw);
        }
        os << '|';
    }
    os << ';';
    for (const auto& a : r.actions) {
        if (a.kind == Action::Kind::Primitive) {
            os << 'p' << a.step.joint << ',';
            put(a.step.delta);
        } else {
            os << 'a';
            for (int j = 0; j < a.target.size(); ++j) {
                put(a.target[j]);
            }
        }
        os << '/';
    }
    os << ';';
    const PlanStats& s = r.stats;
    os << s.expansions << ',' << s.postponements << ',' << s.deferred_parked
       << ',' << s.validity.configuration_checks << ','
       << s.validity.action_evaluations << ',' << s.sim_calls_stage1 << ','
       << s.sim_calls_stage2 << ',' << s.subgoals_total << ','
       << s.subgoals_phase2 << ',';
    put(s.synthetic_time);
    put(s.synthetic_sim_time);
    for (const long e : s.expansions_per_queue) {
        os << e << ',';
    }
    os << ';' << r.events.size() << ';';
    for (const auto& ev : r.events) {
        os << static_cast<int>(ev.kind) << ',' << ev.node << ',' << ev.queue
           << ',' << ev.stage << ',' << ev.clean << ',' << ev.from_drain << ',';
        put(ev.t);
    }
    return os.str();
}

} // namespace mamo
