#include <mamo/plan_io.hpp>

#include <mamo/validity.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mamo {

namespace {

std::string fmt9(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace

PlanFile plan_file_from_result(
    const PlanResult& result,
    const Scene& scene,
    const PlannerParams& params,
    const std::string& variant_name,
    std::uint64_t seed)
{
    PlanFile plan;
    plan.scene_hash = scene_hash_hex(scene);
    plan.variant = variant_name;
    plan.seed = seed;
    plan.dof = scene.robot.dof();
    plan.amp_step = params.amp_step;
    plan.cost = result.cost;
    plan.actions = result.actions;
    return plan;
}

std::string plan_to_string(const PlanFile& plan)
{
    std::ostringstream os;
    os << "mamoplan plan v1\n";
    os << "scene_hash " << plan.scene_hash << '\n';
    os << "variant " << plan.variant << '\n';
    os << "seed " << plan.seed << '\n';
    os << "dof " << plan.dof << '\n';
    os << "amp_step " << fmt9(plan.amp_step) << '\n';
    os << "cost " << fmt9(plan.cost) << '\n';
    os << "actions " << plan.actions.size() << '\n';
    for (const auto& a : plan.actions) {
        if (a.kind == Action::Kind::Primitive) {
            os << "prim " << a.step.joint << ' ' << fmt9(a.step.delta) << '\n';
        } else {
            os << "amp";
            for (int j = 0; j < a.target.size(); ++j) {
                os << ' ' << fmt9(a.target[j]);
            }
            os << '\n';
        }
    }
    return os.str();
}

PlanFile plan_from_string(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    auto fail = [](const std::string& what) -> void {
        throw std::invalid_argument("plan parse: " + what);
    };
    if (!std::getline(is, line) || line != "mamoplan plan v1") {
        fail("missing header");
    }
    PlanFile plan;
    std::string key;
    long n_actions = -1;
    while (is >> key) {
        if (key == "scene_hash") {
            is >> plan.scene_hash;
        } else if (key == "variant") {
            is >> plan.variant;
        } else if (key == "seed") {
            is >> plan.seed;
        } else if (key == "dof") {
            is >> plan.dof;
        } else if (key == "amp_step") {
            is >> plan.amp_step;
        } else if (key == "cost") {
            is >> plan.cost;
        } else if (key == "actions") {
            is >> n_actions;
            break;
        } else {
            fail("unknown key '" + key + "'");
        }
        if (!is) {
            fail("bad value for '" + key + "'");
        }
    }
    if (plan.dof < 2) {
        fail("dof must be >= 2");
    }
    if (n_actions < 0) {
        fail("missing actions section");
    }
    for (long i = 0; i < n_actions; ++i) {
        if (!(is >> key)) {
            fail("truncated action list");
        }
        Action a;
        if (key == "prim") {
            a.kind = Action::Kind::Primitive;
            if (!(is >> a.step.joint >> a.step.delta)) {
                fail("malformed prim action");
            }
            if (a.step.joint < 0 || a.step.joint >= plan.dof) {
                fail("prim action joint out of range");
            }
            a.cost = std::abs(a.step.delta);
        } else if (key == "amp") {
            a.kind = Action::Kind::Amp;
            a.target.resize(plan.dof);
            for (int j = 0; j < plan.dof; ++j) {
                if (!(is >> a.target[j])) {
                    fail("malformed amp action");
                }
            }
        } else {
            fail("unknown action kind '" + key + "'");
        }
        plan.actions.push_back(std::move(a));
    }
    return plan;
}

PlanFile load_plan(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open plan file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return plan_from_string(buf.str());
}

void save_plan(const PlanFile& plan, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write plan file: " + path);
    }
    out << plan_to_string(plan);
}

ReplayReport replay(
    const Scene& scene,
    const PlanFile& plan,
    double sim_latency_seconds)
{
    if (plan.dof != scene.robot.dof()) {
        throw std::invalid_argument(
            "replay: plan dof " + std::to_string(plan.dof) +
            " does not match scene robot dof " +
            std::to_string(scene.robot.dof()));
    }
    ReplayReport report;
    report.hash_match = plan.scene_hash == scene_hash_hex(scene);

    const DistanceField field = build_distance_field(
        scene.workspace, scene.objects, scene.start.objects);
    SimSettings sim_settings;
    sim_settings.latency_seconds = sim_latency_seconds;

    Configuration c = scene.start.robot;
    std::map<int, Pose2> poses = scene.start.objects;
    report.states.push_back(WorldState{c, poses});

    bool physical_failure = false;
    for (size_t i = 0; i < plan.actions.size(); ++i) {
        const Action& a = plan.actions[i];
        std::vector<Configuration> path;
        if (a.kind == Action::Kind::Primitive) {
            Configuration succ = c;
            succ[a.step.joint] += a.step.delta;
            path = {c, succ};
        } else {
            path = interpolate(c, a.target, plan.amp_step);
        }

        const Phase1Result p1 = check_phase1(
            scene.robot, path, field, scene.workspace, scene.objects, poses);
        if (!p1.valid()) {
            report.notes.push_back(
                "action " + std::to_string(i) +
                ": immovable contact or invalid configuration at path state " +
                std::to_string(p1.violation_index));
            physical_failure = true;
        }
        const auto outcome = simulate_path(
            scene.robot, path, scene.objects, poses, scene.workspace,
            sim_settings);
        if (!outcome) {
            report.notes.push_back(
                "action " + std::to_string(i) + ": contact resolution failed");
            physical_failure = true;
            break;
        }
        for (const auto& v : outcome->violations) {
            report.violations.push_back(v);
            report.notes.push_back(
                "action " + std::to_string(i) + ": object " +
                std::to_string(v.object_id) + " " + violation_kind_name(v.kind) +
                " at step " + std::to_string(v.step));
        }
        poses = outcome->final_poses;
        c = path.back();
        report.states.push_back(WorldState{c, poses});
        if (!outcome->violations.empty()) {
            physical_failure = true;
            break;
        }
    }

    report.goal_met = goal_satisfied(scene.goal, end_effector_pose(scene.robot, c));
    report.valid = !physical_failure && report.violations.empty() && report.goal_met;
    return report;
}

} // namespace mamo
