// mamoplan: scene generation, planning, batch benchmarking, plan replay and
// SVG rendering for the planar pushing-aware arm planner.

#include <mamo/bench.hpp>
#include <mamo/plan_io.hpp>
#include <mamo/planner.hpp>
#include <mamo/render.hpp>
#include <mamo/scene.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPlanFailure = 2;
constexpr int kExitInvalidInput = 3;
constexpr int kExitReplayViolation = 4;

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write: " + path);
    }
    out << content;
}

mamo::GenParams parse_gen_flags(
    const std::string& kind, int movable, int immovable,
    double radius_min, double radius_max,
    double friction_min, double friction_max, std::uint64_t seed)
{
    mamo::GenParams p;
    if (kind == "tabletop") {
        p.kind = mamo::WorkspaceKind::Tabletop;
    } else if (kind == "fridge") {
        p.kind = mamo::WorkspaceKind::Fridge;
    } else {
        throw std::invalid_argument("unknown workspace kind: " + kind);
    }
    p.n_movable = movable;
    p.n_immovable = immovable;
    p.radius_min = radius_min;
    p.radius_max = radius_max;
    p.friction_min = friction_min;
    p.friction_max = friction_max;
    p.seed = seed;
    return p;
}

std::string events_to_text(const std::vector<mamo::PlanEvent>& events)
{
    std::ostringstream os;
    for (const auto& ev : events) {
        switch (ev.kind) {
        case mamo::PlanEvent::Kind::Expand:
            os << "expand node=" << ev.node << " queue=" << ev.queue;
            break;
        case mamo::PlanEvent::Kind::Postpone:
            os << "postpone node=" << ev.node << " queue=" << ev.queue;
            break;
        case mamo::PlanEvent::Kind::Park:
            os << "park node=" << ev.node;
            break;
        case mamo::PlanEvent::Kind::Sim:
            os << "sim node=" << ev.node << " stage=" << ev.stage
               << " clean=" << (ev.clean ? 1 : 0)
               << " drain=" << (ev.from_drain ? 1 : 0);
            break;
        }
        char buf[32];
        std::snprintf(buf, sizeof(buf), " t=%.3f", ev.t);
        os << buf << '\n';
    }
    return os.str();
}

std::string trace_to_text(const std::vector<mamo::WorldState>& states)
{
    std::ostringstream os;
    os << "mamoplan trace v1\n";
    os << "states " << states.size() << '\n';
    for (size_t i = 0; i < states.size(); ++i) {
        os << "state " << i << '\n';
        os << "  joints";
        for (int j = 0; j < states[i].robot.size(); ++j) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), " %.9g", states[i].robot[j]);
            os << buf;
        }
        os << '\n';
        for (const auto& [id, pose] : states[i].objects) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "  object %d %.9g %.9g %.9g",
                          id, pose.x, pose.y, pose.yaw);
            os << buf << '\n';
        }
    }
    return os.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"planar pushing-aware arm planner"};
    app.require_subcommand(1);

    // --- gen ---
    auto* gen = app.add_subcommand("gen", "generate a random scene");
    const mamo::GenParams gen_defaults;
    std::uint64_t gen_seed = 0;
    std::string gen_kind = "tabletop";
    int gen_movable = gen_defaults.n_movable;
    int gen_immovable = gen_defaults.n_immovable;
    double gen_rmin = gen_defaults.radius_min, gen_rmax = gen_defaults.radius_max;
    double gen_fmin = gen_defaults.friction_min, gen_fmax = gen_defaults.friction_max;
    std::string gen_out;
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--kind", gen_kind, "tabletop | fridge");
    gen->add_option("--movable", gen_movable, "movable object count");
    gen->add_option("--immovable", gen_immovable, "immovable object count");
    gen->add_option("--radius-min", gen_rmin, "disc radius lower bound (m)");
    gen->add_option("--radius-max", gen_rmax, "disc radius upper bound (m)");
    gen->add_option("--friction-min", gen_fmin, "friction lower bound");
    gen->add_option("--friction-max", gen_fmax, "friction upper bound");
    gen->add_option("--out", gen_out, "output scene file")->required();

    // --- plan ---
    auto* plan_cmd = app.add_subcommand("plan", "plan on a scene");
    std::string plan_scene, plan_variant = "SPAMP", plan_params_path;
    std::string plan_out, plan_events, plan_trace, plan_render;
    std::uint64_t plan_seed = 0;
    double plan_latency_ms = 0.0;
    plan_cmd->add_option("--scene", plan_scene, "scene file")->required();
    plan_cmd->add_option("--variant", plan_variant, "SPAMP | Naive | Naive+DD | SubG | SubG+DD | Phase1");
    plan_cmd->add_option("--seed", plan_seed, "planner seed");
    plan_cmd->add_option("--params", plan_params_path, "planner params file");
    plan_cmd->add_option("--out", plan_out, "output plan file");
    plan_cmd->add_option("--events", plan_events, "write the search event log here");
    plan_cmd->add_option("--trace", plan_trace, "write the executed state trace here");
    plan_cmd->add_option("--render", plan_render, "render the executed plan to this SVG");
    plan_cmd->add_option("--sim-latency", plan_latency_ms, "synthetic per-simulation sleep (ms)");

    // --- bench ---
    auto* bench_cmd = app.add_subcommand("bench", "batch experiment over generated scenes");
    std::vector<std::string> bench_sets;
    std::string bench_variants = "SPAMP,Naive,Naive+DD,SubG,SubG+DD,Phase1";
    std::string bench_out, bench_summary, bench_params_path;
    std::uint64_t bench_seed = 1;
    double bench_latency_ms = 0.0;
    double bench_threshold = 100.0;
    bench_cmd->add_option("--set", bench_sets,
        "scene set KIND:COUNT:MOVABLE:IMMOVABLE (repeatable); default tabletop:50:6:6");
    bench_cmd->add_option("--variants", bench_variants, "comma-separated variant list");
    bench_cmd->add_option("--seed", bench_seed, "experiment seed");
    bench_cmd->add_option("--params", bench_params_path, "planner params file");
    bench_cmd->add_option("--out", bench_out, "metrics CSV path")->required();
    bench_cmd->add_option("--summary", bench_summary, "summary text path");
    bench_cmd->add_option("--sim-latency", bench_latency_ms, "synthetic per-simulation sleep (ms)");
    bench_cmd->add_option("--easy-threshold", bench_threshold, "Naive synthetic-time split (s)");

    // --- replay ---
    auto* replay_cmd = app.add_subcommand("replay", "re-execute and verify a stored plan");
    std::string replay_scene, replay_plan, replay_trace;
    double replay_latency_ms = 0.0;
    replay_cmd->add_option("--scene", replay_scene, "scene file")->required();
    replay_cmd->add_option("--plan", replay_plan, "plan file")->required();
    replay_cmd->add_option("--trace", replay_trace, "write the replayed state trace here");
    replay_cmd->add_option("--sim-latency", replay_latency_ms, "synthetic per-simulation sleep (ms)");

    // --- render ---
    auto* render_cmd = app.add_subcommand("render", "render a scene (optionally with a plan) to SVG");
    std::string render_scene, render_plan, render_out;
    int render_stride = 5;
    render_cmd->add_option("--scene", render_scene, "scene file")->required();
    render_cmd->add_option("--plan", render_plan, "plan file to replay and overlay");
    render_cmd->add_option("--out", render_out, "output SVG path")->required();
    render_cmd->add_option("--stride", render_stride, "arm ghost every N states");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const auto params = parse_gen_flags(
                gen_kind, gen_movable, gen_immovable, gen_rmin, gen_rmax,
                gen_fmin, gen_fmax, gen_seed);
            const mamo::Scene scene = mamo::generate_scene(params);
            mamo::save_scene(scene, gen_out);
            std::cout << "scene " << mamo::scene_hash_hex(scene) << " -> "
                      << gen_out << "\n";
            return kExitOk;
        }

        if (*plan_cmd) {
            const mamo::Scene scene = mamo::load_scene(plan_scene);
            mamo::PlannerParams params;
            if (!plan_params_path.empty()) {
                params = mamo::load_params(plan_params_path);
            }
            params.sim_latency_seconds = plan_latency_ms / 1000.0;
            const auto variant = mamo::make_variant(plan_variant);
            const mamo::PlanResult result =
                mamo::plan(scene, params, variant, plan_seed);

            std::printf(
                "%s: %s cost=%.4f expansions=%ld checks=%ld sims=%ld+%ld "
                "synthetic=%.2fs wall=%.2fs\n",
                plan_variant.c_str(), mamo::plan_status_name(result.status),
                result.cost, result.stats.expansions,
                result.stats.validity.action_evaluations,
                result.stats.sim_calls_stage1, result.stats.sim_calls_stage2,
                result.stats.synthetic_time, result.stats.wall_seconds);

            if (!plan_events.empty()) {
                write_file(plan_events, events_to_text(result.events));
            }
            if (!result.success()) {
                return kExitPlanFailure;
            }
            const mamo::PlanFile plan_file = mamo::plan_file_from_result(
                result, scene, params, plan_variant, plan_seed);
            if (!plan_out.empty()) {
                mamo::save_plan(plan_file, plan_out);
            }
            if (!plan_trace.empty() || !plan_render.empty()) {
                const auto report = mamo::replay(scene, plan_file);
                if (!plan_trace.empty()) {
                    write_file(plan_trace, trace_to_text(report.states));
                }
                if (!plan_render.empty()) {
                    mamo::RenderSpec rspec;
                    rspec.scene = &scene;
                    rspec.trajectory = &report.states;
                    rspec.stride = render_stride;
                    write_file(plan_render, mamo::render_svg(rspec));
                }
            }
            return kExitOk;
        }

        if (*bench_cmd) {
            mamo::ExperimentSpec spec;
            spec.seed = bench_seed;
            spec.easy_threshold = bench_threshold;
            if (!bench_params_path.empty()) {
                spec.params = mamo::load_params(bench_params_path);
            }
            spec.params.sim_latency_seconds = bench_latency_ms / 1000.0;
            if (bench_sets.empty()) {
                bench_sets.push_back("tabletop:50:6:6");
            }
            for (const auto& set_str : bench_sets) {
                mamo::SceneSetSpec set;
                int count = 0, movable = 0, immovable = 0;
                char kind[32] = {0};
                if (std::sscanf(set_str.c_str(), "%31[^:]:%d:%d:%d",
                                kind, &count, &movable, &immovable) != 4) {
                    throw std::invalid_argument("bad --set value: " + set_str);
                }
                const mamo::GenParams defaults;
                set.base = parse_gen_flags(
                    kind, movable, immovable, defaults.radius_min,
                    defaults.radius_max, defaults.friction_min,
                    defaults.friction_max, 0);
                set.count = count;
                set.label = kind;
                spec.scene_sets.push_back(std::move(set));
            }
            std::istringstream vs(bench_variants);
            std::string v;
            while (std::getline(vs, v, ',')) {
                if (!v.empty()) {
                    spec.variants.push_back(v);
                }
            }
            const mamo::ExperimentResult result = mamo::run_experiment(spec);
            write_file(bench_out, result.csv);
            if (!bench_summary.empty()) {
                write_file(bench_summary, result.summary);
            }
            std::cout << result.summary;
            std::fprintf(stderr, "bench wall time: %.2fs\n", result.wall_seconds);
            return kExitOk;
        }

        if (*replay_cmd) {
            const mamo::Scene scene = mamo::load_scene(replay_scene);
            const mamo::PlanFile plan_file = mamo::load_plan(replay_plan);
            const auto report =
                mamo::replay(scene, plan_file, replay_latency_ms / 1000.0);
            if (!report.hash_match) {
                std::cout << "note: plan was produced for a different scene ("
                          << plan_file.scene_hash << ")\n";
            }
            for (const auto& note : report.notes) {
                std::cout << "violation: " << note << "\n";
            }
            std::cout << (report.valid ? "valid" : "invalid")
                      << " (goal " << (report.goal_met ? "met" : "unmet")
                      << ", " << report.violations.size() << " constraint violations)\n";
            if (!replay_trace.empty()) {
                write_file(replay_trace, trace_to_text(report.states));
            }
            return report.valid ? kExitOk : kExitReplayViolation;
        }

        if (*render_cmd) {
            const mamo::Scene scene = mamo::load_scene(render_scene);
            mamo::RenderSpec rspec;
            rspec.scene = &scene;
            rspec.stride = render_stride;
            std::vector<mamo::WorldState> states;
            if (!render_plan.empty()) {
                const mamo::PlanFile plan_file = mamo::load_plan(render_plan);
                states = mamo::replay(scene, plan_file).states;
                rspec.trajectory = &states;
            }
            write_file(render_out, mamo::render_svg(rspec));
            std::cout << "wrote " << render_out << "\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    }
    return kExitInvalidInput;
}
