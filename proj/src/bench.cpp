#include <mamo/bench.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mamo {

const char* difficulty_name(Difficulty d)
{
    return d == Difficulty::Easy ? "easy" : "difficult";
}

void ExperimentSpec::validate() const
{
    if (scene_sets.empty()) {
        throw std::invalid_argument("experiment: need at least one scene set");
    }
    for (const auto& s : scene_sets) {
        if (s.count < 1) {
            throw std::invalid_argument("experiment: scene set count must be >= 1");
        }
    }
    if (variants.empty()) {
        throw std::invalid_argument("experiment: need at least one variant");
    }
    for (const auto& v : variants) {
        make_variant(v);   // throws on unknown names
    }
    params.validate();
}

Difficulty classify_difficulty(
    const Scene& scene,
    const PlannerParams& params,
    std::uint64_t planner_seed,
    double easy_threshold,
    PlanResult* naive_result)
{
    PlanResult res = plan(scene, params, make_variant("Naive"), planner_seed);
    const Difficulty d =
        (res.success() && res.stats.synthetic_time < easy_threshold)
            ? Difficulty::Easy
            : Difficulty::Difficult;
    if (naive_result) {
        *naive_result = std::move(res);
    }
    return d;
}

namespace {

std::string fmt(const char* format, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

MetricsRecord record_from_result(
    const std::string& scene_id,
    std::uint64_t scene_seed,
    const std::string& variant,
    Difficulty difficulty,
    const PlanResult& res)
{
    MetricsRecord rec;
    rec.scene_id = scene_id;
    rec.scene_seed = scene_seed;
    rec.variant = variant;
    rec.difficulty = difficulty;
    rec.status = plan_status_name(res.status);
    rec.success = res.success();
    rec.planning_time = res.stats.synthetic_time;
    rec.simulation_time = res.stats.synthetic_sim_time;
    rec.sim_calls_stage1 = res.stats.sim_calls_stage1;
    rec.sim_calls_stage2 = res.stats.sim_calls_stage2;
    rec.expansions = res.stats.expansions;
    rec.path_cost = rec.success ? res.cost : std::nan("");
    return rec;
}

struct Aggregate
{
    std::vector<double> planning;
    std::vector<double> simulation;
    int successes = 0;
    int runs = 0;
};

double mean(const std::vector<double>& v)
{
    if (v.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (const double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v)
{
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean(v);
    double s = 0.0;
    for (const double x : v) {
        s += (x - m) * (x - m);
    }
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v)
{
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec)
{
    spec.validate();
    const auto wall_start = std::chrono::steady_clock::now();
    ExperimentResult out;

    for (size_t si = 0; si < spec.scene_sets.size(); ++si) {
        const SceneSetSpec& set = spec.scene_sets[si];
        for (int i = 0; i < set.count; ++i) {
            const std::uint64_t scene_seed =
                mix_seed(spec.seed, si * 1000003ULL + static_cast<std::uint64_t>(i));
            char idbuf[96];
            std::snprintf(idbuf, sizeof(idbuf), "%s_%03d", set.label.c_str(), i);
            const std::string scene_id = idbuf;

            GenParams gen = set.base;
            gen.seed = scene_seed;
            Scene scene;
            bool scene_ok = true;
            try {
                scene = generate_scene(gen);
            } catch (const std::exception&) {
                scene_ok = false;
            }

            // all variants share the scene and the planner seed (paired design)
            const std::uint64_t planner_seed = mix_seed(scene_seed, 0x51ABULL);

            Difficulty difficulty = Difficulty::Difficult;
            PlanResult naive;
            bool have_naive = false;
            if (scene_ok) {
                try {
                    difficulty = classify_difficulty(
                        scene, spec.params, planner_seed, spec.easy_threshold,
                        &naive);
                    have_naive = true;
                } catch (const std::exception&) {
                    have_naive = false;
                }
            }

            for (const auto& variant : spec.variants) {
                MetricsRecord rec;
                if (!scene_ok) {
                    rec.scene_id = scene_id;
                    rec.scene_seed = scene_seed;
                    rec.variant = variant;
                    rec.status = "error";
                    rec.path_cost = std::nan("");
                    out.records.push_back(std::move(rec));
                    continue;
                }
                try {
                    if (variant == "Naive" && have_naive) {
                        rec = record_from_result(
                            scene_id, scene_seed, variant, difficulty, naive);
                    } else {
                        const PlanResult res = plan(
                            scene, spec.params, make_variant(variant), planner_seed);
                        rec = record_from_result(
                            scene_id, scene_seed, variant, difficulty, res);
                    }
                } catch (const std::exception&) {
                    rec = MetricsRecord{};
                    rec.scene_id = scene_id;
                    rec.scene_seed = scene_seed;
                    rec.variant = variant;
                    rec.difficulty = difficulty;
                    rec.status = "error";
                    rec.path_cost = std::nan("");
                }
                out.records.push_back(std::move(rec));
            }
        }
    }

    out.csv = metrics_to_csv(out.records);
    out.summary = summarize_records(out.records);
    out.wall_seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - wall_start).count();
    return out;
}

std::string metrics_to_csv(const std::vector<MetricsRecord>& records)
{
    std::ostringstream os;
    os << "scene,scene_seed,variant,difficulty,status,success,"
          "planning_time_s,simulation_time_s,sim_calls_stage1,"
          "sim_calls_stage2,sim_calls_total,expansions,path_cost\n";
    for (const auto& r : records) {
        os << r.scene_id << ',' << r.scene_seed << ',' << r.variant << ','
           << difficulty_name(r.difficulty) << ',' << r.status << ','
           << (r.success ? 1 : 0) << ','
           << fmt("%.3f", r.planning_time) << ','
           << fmt("%.3f", r.simulation_time) << ','
           << r.sim_calls_stage1 << ',' << r.sim_calls_stage2 << ','
           << (r.sim_calls_stage1 + r.sim_calls_stage2) << ','
           << r.expansions << ',';
        if (std::isnan(r.path_cost)) {
            os << "nan";
        } else {
            os << fmt("%.9g", r.path_cost);
        }
        os << '\n';
    }
    return os.str();
}

std::string summarize_records(const std::vector<MetricsRecord>& records)
{
    // variant -> difficulty -> aggregate over successful runs
    std::vector<std::string> variants;
    for (const auto& r : records) {
        if (std::find(variants.begin(), variants.end(), r.variant) == variants.end()) {
            variants.push_back(r.variant);
        }
    }
    std::ostringstream os;
    os << "runs " << records.size() << "\n";
    for (const auto& v : variants) {
        Aggregate overall;
        Aggregate by_diff[2];
        for (const auto& r : records) {
            if (r.variant != v) {
                continue;
            }
            Aggregate& d = by_diff[r.difficulty == Difficulty::Easy ? 0 : 1];
            ++overall.runs;
            ++d.runs;
            if (r.success) {
                ++overall.successes;
                ++d.successes;
                overall.planning.push_back(r.planning_time);
                overall.simulation.push_back(r.simulation_time);
                d.planning.push_back(r.planning_time);
                d.simulation.push_back(r.simulation_time);
            }
        }
        const double pct = overall.runs
            ? 100.0 * overall.successes / overall.runs : 0.0;
        os << "variant " << v << "\n";
        os << "  success " << fmt("%.1f", pct) << "% ("
           << overall.successes << "/" << overall.runs << ")\n";
        const char* names[2] = {"easy", "difficult"};
        for (int k = 0; k < 2; ++k) {
            const Aggregate& d = by_diff[k];
            os << "  " << names[k] << " n=" << d.runs
               << " solved=" << d.successes
               << " planning_s " << fmt("%.2f", mean(d.planning))
               << " +- " << fmt("%.2f", stddev(d.planning))
               << " (median " << fmt("%.2f", median(d.planning)) << ")"
               << " simulation_s " << fmt("%.2f", mean(d.simulation))
               << " +- " << fmt("%.2f", stddev(d.simulation))
               << " (median " << fmt("%.2f", median(d.simulation)) << ")\n";
        }
    }
    return os.str();
}

} // namespace mamo
