#include <mamo/scene.hpp>

#include <mamo/planner.hpp>
#include <mamo/validity.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mamo {

void Workspace::validate() const
{
    if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
        throw std::invalid_argument("workspace.bounds: must have positive area");
    }
    const double min_side = std::min(bounds.width(), bounds.height());
    if (!(grid_resolution > 0.0) || grid_resolution > min_side / 10.0) {
        throw std::invalid_argument(
            "workspace.grid_resolution: must be > 0 and <= min side / 10");
    }
}

const ObjectModel* Scene::object(int id) const
{
    for (const auto& o : objects) {
        if (o.id == id) {
            return &o;
        }
    }
    return nullptr;
}

namespace {

std::string fmt9(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void validate_object(const ObjectModel& o)
{
    const std::string tag = "object " + std::to_string(o.id);
    if (!(o.radius > 0.0)) {
        throw std::invalid_argument(tag + ": radius must be > 0");
    }
    if (!(o.height > 0.0)) {
        throw std::invalid_argument(tag + ": height must be > 0");
    }
    if (!(o.mass > 0.0)) {
        throw std::invalid_argument(tag + ": mass must be > 0");
    }
    if (!(o.friction > 0.0)) {
        throw std::invalid_argument(tag + ": friction must be > 0");
    }
    if (o.movable) {
        if (!(o.constraints.max_step_displacement > 0.0)) {
            throw std::invalid_argument(tag + ": max_step_displacement must be > 0");
        }
        if (!(o.constraints.topple_ratio > 0.0)) {
            throw std::invalid_argument(tag + ": topple_ratio must be > 0");
        }
    }
}

} // namespace

void validate_scene(const Scene& scene)
{
    scene.workspace.validate();
    scene.robot.validate();

    if (!(scene.goal.pos_tolerance > 0.0)) {
        throw std::invalid_argument("goal.pos_tolerance: must be > 0");
    }
    if (!(scene.goal.yaw_tolerance > 0.0)) {
        throw std::invalid_argument("goal.yaw_tolerance: must be > 0");
    }

    if (scene.start.robot.size() != scene.robot.dof()) {
        throw std::invalid_argument("robot.joints: wrong joint count");
    }
    if (!scene.robot.within_limits(scene.start.robot)) {
        throw std::invalid_argument("robot.joints: start configuration violates joint limits");
    }

    std::map<int, const ObjectModel*> by_id;
    for (const auto& o : scene.objects) {
        validate_object(o);
        if (!by_id.emplace(o.id, &o).second) {
            throw std::invalid_argument(
                "object " + std::to_string(o.id) + ": duplicate id");
        }
    }
    if (scene.start.objects.size() != scene.objects.size()) {
        throw std::invalid_argument("objects: pose count does not match model count");
    }
    for (const auto& [id, pose] : scene.start.objects) {
        if (!by_id.count(id)) {
            throw std::invalid_argument(
                "object " + std::to_string(id) + ": pose without model");
        }
        const ObjectModel& o = *by_id.at(id);
        const Vec2 c = pose.position();
        if (!scene.workspace.bounds.contains(c, o.radius)) {
            throw std::invalid_argument(
                "object " + std::to_string(id) + ": footprint crosses the workspace boundary");
        }
    }
    // pairwise overlap
    for (auto it = scene.start.objects.begin(); it != scene.start.objects.end(); ++it) {
        auto jt = it;
        for (++jt; jt != scene.start.objects.end(); ++jt) {
            const ObjectModel& a = *by_id.at(it->first);
            const ObjectModel& b = *by_id.at(jt->first);
            const double d = (it->second.position() - jt->second.position()).norm();
            if (d < a.radius + b.radius) {
                throw std::invalid_argument(
                    "objects " + std::to_string(a.id) + " and " + std::to_string(b.id) +
                    " overlap: center distance " + fmt9(d) + " < radii sum " +
                    fmt9(a.radius + b.radius));
            }
        }
    }
}

std::string scene_to_string(const Scene& scene)
{
    std::ostringstream os;
    os << "mamoplan scene v1\n";
    os << "workspace\n";
    os << "  bounds " << fmt9(scene.workspace.bounds.min_x) << ' '
       << fmt9(scene.workspace.bounds.min_y) << ' '
       << fmt9(scene.workspace.bounds.max_x) << ' '
       << fmt9(scene.workspace.bounds.max_y) << '\n';
    os << "  grid_resolution " << fmt9(scene.workspace.grid_resolution) << '\n';

    const RobotModel& r = scene.robot;
    os << "robot\n";
    os << "  base " << fmt9(r.base.x) << ' ' << fmt9(r.base.y) << ' '
       << fmt9(r.base.yaw) << '\n';
    os << "  link_lengths";
    for (const double v : r.link_lengths) {
        os << ' ' << fmt9(v);
    }
    os << '\n';
    os << "  link_thickness";
    for (const double v : r.link_thickness) {
        os << ' ' << fmt9(v);
    }
    os << '\n';
    os << "  joint_limits";
    for (const auto& lim : r.joint_limits) {
        os << ' ' << fmt9(lim[0]) << ' ' << fmt9(lim[1]);
    }
    os << '\n';
    os << "  joints";
    for (int j = 0; j < scene.start.robot.size(); ++j) {
        os << ' ' << fmt9(scene.start.robot[j]);
    }
    os << '\n';

    os << "objects " << scene.objects.size() << '\n';
    for (const auto& o : scene.objects) {
        const Pose2& pose = scene.start.objects.at(o.id);
        os << "object\n";
        os << "  id " << o.id << '\n';
        os << "  radius " << fmt9(o.radius) << '\n';
        os << "  height " << fmt9(o.height) << '\n';
        os << "  mass " << fmt9(o.mass) << '\n';
        os << "  friction " << fmt9(o.friction) << '\n';
        os << "  movable " << (o.movable ? 1 : 0) << '\n';
        os << "  max_step_displacement " << fmt9(o.constraints.max_step_displacement) << '\n';
        os << "  topple_ratio " << fmt9(o.constraints.topple_ratio) << '\n';
        os << "  must_stay_in_workspace " << (o.constraints.must_stay_in_workspace ? 1 : 0) << '\n';
        os << "  pose " << fmt9(pose.x) << ' ' << fmt9(pose.y) << ' ' << fmt9(pose.yaw) << '\n';
    }

    os << "goal\n";
    os << "  pose " << fmt9(scene.goal.pose.x) << ' ' << fmt9(scene.goal.pose.y)
       << ' ' << fmt9(scene.goal.pose.yaw) << '\n';
    os << "  pos_tolerance " << fmt9(scene.goal.pos_tolerance) << '\n';
    os << "  yaw_tolerance " << fmt9(scene.goal.yaw_tolerance) << '\n';
    return os.str();
}

namespace {

// Line-oriented reader for the canonical scene/params text format.
class LineReader
{
public:
    explicit LineReader(const std::string& text)
    {
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line)) {
            m_lines.push_back(line);
        }
    }

    bool next(std::vector<std::string>& tokens)
    {
        while (m_pos < m_lines.size()) {
            tokens.clear();
            std::istringstream is(m_lines[m_pos]);
            ++m_pos;
            std::string tok;
            while (is >> tok) {
                tokens.push_back(tok);
            }
            if (!tokens.empty() && tokens[0][0] != '#') {
                return true;
            }
        }
        return false;
    }

    size_t line() const { return m_pos; }

private:
    std::vector<std::string> m_lines;
    size_t m_pos = 0;
};

[[noreturn]] void parse_fail(const LineReader& r, const std::string& what)
{
    throw std::invalid_argument(
        "scene parse: line " + std::to_string(r.line()) + ": " + what);
}

double to_double(const LineReader& r, const std::string& tok, const char* field)
{
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') {
        parse_fail(r, std::string(field) + ": not a number: '" + tok + "'");
    }
    return v;
}

long to_long(const LineReader& r, const std::string& tok, const char* field)
{
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') {
        parse_fail(r, std::string(field) + ": not an integer: '" + tok + "'");
    }
    return v;
}

std::vector<std::string> expect(
    LineReader& r, const std::string& key, size_t min_values, size_t max_values)
{
    std::vector<std::string> t;
    if (!r.next(t)) {
        parse_fail(r, "unexpected end of file, expected '" + key + "'");
    }
    if (t[0] != key) {
        parse_fail(r, "expected '" + key + "', got '" + t[0] + "'");
    }
    const size_t n = t.size() - 1;
    if (n < min_values || n > max_values) {
        parse_fail(r, "'" + key + "': wrong value count");
    }
    return t;
}

} // namespace

Scene scene_from_string(const std::string& text)
{
    LineReader r(text);
    std::vector<std::string> t;
    if (!r.next(t) || t.size() != 3 || t[0] != "mamoplan" || t[1] != "scene" || t[2] != "v1") {
        parse_fail(r, "missing 'mamoplan scene v1' header");
    }

    Scene scene;
    expect(r, "workspace", 0, 0);
    t = expect(r, "bounds", 4, 4);
    scene.workspace.bounds = Rect{
        to_double(r, t[1], "bounds"), to_double(r, t[2], "bounds"),
        to_double(r, t[3], "bounds"), to_double(r, t[4], "bounds")};
    t = expect(r, "grid_resolution", 1, 1);
    scene.workspace.grid_resolution = to_double(r, t[1], "grid_resolution");

    expect(r, "robot", 0, 0);
    t = expect(r, "base", 3, 3);
    scene.robot.base = Pose2{
        to_double(r, t[1], "base"), to_double(r, t[2], "base"),
        normalize_angle(to_double(r, t[3], "base"))};
    t = expect(r, "link_lengths", 1, 64);
    for (size_t i = 1; i < t.size(); ++i) {
        scene.robot.link_lengths.push_back(to_double(r, t[i], "link_lengths"));
    }
    const size_t q = scene.robot.link_lengths.size();
    t = expect(r, "link_thickness", q, q);
    for (size_t i = 1; i < t.size(); ++i) {
        scene.robot.link_thickness.push_back(to_double(r, t[i], "link_thickness"));
    }
    t = expect(r, "joint_limits", 2 * q, 2 * q);
    for (size_t i = 1; i + 1 < t.size(); i += 2) {
        scene.robot.joint_limits.push_back(
            {to_double(r, t[i], "joint_limits"), to_double(r, t[i + 1], "joint_limits")});
    }
    t = expect(r, "joints", q, q);
    scene.start.robot.resize(static_cast<int>(q));
    for (size_t i = 1; i < t.size(); ++i) {
        scene.start.robot[static_cast<int>(i - 1)] = to_double(r, t[i], "joints");
    }

    t = expect(r, "objects", 1, 1);
    const long count = to_long(r, t[1], "objects");
    if (count < 0) {
        parse_fail(r, "objects: negative count");
    }
    for (long i = 0; i < count; ++i) {
        expect(r, "object", 0, 0);
        ObjectModel o;
        t = expect(r, "id", 1, 1);
        o.id = static_cast<int>(to_long(r, t[1], "id"));
        t = expect(r, "radius", 1, 1);
        o.radius = to_double(r, t[1], "radius");
        t = expect(r, "height", 1, 1);
        o.height = to_double(r, t[1], "height");
        t = expect(r, "mass", 1, 1);
        o.mass = to_double(r, t[1], "mass");
        t = expect(r, "friction", 1, 1);
        o.friction = to_double(r, t[1], "friction");
        t = expect(r, "movable", 1, 1);
        o.movable = to_long(r, t[1], "movable") != 0;
        t = expect(r, "max_step_displacement", 1, 1);
        o.constraints.max_step_displacement = to_double(r, t[1], "max_step_displacement");
        t = expect(r, "topple_ratio", 1, 1);
        o.constraints.topple_ratio = to_double(r, t[1], "topple_ratio");
        t = expect(r, "must_stay_in_workspace", 1, 1);
        o.constraints.must_stay_in_workspace = to_long(r, t[1], "must_stay_in_workspace") != 0;
        t = expect(r, "pose", 3, 3);
        const Pose2 pose{
            to_double(r, t[1], "pose"), to_double(r, t[2], "pose"),
            normalize_angle(to_double(r, t[3], "pose"))};
        if (scene.start.objects.count(o.id)) {
            parse_fail(r, "object " + std::to_string(o.id) + ": duplicate id");
        }
        scene.start.objects[o.id] = pose;
        scene.objects.push_back(o);
    }

    expect(r, "goal", 0, 0);
    t = expect(r, "pose", 3, 3);
    scene.goal.pose = Pose2{
        to_double(r, t[1], "pose"), to_double(r, t[2], "pose"),
        normalize_angle(to_double(r, t[3], "pose"))};
    t = expect(r, "pos_tolerance", 1, 1);
    scene.goal.pos_tolerance = to_double(r, t[1], "pos_tolerance");
    t = expect(r, "yaw_tolerance", 1, 1);
    scene.goal.yaw_tolerance = to_double(r, t[1], "yaw_tolerance");

    if (r.next(t)) {
        parse_fail(r, "trailing content after goal section");
    }
    validate_scene(scene);
    return scene;
}

Scene load_scene(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scene file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return scene_from_string(buf.str());
}

void save_scene(const Scene& scene, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write scene file: " + path);
    }
    out << scene_to_string(scene);
}

std::uint64_t scene_hash(const Scene& scene)
{
    const std::string s = scene_to_string(scene);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string scene_hash_hex(const Scene& scene)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(scene_hash(scene)));
    return buf;
}

namespace {

struct PlacedDisc
{
    Vec2 center;
    double radius;
};

bool disc_clear(const std::vector<PlacedDisc>& placed, const Vec2& c, double r, double margin)
{
    for (const auto& d : placed) {
        if ((d.center - c).norm() < d.radius + r + margin) {
            return false;
        }
    }
    return true;
}

// Exact clearance of every link capsule to every disc; also enforces
// workspace containment and non-adjacent self-collision. Mirrors the
// conservative runtime check with extra slack so generated starts always
// pass the grid-based validity test. Returns the minimum disc clearance,
// or -1 when the configuration is unusable.
double start_config_clearance(
    const RobotModel& robot,
    const Configuration& c,
    const Workspace& ws,
    const std::vector<PlacedDisc>& discs,
    double slack)
{
    std::vector<LinkSegment> links;
    link_segments(robot, c, links);
    double min_clear = 1e9;
    for (const auto& link : links) {
        if (!ws.bounds.contains(link.a, link.thickness) ||
            !ws.bounds.contains(link.b, link.thickness))
        {
            return -1.0;
        }
        for (const auto& d : discs) {
            const double clear =
                point_segment_distance(d.center, link.a, link.b) - d.radius - link.thickness;
            if (clear <= slack) {
                return -1.0;
            }
            min_clear = std::min(min_clear, clear);
        }
    }
    for (size_t i = 0; i < links.size(); ++i) {
        for (size_t j = i + 2; j < links.size(); ++j) {
            const double dist = segment_segment_distance(
                links[i].a, links[i].b, links[j].a, links[j].b);
            if (dist < links[i].thickness + links[j].thickness) {
                return -1.0;
            }
        }
    }
    return min_clear;
}

std::vector<PlacedDisc> fridge_wall(std::vector<ObjectModel>& objects,
                                    std::map<int, Pose2>& poses,
                                    int first_id)
{
    // U-shaped wall of touching immovable discs along the left, back and
    // right edges; the opening faces the robot base.
    const double r = 0.025;
    const double lo = 0.035;
    const double hi = 0.565;
    const double step = (hi - lo) / 10.0;   // 0.053, no overlap between discs
    std::vector<Vec2> centers;
    for (int i = 0; i <= 10; ++i) {
        centers.emplace_back(lo, lo + i * step);          // left
    }
    for (int i = 1; i <= 10; ++i) {
        centers.emplace_back(lo + i * step, hi);          // back
    }
    for (int i = 1; i <= 10; ++i) {
        centers.emplace_back(hi, hi - i * step);          // right
    }
    std::vector<PlacedDisc> placed;
    int id = first_id;
    for (const Vec2& c : centers) {
        ObjectModel o;
        o.id = id++;
        o.radius = r;
        o.height = 0.5;
        o.mass = 10.0;
        o.friction = 1.0;
        o.movable = false;
        objects.push_back(o);
        poses[o.id] = Pose2{c.x(), c.y(), 0.0};
        placed.push_back({c, r});
    }
    return placed;
}

} // namespace

Scene generate_scene(const GenParams& params)
{
    if (params.n_movable < 0 || params.n_immovable < 0) {
        throw std::invalid_argument("generate_scene: counts must be >= 0");
    }
    if (!(params.radius_min > 0.0) || params.radius_max < params.radius_min) {
        throw std::invalid_argument("generate_scene: bad radius range");
    }
    if (!(params.friction_min > 0.0) || params.friction_max < params.friction_min) {
        throw std::invalid_argument("generate_scene: bad friction range");
    }
    if (params.n_immovable == 0) {
        throw std::runtime_error(
            "generate_scene: no immovable obstacle available as grasp target");
    }

    Scene scene;
    scene.workspace.grid_resolution = 0.01;
    if (params.kind == WorkspaceKind::Tabletop) {
        scene.workspace.bounds = Rect{0.0, 0.0, 0.6, 0.8};
    } else {
        scene.workspace.bounds = Rect{0.0, 0.0, 0.6, 0.6};
    }
    scene.robot = default_robot(Pose2{0.30, 0.05, M_PI / 2.0});

    const Vec2 base_origin(scene.robot.base.x, scene.robot.base.y);
    const double placement_margin = 0.005;
    const int n_content = params.n_movable + params.n_immovable;

    Rng rng(params.seed);
    Rng probe(mix_seed(params.seed, 0xA11CE));

    const int max_attempts = 200;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<ObjectModel> objects;
        std::map<int, Pose2> poses;
        std::vector<PlacedDisc> placed;
        if (params.kind == WorkspaceKind::Fridge) {
            placed = fridge_wall(objects, poses, n_content);
        }
        const std::vector<PlacedDisc> wall = placed;

        const double thick = scene.robot.max_thickness();
        auto make_object = [&](int id, double radius, bool movable) {
            ObjectModel o;
            o.id = id;
            o.radius = radius;
            o.height = rng.uniform(0.06, 0.30);
            o.mass = rng.uniform(0.1, 0.5);
            o.friction = rng.uniform(params.friction_min, params.friction_max);
            o.movable = movable;
            return o;
        };
        auto place_uniform = [&](int id, bool movable,
                                 const Vec2* keep_out, double keep_out_dist) {
            const double radius = rng.uniform(params.radius_min, params.radius_max);
            for (int tries = 0; tries < 2000; ++tries) {
                const Vec2 c(
                    rng.uniform(scene.workspace.bounds.min_x + radius,
                                scene.workspace.bounds.max_x - radius),
                    rng.uniform(scene.workspace.bounds.min_y + radius,
                                scene.workspace.bounds.max_y - radius));
                if ((c - base_origin).norm() < radius + params.base_clearance) {
                    continue;
                }
                if (keep_out && (c - *keep_out).norm() <= radius + keep_out_dist) {
                    continue;
                }
                if (!disc_clear(placed, c, radius, placement_margin)) {
                    continue;
                }
                objects.push_back(make_object(id, radius, movable));
                poses[id] = Pose2{c.x(), c.y(), rng.uniform(-M_PI, M_PI)};
                placed.push_back({c, radius});
                return true;
            }
            return false;
        };

        // immovable obstacles first; the grasp target is one of them
        bool ok = true;
        for (int i = 0; i < params.n_immovable && ok; ++i) {
            ok = place_uniform(params.n_movable + i, false, nullptr, 0.0);
        }
        if (!ok) {
            continue;
        }
        const int target_id = params.n_movable + rng.uniform_int(params.n_immovable);
        const ObjectModel* target = nullptr;
        for (const auto& o : objects) {
            if (o.id == target_id) {
                target = &o;
            }
        }
        const Vec2 target_center = poses.at(target_id).position();
        Vec2 dir = target_center - scene.workspace.bounds.center();
        if (dir.norm() < 1e-9) {
            dir = Vec2(1.0, 0.0);
        } else {
            dir.normalize();
        }
        // pre-grasp point between the workspace center and the obstacle, at
        // radius + 0.05 from its surface, facing it
        const Vec2 goal_pos = target_center - dir * (2.0 * target->radius + 0.05);
        scene.goal.pose = Pose2{
            goal_pos.x(), goal_pos.y(),
            std::atan2(target_center.y() - goal_pos.y(), target_center.x() - goal_pos.x())};
        scene.goal.pos_tolerance = 0.01;
        scene.goal.yaw_tolerance = 0.15;
        if (!scene.workspace.bounds.contains(goal_pos, thick)) {
            continue;
        }
        bool goal_clear = true;
        for (const auto& d : placed) {
            if ((d.center - goal_pos).norm() <= d.radius + thick + 0.005) {
                goal_clear = false;
                break;
            }
        }
        if (!goal_clear) {
            continue;
        }

        // ring movables: jittered circle around the pre-grasp so that
        // reaching it is contact-rich
        const int n_ring = std::min(params.goal_ring_movables, params.n_movable);
        for (int i = 0; i < n_ring && ok; ++i) {
            const double radius = rng.uniform(params.radius_min, params.radius_max);
            bool put = false;
            for (int tries = 0; tries < 200; ++tries) {
                const double angle =
                    2.0 * M_PI * (i + rng.uniform(0.0, 0.9)) / n_ring;
                const double dist = radius + thick + rng.uniform(0.015, 0.09);
                const Vec2 c = goal_pos + dist * Vec2(std::cos(angle), std::sin(angle));
                if (!scene.workspace.bounds.contains(c, radius)) {
                    continue;
                }
                if ((c - base_origin).norm() < radius + 0.15) {
                    continue;   // never wedge the ring into the staging arc
                }
                if (!disc_clear(placed, c, radius, placement_margin)) {
                    continue;
                }
                objects.push_back(make_object(i, radius, true));
                poses[i] = Pose2{c.x(), c.y(), rng.uniform(-M_PI, M_PI)};
                placed.push_back({c, radius});
                put = true;
                break;
            }
            ok = put;
        }
        if (!ok) {
            continue;
        }
        // remaining movables uniformly, clear of the pre-grasp point
        for (int i = n_ring; i < params.n_movable && ok; ++i) {
            ok = place_uniform(i, true, &goal_pos, thick + 0.005);
        }
        if (!ok) {
            continue;
        }

        // instance feasibility: the goal pose needs a collision-valid
        // configuration, and the end effector needs some grid corridor from
        // the goal out of the immovable clutter
        const DistanceField field =
            build_distance_field(scene.workspace, objects, poses);
        Configuration home = Configuration::Zero(scene.robot.dof());
        if (!find_valid_goal_configuration(
                scene.robot, scene.goal, field, scene.workspace, home, probe))
        {
            continue;
        }
        const AnchorHeuristic reachability = build_anchor_heuristic(
            field, goal_pos, scene.robot.max_thickness());

        // start configuration: valid and clear of every object; among the
        // sampled candidates keep the best-cleared one away from the goal
        // neighbourhood so instances start uncluttered
        std::optional<Configuration> start;
        std::optional<Configuration> fallback;
        double best_score = -1.0;
        double fallback_score = -1.0;
        for (int tries = 0; tries < 500; ++tries) {
            Configuration c(scene.robot.dof());
            for (int j = 0; j < scene.robot.dof(); ++j) {
                c[j] = rng.uniform(scene.robot.joint_limits[j][0],
                                   scene.robot.joint_limits[j][1]);
            }
            const double clear =
                start_config_clearance(scene.robot, c, scene.workspace, placed, 0.012);
            if (clear < 0.0) {
                continue;
            }
            const Pose2 ee = end_effector_pose(scene.robot, c);
            if (reachability.at(ee.position()) >= reachability.blocked_value) {
                continue;   // end effector cut off from the goal corridor
            }
            if (clear > fallback_score) {
                fallback_score = clear;
                fallback = c;
            }
            if ((ee.position() - goal_pos).norm() > 0.3 && clear > best_score) {
                best_score = clear;
                start = c;
            }
        }
        if (!start) {
            start = fallback;
        }
        if (!start) {
            continue;
        }

        std::sort(objects.begin(), objects.end(),
                  [](const ObjectModel& a, const ObjectModel& b) { return a.id < b.id; });
        scene.objects = std::move(objects);
        scene.start.objects = std::move(poses);
        scene.start.robot = *start;

        // canonicalize all floats to the 9-significant-digit file form so
        // save/load round-trips are exact field-for-field
        Scene canonical = scene_from_string(scene_to_string(scene));
        validate_scene(canonical);
        return canonical;
    }
    throw std::runtime_error(
        "generate_scene: placement failed after " + std::to_string(max_attempts) +
        " attempts (workspace too crowded or goal infeasible)");
}

} // namespace mamo
