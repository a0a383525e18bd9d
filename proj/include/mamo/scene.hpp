#ifndef MAMO_SCENE_HPP
#define MAMO_SCENE_HPP

#include <mamo/geometry.hpp>
#include <mamo/robot.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mamo {

struct Rect
{
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    bool contains(const Vec2& p, double margin = 0.0) const
    {
        return p.x() >= min_x + margin && p.x() <= max_x - margin &&
               p.y() >= min_y + margin && p.y() <= max_y - margin;
    }
    Vec2 center() const { return Vec2(0.5 * (min_x + max_x), 0.5 * (min_y + max_y)); }
};

struct Workspace
{
    Rect bounds;
    double grid_resolution = 0.01;   // meters

    void validate() const;   // throws std::invalid_argument naming the field
};

/// Per-object interaction limits checked by the pushing oracle.
struct ConstraintSpec
{
    double max_step_displacement = 0.02;   // meters per interpolation step
    double topple_ratio = 1.0;             // step displacement cap is ratio*r^2/h
    bool must_stay_in_workspace = true;
};

struct ObjectModel
{
    int id = 0;
    double radius = 0.04;     // disc radius, meters
    double height = 0.12;     // used only by the topple proxy
    double mass = 0.2;        // kg; carried in the format, unused by the oracle
    double friction = 0.8;
    bool movable = true;
    ConstraintSpec constraints;
};

/// Robot configuration plus every object pose: one search-space point.
struct WorldState
{
    Configuration robot;
    std::map<int, Pose2> objects;
};

struct Scene
{
    Workspace workspace;
    RobotModel robot;
    std::vector<ObjectModel> objects;
    WorldState start;
    GoalSpec goal;

    const ObjectModel* object(int id) const;
};

/// Full scene validation: type invariants, object overlap, containment,
/// start-state sanity. Throws std::invalid_argument naming offending
/// fields/ids.
void validate_scene(const Scene& scene);

/// Canonical serialization. Floats are written with 9 significant digits;
/// scenes produced by the generator or a prior load round-trip byte-for-byte.
std::string scene_to_string(const Scene& scene);
Scene scene_from_string(const std::string& text);

Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);

/// FNV-1a over the canonical serialization.
std::uint64_t scene_hash(const Scene& scene);
std::string scene_hash_hex(const Scene& scene);

enum class WorkspaceKind { Tabletop, Fridge };

struct GenParams
{
    WorkspaceKind kind = WorkspaceKind::Tabletop;
    int n_movable = 6;
    int n_immovable = 6;
    double radius_min = 0.03;
    double radius_max = 0.05;
    double friction_min = 0.5;
    double friction_max = 1.1;
    // objects keep this distance from the arm base, leaving the first link
    // a free staging arc to reach into the clutter from
    double base_clearance = 0.42;
    // this many movables are placed on a jittered ring around the goal so
    // the pre-grasp is contact-rich (the instance family of interest);
    // 0 places every object uniformly
    int goal_ring_movables = 3;
    std::uint64_t seed = 0;
};

/// Random scene: discs placed uniformly without overlap and fully inside the
/// workspace, one immovable content obstacle chosen uniformly as the target,
/// goal set to a pre-grasp pose beside it, and a valid start configuration
/// sampled. Deterministic in the seed. Throws std::runtime_error on
/// placement failure after bounded retries.
Scene generate_scene(const GenParams& params);

} // namespace mamo

#endif
