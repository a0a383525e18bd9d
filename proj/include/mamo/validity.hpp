#ifndef MAMO_VALIDITY_HPP
#define MAMO_VALIDITY_HPP

#include <mamo/robot.hpp>
#include <mamo/scene.hpp>

#include <set>
#include <vector>

namespace mamo {

/// Grid of Euclidean distances (meters) from cell centers to the nearest
/// immovable disc surface; 0 inside a disc, capped when no obstacle exists.
struct DistanceField
{
    double origin_x = 0.0;
    double origin_y = 0.0;
    double resolution = 0.01;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;   // row-major, iy * nx + ix

    double at_cell(int ix, int iy) const { return values[iy * nx + ix]; }

    /// Value of the nearest cell; queries outside the grid clamp to the rim.
    double at_point(const Vec2& p) const;

    Vec2 cell_center(int ix, int iy) const
    {
        return Vec2(origin_x + (ix + 0.5) * resolution,
                    origin_y + (iy + 0.5) * resolution);
    }
    int cell_x(double x) const;
    int cell_y(double y) const;
};

constexpr double kDistanceFieldCap = 10.0;

/// Exact per-cell distance to the immovable discs in `poses`.
DistanceField build_distance_field(
    const Workspace& workspace,
    const std::vector<ObjectModel>& objects,
    const std::map<int, Pose2>& poses);

/// Raw configuration checks and whole-action evaluations. The synthetic
/// planning clock charges per action evaluation.
struct ValidityCounters
{
    long configuration_checks = 0;
    long action_evaluations = 0;
};

/// True iff joints are within limits, every link capsule lies inside the
/// workspace, no non-adjacent link pair overlaps, and every link clears the
/// immovable obstacles (conservative capsule-vs-field test). Counts as one
/// action evaluation.
bool check_configuration(
    const RobotModel& robot,
    const Configuration& c,
    const DistanceField& field,
    const Workspace& workspace,
    ValidityCounters* counters = nullptr);

struct Phase1Result
{
    enum class Status { Valid, Invalid };
    Status status = Status::Valid;
    bool contacts_movable = false;
    std::set<int> contacted_ids;
    // set when Invalid: index of the first offending path state, plus the
    // nearest immovable obstacle id when one is implicated (-1 otherwise)
    int violation_index = -1;
    int violation_object = -1;

    bool valid() const { return status == Status::Valid; }
};

/// Evaluates path[1..] in order: Invalid on the first immovable contact or
/// invalid configuration; otherwise Valid with all contacted movable ids
/// accumulated via exact capsule-disc tests. Movable contact never rejects.
/// Counts as one action evaluation.
Phase1Result check_phase1(
    const RobotModel& robot,
    const std::vector<Configuration>& path,
    const DistanceField& field,
    const Workspace& workspace,
    const std::vector<ObjectModel>& objects,
    const std::map<int, Pose2>& poses,
    ValidityCounters* counters = nullptr);

/// Repeated IK until a solution also passes check_configuration; raw IK
/// output frequently folds the arm outside the workspace or across itself.
std::optional<Configuration> find_valid_goal_configuration(
    const RobotModel& robot,
    const GoalSpec& goal,
    const DistanceField& field,
    const Workspace& workspace,
    const Configuration& seed,
    Rng& rng,
    int attempts = 50,
    ValidityCounters* counters = nullptr);

} // namespace mamo

#endif
