#ifndef MAMO_ROBOT_HPP
#define MAMO_ROBOT_HPP

#include <mamo/geometry.hpp>
#include <mamo/rng.hpp>

#include <Eigen/Core>

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace mamo {

/// A point in the arm's joint space, one entry per revolute joint (radians).
using Configuration = Eigen::VectorXd;

/// Planar serial arm: a chain of capsule links rooted at a fixed base pose.
struct RobotModel
{
    Pose2 base;
    std::vector<double> link_lengths;              // meters
    std::vector<double> link_thickness;            // capsule radius per link
    std::vector<std::array<double, 2>> joint_limits;  // [lo, hi] radians

    int dof() const { return static_cast<int>(link_lengths.size()); }
    double reach() const;
    double max_thickness() const;
    bool within_limits(const Configuration& c) const;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// The default 4-link arm used by generated scenes.
RobotModel default_robot(const Pose2& base);

/// One world-frame link capsule.
struct LinkSegment
{
    Vec2 a;
    Vec2 b;
    double thickness;
};

struct FkResult
{
    Pose2 ee;
    std::vector<LinkSegment> links;
};

FkResult forward_kinematics(const RobotModel& robot, const Configuration& c);

/// End-effector pose only (no link extraction).
Pose2 end_effector_pose(const RobotModel& robot, const Configuration& c);

/// Fill `links` in place; avoids reallocation in inner loops.
void link_segments(
    const RobotModel& robot,
    const Configuration& c,
    std::vector<LinkSegment>& links);

struct IkOptions
{
    double damping = 0.05;
    int max_iterations = 200;
    int max_restarts = 10;
};

/// Damped least-squares IK on the planar pose error (x, y, yaw). Restarts
/// are drawn uniformly within joint limits from `rng`. Returns a
/// configuration within limits whose FK satisfies the goal tolerances, or
/// nullopt after all restarts are exhausted.
std::optional<Configuration> inverse_kinematics(
    const RobotModel& robot,
    const GoalSpec& goal,
    const Configuration& seed,
    Rng& rng,
    const IkOptions& opts = {});

/// Inclusive joint-space straight line a = c_0, ..., c_k = b with
/// per-joint steps bounded by max_step and k minimal. a == b yields {a}.
std::vector<Configuration> interpolate(
    const Configuration& a,
    const Configuration& b,
    double max_step);

/// A single-joint move: the primitive action payload.
struct JointStep
{
    int joint;
    double delta;   // signed radians
};

/// Per-joint magnitudes for the primitive action set: 4 deg on the two
/// proximal joints, 7 deg on the rest.
std::vector<double> default_primitive_deltas(int dof);

/// Up to 2q successors of c, each moving exactly one joint by +/- deltas[j];
/// moves that leave the joint limits are omitted.
std::vector<std::pair<JointStep, Configuration>> simple_primitive_successors(
    const RobotModel& robot,
    const Configuration& c,
    const std::vector<double>& deltas);

} // namespace mamo

#endif
