#ifndef MAMO_PHYSICS_HPP
#define MAMO_PHYSICS_HPP

#include <mamo/robot.hpp>
#include <mamo/scene.hpp>

#include <map>
#include <optional>
#include <vector>

namespace mamo {

enum class ViolationKind
{
    ContactImmovable,
    FellOffWorkspace,
    ExcessVelocity,
    Toppled,
};

const char* violation_kind_name(ViolationKind kind);

struct Violation
{
    ViolationKind kind;
    int object_id;
    int step;
};

struct SimOutcome
{
    std::map<int, Pose2> final_poses;
    std::vector<Violation> violations;
    std::vector<std::map<int, Pose2>> trace;   // per-step poses when recorded
    long sim_steps = 0;

    bool clean() const { return violations.empty(); }
};

struct SimSettings
{
    bool record_trace = false;
    double latency_seconds = 0.0;        // synthetic per-call sleep
    double contact_tolerance = 1e-7;     // penetration below this is "touching"
    int max_resolution_iterations = 100;
};

/// Deterministic quasi-static pushing oracle.
///
/// For each interpolation step the robot links are placed at the next
/// configuration and penetrations are resolved geometrically: link-disc
/// overlaps push movable discs along the minimal translation vector, then
/// disc-disc overlaps are swept in ascending id order (the disc not pinned
/// by a robot link moves; ties go to the lower-friction disc) until a fixed
/// point. Immovable discs never move; any residual movable-immovable
/// penetration is a ContactImmovable violation. Per-step displacement caps
/// (ExcessVelocity, Toppled) and workspace containment are checked at each
/// step end. Simulation stops at the first violating step with poses frozen
/// there.
///
/// Returns nullopt when contact resolution fails to converge (an
/// over-crowded wedge); callers treat the action as invalid.
std::optional<SimOutcome> simulate_path(
    const RobotModel& robot,
    const std::vector<Configuration>& path,
    const std::vector<ObjectModel>& objects,
    const std::map<int, Pose2>& start_poses,
    const Workspace& workspace,
    const SimSettings& settings = {});

} // namespace mamo

#endif
