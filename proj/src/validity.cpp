#include <mamo/validity.hpp>

#include <algorithm>
#include <cmath>

namespace mamo {

int DistanceField::cell_x(double x) const
{
    const int ix = static_cast<int>(std::floor((x - origin_x) / resolution));
    return std::clamp(ix, 0, nx - 1);
}

int DistanceField::cell_y(double y) const
{
    const int iy = static_cast<int>(std::floor((y - origin_y) / resolution));
    return std::clamp(iy, 0, ny - 1);
}

double DistanceField::at_point(const Vec2& p) const
{
    return at_cell(cell_x(p.x()), cell_y(p.y()));
}

DistanceField build_distance_field(
    const Workspace& workspace,
    const std::vector<ObjectModel>& objects,
    const std::map<int, Pose2>& poses)
{
    DistanceField f;
    f.origin_x = workspace.bounds.min_x;
    f.origin_y = workspace.bounds.min_y;
    f.resolution = workspace.grid_resolution;
    f.nx = std::max(1, static_cast<int>(
        std::ceil(workspace.bounds.width() / f.resolution - 1e-9)));
    f.ny = std::max(1, static_cast<int>(
        std::ceil(workspace.bounds.height() / f.resolution - 1e-9)));
    f.values.assign(static_cast<size_t>(f.nx) * f.ny, kDistanceFieldCap);

    std::vector<std::pair<Vec2, double>> discs;
    for (const auto& o : objects) {
        if (!o.movable) {
            discs.emplace_back(poses.at(o.id).position(), o.radius);
        }
    }
    if (discs.empty()) {
        return f;
    }
    for (int iy = 0; iy < f.ny; ++iy) {
        for (int ix = 0; ix < f.nx; ++ix) {
            const Vec2 c = f.cell_center(ix, iy);
            double best = kDistanceFieldCap;
            for (const auto& [center, radius] : discs) {
                best = std::min(best, std::max(0.0, (c - center).norm() - radius));
            }
            f.values[iy * f.nx + ix] = best;
        }
    }
    return f;
}

namespace {

// Core configuration test; bumps only the raw counter so callers decide
// what constitutes one action evaluation.
bool configuration_ok(
    const RobotModel& robot,
    const Configuration& c,
    const DistanceField& field,
    const Workspace& workspace,
    std::vector<LinkSegment>& links,
    ValidityCounters* counters)
{
    if (counters) {
        ++counters->configuration_checks;
    }
    if (!robot.within_limits(c)) {
        return false;
    }
    link_segments(robot, c, links);
    for (const auto& link : links) {
        if (!workspace.bounds.contains(link.a, link.thickness) ||
            !workspace.bounds.contains(link.b, link.thickness))
        {
            return false;
        }
        // conservative obstacle clearance: sample the segment at half the
        // grid resolution and require the field to exceed the capsule radius
        const double len = (link.b - link.a).norm();
        const int samples = std::max(1, static_cast<int>(
            std::ceil(len / (field.resolution * 0.5))));
        for (int s = 0; s <= samples; ++s) {
            const Vec2 p = link.a + (static_cast<double>(s) / samples) * (link.b - link.a);
            if (field.at_point(p) <= link.thickness) {
                return false;
            }
        }
    }
    for (size_t i = 0; i < links.size(); ++i) {
        for (size_t j = i + 2; j < links.size(); ++j) {
            if (segment_segment_distance(links[i].a, links[i].b, links[j].a, links[j].b) <
                links[i].thickness + links[j].thickness)
            {
                return false;
            }
        }
    }
    return true;
}

int nearest_immovable(
    const std::vector<LinkSegment>& links,
    const std::vector<ObjectModel>& objects,
    const std::map<int, Pose2>& poses)
{
    int best_id = -1;
    double best = std::numeric_limits<double>::max();
    for (const auto& o : objects) {
        if (o.movable) {
            continue;
        }
        const Vec2 c = poses.at(o.id).position();
        for (const auto& link : links) {
            const double d =
                point_segment_distance(c, link.a, link.b) - o.radius - link.thickness;
            if (d < best) {
                best = d;
                best_id = o.id;
            }
        }
    }
    return best_id;
}

} // namespace

bool check_configuration(
    const RobotModel& robot,
    const Configuration& c,
    const DistanceField& field,
    const Workspace& workspace,
    ValidityCounters* counters)
{
    if (counters) {
        ++counters->action_evaluations;
    }
    std::vector<LinkSegment> links;
    return configuration_ok(robot, c, field, workspace, links, counters);
}

std::optional<Configuration> find_valid_goal_configuration(
    const RobotModel& robot,
    const GoalSpec& goal,
    const DistanceField& field,
    const Workspace& workspace,
    const Configuration& seed,
    Rng& rng,
    int attempts,
    ValidityCounters* counters)
{
    Configuration s = seed;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        const auto ik = inverse_kinematics(robot, goal, s, rng);
        if (!ik) {
            return std::nullopt;
        }
        if (check_configuration(robot, *ik, field, workspace, counters)) {
            return ik;
        }
        s.resize(robot.dof());
        for (int j = 0; j < robot.dof(); ++j) {
            s[j] = rng.uniform(robot.joint_limits[j][0], robot.joint_limits[j][1]);
        }
    }
    return std::nullopt;
}

Phase1Result check_phase1(
    const RobotModel& robot,
    const std::vector<Configuration>& path,
    const DistanceField& field,
    const Workspace& workspace,
    const std::vector<ObjectModel>& objects,
    const std::map<int, Pose2>& poses,
    ValidityCounters* counters)
{
    if (counters) {
        ++counters->action_evaluations;
    }
    Phase1Result res;
    std::vector<LinkSegment> links;
    // states after the first are evaluated; the source state is assumed valid
    for (size_t i = 1; i < path.size(); ++i) {
        if (!configuration_ok(robot, path[i], field, workspace, links, counters)) {
            res.status = Phase1Result::Status::Invalid;
            res.violation_index = static_cast<int>(i);
            link_segments(robot, path[i], links);
            res.violation_object = nearest_immovable(links, objects, poses);
            return res;
        }
        for (const auto& o : objects) {
            if (!o.movable) {
                continue;
            }
            const Vec2 c = poses.at(o.id).position();
            for (const auto& link : links) {
                if (point_segment_distance(c, link.a, link.b) < o.radius + link.thickness) {
                    res.contacts_movable = true;
                    res.contacted_ids.insert(o.id);
                    break;
                }
            }
        }
    }
    return res;
}

} // namespace mamo
