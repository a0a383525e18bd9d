#include <mamo/physics.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace mamo {

const char* violation_kind_name(ViolationKind kind)
{
    switch (kind) {
    case ViolationKind::ContactImmovable: return "contact_immovable";
    case ViolationKind::FellOffWorkspace: return "fell_off_workspace";
    case ViolationKind::ExcessVelocity:   return "excess_velocity";
    case ViolationKind::Toppled:          return "toppled";
    }
    return "?";
}

namespace {

struct Disc
{
    int id;
    double radius;
    double height;
    double friction;
    bool movable;
    const ConstraintSpec* constraints;
    Vec2 center;
    bool robot_pinned = false;   // in contact with a link this iteration
};

// Push direction for a disc centered at `c` against segment [a,b]; falls
// back to the segment normal when the center lies on the segment.
Vec2 push_normal(const Vec2& c, const Vec2& a, const Vec2& b)
{
    const Vec2 closest = closest_point_on_segment(c, a, b);
    const Vec2 d = c - closest;
    const double n = d.norm();
    if (n > 1e-12) {
        return d / n;
    }
    Vec2 dir = b - a;
    if (dir.norm() < 1e-12) {
        return Vec2(1.0, 0.0);
    }
    dir.normalize();
    return Vec2(-dir.y(), dir.x());
}

} // namespace

std::optional<SimOutcome> simulate_path(
    const RobotModel& robot,
    const std::vector<Configuration>& path,
    const std::vector<ObjectModel>& objects,
    const std::map<int, Pose2>& start_poses,
    const Workspace& workspace,
    const SimSettings& settings)
{
    if (settings.latency_seconds > 0.0) {
        std::this_thread::sleep_for(
            std::chrono::duration<double>(settings.latency_seconds));
    }

    std::vector<Disc> discs;
    discs.reserve(objects.size());
    for (const auto& o : objects) {
        const Pose2& p = start_poses.at(o.id);
        discs.push_back(Disc{
            o.id, o.radius, o.height, o.friction, o.movable, &o.constraints,
            p.position()});
    }
    std::sort(discs.begin(), discs.end(),
              [](const Disc& a, const Disc& b) { return a.id < b.id; });

    SimOutcome out;
    out.final_poses = start_poses;
    const double tol = settings.contact_tolerance;
    std::vector<LinkSegment> links;

    auto snapshot = [&]() {
        for (const auto& d : discs) {
            Pose2& p = out.final_poses[d.id];
            p.x = d.center.x();
            p.y = d.center.y();
        }
    };

    for (size_t step = 1; step < path.size(); ++step) {
        link_segments(robot, path[step], links);
        std::vector<Vec2> step_start(discs.size());
        for (size_t i = 0; i < discs.size(); ++i) {
            step_start[i] = discs[i].center;
        }

        bool converged = false;
        for (int iter = 0; iter < settings.max_resolution_iterations; ++iter) {
            bool moved = false;

            // robot -> object, ascending id
            for (auto& d : discs) {
                d.robot_pinned = false;
                if (!d.movable) {
                    continue;
                }
                for (const auto& link : links) {
                    const double dist = point_segment_distance(d.center, link.a, link.b);
                    const double pen = (link.thickness + d.radius) - dist;
                    if (pen > tol) {
                        const Vec2 n = push_normal(d.center, link.a, link.b);
                        const Vec2 closest = closest_point_on_segment(d.center, link.a, link.b);
                        d.center = closest + n * (link.thickness + d.radius);
                        moved = true;
                    }
                }
                for (const auto& link : links) {
                    const double dist = point_segment_distance(d.center, link.a, link.b);
                    if (dist <= link.thickness + d.radius + 2.0 * tol) {
                        d.robot_pinned = true;
                        break;
                    }
                }
            }

            // object -> object, pairs in ascending id order; only movable
            // discs are candidates to move
            for (size_t i = 0; i < discs.size(); ++i) {
                for (size_t j = i + 1; j < discs.size(); ++j) {
                    Disc& a = discs[i];
                    Disc& b = discs[j];
                    if (!a.movable && !b.movable) {
                        continue;
                    }
                    const double dist = (a.center - b.center).norm();
                    const double pen = (a.radius + b.radius) - dist;
                    if (pen <= tol) {
                        continue;
                    }
                    // immovable-movable overlaps are violations, not pushes
                    if (!a.movable || !b.movable) {
                        continue;
                    }
                    Disc* mover;
                    if (a.robot_pinned != b.robot_pinned) {
                        mover = a.robot_pinned ? &b : &a;
                    } else if (a.friction != b.friction) {
                        mover = a.friction < b.friction ? &a : &b;
                    } else {
                        mover = &b;
                    }
                    const Disc& anchor = (mover == &a) ? b : a;
                    Vec2 n = mover->center - anchor.center;
                    if (n.norm() < 1e-12) {
                        n = Vec2(1.0, 0.0);   // coincident centers
                    } else {
                        n.normalize();
                    }
                    mover->center = anchor.center + n * (a.radius + b.radius);
                    moved = true;
                }
            }

            if (!moved) {
                converged = true;
                break;
            }
        }

        if (!converged) {
            // verify: residual penetration among resolvable pairs means the
            // wedge genuinely failed to resolve
            double residual = 0.0;
            for (size_t i = 0; i < discs.size(); ++i) {
                if (!discs[i].movable) {
                    continue;
                }
                for (const auto& link : links) {
                    residual = std::max(
                        residual,
                        (link.thickness + discs[i].radius) -
                            point_segment_distance(discs[i].center, link.a, link.b));
                }
                for (size_t j = 0; j < discs.size(); ++j) {
                    if (j == i || !discs[j].movable) {
                        continue;
                    }
                    residual = std::max(
                        residual,
                        (discs[i].radius + discs[j].radius) -
                            (discs[i].center - discs[j].center).norm());
                }
            }
            if (residual > 1e-6) {
                return std::nullopt;
            }
        }

        // constraint verdicts at step end
        const int step_idx = static_cast<int>(step);
        for (size_t i = 0; i < discs.size(); ++i) {
            const Disc& d = discs[i];
            if (!d.movable) {
                continue;
            }
            const double disp = (d.center - step_start[i]).norm();
            if (disp > d.constraints->max_step_displacement) {
                out.violations.push_back(
                    {ViolationKind::ExcessVelocity, d.id, step_idx});
            }
            // tall narrow objects topple under smaller per-step pushes
            const double topple_cap =
                d.constraints->topple_ratio * d.radius * d.radius / d.height;
            if (disp > topple_cap) {
                out.violations.push_back({ViolationKind::Toppled, d.id, step_idx});
            }
            if (d.constraints->must_stay_in_workspace &&
                !workspace.bounds.contains(d.center))
            {
                out.violations.push_back(
                    {ViolationKind::FellOffWorkspace, d.id, step_idx});
            }
            for (const auto& other : discs) {
                if (other.movable) {
                    continue;
                }
                const double pen =
                    (d.radius + other.radius) - (d.center - other.center).norm();
                if (pen > tol) {
                    out.violations.push_back(
                        {ViolationKind::ContactImmovable, d.id, step_idx});
                    break;
                }
            }
        }

        out.sim_steps = step_idx;
        snapshot();
        if (settings.record_trace) {
            out.trace.push_back(out.final_poses);
        }
        if (!out.violations.empty()) {
            break;   // poses frozen at the violating step
        }
    }
    return out;
}

} // namespace mamo
