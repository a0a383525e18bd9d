#ifndef MAMO_GEOMETRY_HPP
#define MAMO_GEOMETRY_HPP

#include <Eigen/Core>

#include <cmath>

namespace mamo {

using Vec2 = Eigen::Vector2d;

/// Planar rigid pose (position in meters, yaw in radians).
struct Pose2
{
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;

    Vec2 position() const { return Vec2(x, y); }
};

/// Desired end-effector pose with acceptance tolerances.
struct GoalSpec
{
    Pose2 pose;
    double pos_tolerance = 0.01;   // meters
    double yaw_tolerance = 0.15;   // radians
};

/// Normalize an angle to (-pi, pi].
inline double normalize_angle(double a)
{
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a <= 0.0) {
        a += 2.0 * M_PI;
    }
    return a - M_PI;
}

/// Shortest signed angular difference a - b, in (-pi, pi].
inline double angle_diff(double a, double b)
{
    return normalize_angle(a - b);
}

inline Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b)
{
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) {
        return a;
    }
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return a + t * ab;
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b)
{
    return (p - closest_point_on_segment(p, a, b)).norm();
}

/// Minimum distance between segments [a1,a2] and [b1,b2].
double segment_segment_distance(
    const Vec2& a1, const Vec2& a2,
    const Vec2& b1, const Vec2& b2);

inline bool goal_satisfied(const GoalSpec& goal, const Pose2& ee)
{
    const double dp = (ee.position() - goal.pose.position()).norm();
    const double dy = std::abs(angle_diff(ee.yaw, goal.pose.yaw));
    return dp <= goal.pos_tolerance && dy <= goal.yaw_tolerance;
}

} // namespace mamo

#endif
