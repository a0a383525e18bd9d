#include <mamo/robot.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace mamo {

double RobotModel::reach() const
{
    double r = 0.0;
    for (const double l : link_lengths) {
        r += l;
    }
    return r;
}

double RobotModel::max_thickness() const
{
    double t = 0.0;
    for (const double v : link_thickness) {
        t = std::max(t, v);
    }
    return t;
}

bool RobotModel::within_limits(const Configuration& c) const
{
    if (c.size() != dof()) {
        return false;
    }
    for (int j = 0; j < dof(); ++j) {
        if (c[j] < joint_limits[j][0] || c[j] > joint_limits[j][1]) {
            return false;
        }
    }
    return true;
}

void RobotModel::validate() const
{
    if (link_lengths.size() < 2) {
        throw std::invalid_argument("robot.link_lengths: need at least 2 links");
    }
    if (link_thickness.size() != link_lengths.size()) {
        throw std::invalid_argument(
            "robot.link_thickness: size must match link_lengths");
    }
    if (joint_limits.size() != link_lengths.size()) {
        throw std::invalid_argument(
            "robot.joint_limits: size must match link_lengths");
    }
    for (size_t i = 0; i < link_lengths.size(); ++i) {
        if (!(link_lengths[i] > 0.0)) {
            throw std::invalid_argument("robot.link_lengths: entries must be > 0");
        }
        if (!(link_thickness[i] > 0.0)) {
            throw std::invalid_argument("robot.link_thickness: entries must be > 0");
        }
        if (!(joint_limits[i][0] < joint_limits[i][1])) {
            throw std::invalid_argument("robot.joint_limits: require lo < hi");
        }
    }
}

RobotModel default_robot(const Pose2& base)
{
    RobotModel robot;
    robot.base = base;
    robot.link_lengths = {0.30, 0.25, 0.20, 0.10};
    robot.link_thickness = {0.03, 0.03, 0.03, 0.03};
    robot.joint_limits.assign(4, {-2.9, 2.9});
    return robot;
}

void link_segments(
    const RobotModel& robot,
    const Configuration& c,
    std::vector<LinkSegment>& links)
{
    const int q = robot.dof();
    links.resize(q);
    double angle = robot.base.yaw;
    Vec2 p(robot.base.x, robot.base.y);
    for (int j = 0; j < q; ++j) {
        angle += c[j];
        const Vec2 next =
            p + robot.link_lengths[j] * Vec2(std::cos(angle), std::sin(angle));
        links[j] = LinkSegment{p, next, robot.link_thickness[j]};
        p = next;
    }
}

Pose2 end_effector_pose(const RobotModel& robot, const Configuration& c)
{
    double angle = robot.base.yaw;
    Vec2 p(robot.base.x, robot.base.y);
    for (int j = 0; j < robot.dof(); ++j) {
        angle += c[j];
        p += robot.link_lengths[j] * Vec2(std::cos(angle), std::sin(angle));
    }
    return Pose2{p.x(), p.y(), normalize_angle(angle)};
}

FkResult forward_kinematics(const RobotModel& robot, const Configuration& c)
{
    FkResult out;
    link_segments(robot, c, out.links);
    const LinkSegment& last = out.links.back();
    double angle = robot.base.yaw;
    for (int j = 0; j < robot.dof(); ++j) {
        angle += c[j];
    }
    out.ee = Pose2{last.b.x(), last.b.y(), normalize_angle(angle)};
    return out;
}

namespace {

// 3xq planar Jacobian: rows are d(x,y,yaw)/dq.
Eigen::MatrixXd planar_jacobian(
    const RobotModel& robot,
    const Configuration& c,
    std::vector<LinkSegment>& scratch)
{
    link_segments(robot, c, scratch);
    const int q = robot.dof();
    const Vec2 ee = scratch.back().b;
    Eigen::MatrixXd J(3, q);
    for (int j = 0; j < q; ++j) {
        const Vec2 axis = scratch[j].a;  // joint j origin
        J(0, j) = -(ee.y() - axis.y());
        J(1, j) = ee.x() - axis.x();
        J(2, j) = 1.0;
    }
    return J;
}

Configuration clamp_to_limits(const RobotModel& robot, Configuration c)
{
    for (int j = 0; j < robot.dof(); ++j) {
        c[j] = std::clamp(c[j], robot.joint_limits[j][0], robot.joint_limits[j][1]);
    }
    return c;
}

} // namespace

std::optional<Configuration> inverse_kinematics(
    const RobotModel& robot,
    const GoalSpec& goal,
    const Configuration& seed,
    Rng& rng,
    const IkOptions& opts)
{
    const int q = robot.dof();
    const double lambda2 = opts.damping * opts.damping;
    std::vector<LinkSegment> scratch;

    Configuration c = clamp_to_limits(robot, seed);
    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        for (int it = 0; it < opts.max_iterations; ++it) {
            const Pose2 ee = end_effector_pose(robot, c);
            Eigen::Vector3d err(
                goal.pose.x - ee.x,
                goal.pose.y - ee.y,
                angle_diff(goal.pose.yaw, ee.yaw));
            if (std::hypot(err[0], err[1]) <= goal.pos_tolerance &&
                std::abs(err[2]) <= goal.yaw_tolerance)
            {
                return c;
            }
            const Eigen::MatrixXd J = planar_jacobian(robot, c, scratch);
            const Eigen::Matrix3d JJt =
                J * J.transpose() + lambda2 * Eigen::Matrix3d::Identity();
            const Configuration dq = J.transpose() * JJt.ldlt().solve(err);
            c = clamp_to_limits(robot, c + dq);
        }
        // fresh start drawn within limits
        Configuration r(q);
        for (int j = 0; j < q; ++j) {
            r[j] = rng.uniform(robot.joint_limits[j][0], robot.joint_limits[j][1]);
        }
        c = r;
    }
    return std::nullopt;
}

std::vector<Configuration> interpolate(
    const Configuration& a,
    const Configuration& b,
    double max_step)
{
    const double span = (b - a).lpNorm<Eigen::Infinity>();
    int k = static_cast<int>(std::ceil(span / max_step - 1e-9));
    if (k < 1) {
        if (span == 0.0) {
            return {a};
        }
        k = 1;
    }
    std::vector<Configuration> path;
    path.reserve(k + 1);
    path.push_back(a);
    for (int i = 1; i < k; ++i) {
        path.push_back(a + (static_cast<double>(i) / k) * (b - a));
    }
    path.push_back(b);
    return path;
}

std::vector<double> default_primitive_deltas(int dof)
{
    std::vector<double> deltas(dof);
    for (int j = 0; j < dof; ++j) {
        deltas[j] = (j < 2 ? 4.0 : 7.0) * M_PI / 180.0;
    }
    return deltas;
}

std::vector<std::pair<JointStep, Configuration>> simple_primitive_successors(
    const RobotModel& robot,
    const Configuration& c,
    const std::vector<double>& deltas)
{
    std::vector<std::pair<JointStep, Configuration>> out;
    out.reserve(2 * robot.dof());
    for (int j = 0; j < robot.dof(); ++j) {
        for (const double sign : {+1.0, -1.0}) {
            const double v = c[j] + sign * deltas[j];
            if (v < robot.joint_limits[j][0] || v > robot.joint_limits[j][1]) {
                continue;
            }
            Configuration succ = c;
            succ[j] = v;
            out.push_back({JointStep{j, sign * deltas[j]}, std::move(succ)});
        }
    }
    return out;
}

} // namespace mamo
