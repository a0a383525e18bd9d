#include <mamo/render.hpp>

#include <mamo/robot.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mamo {

namespace {

constexpr double kScale = 1000.0;   // meters to user units
constexpr double kPad = 40.0;

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

std::string render_svg(const RenderSpec& spec)
{
    if (!spec.scene) {
        throw std::invalid_argument("render: no scene");
    }
    if (spec.stride < 1) {
        throw std::invalid_argument("render: stride must be >= 1");
    }
    const Scene& scene = *spec.scene;
    const Rect& b = scene.workspace.bounds;
    const double w = b.width() * kScale + 2.0 * kPad;
    const double h = b.height() * kScale + 2.0 * kPad;
    auto X = [&](double x) { return kPad + (x - b.min_x) * kScale; };
    auto Y = [&](double y) { return kPad + (b.max_y - y) * kScale; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 "
       << num(w) << ' ' << num(h) << "\">\n";
    os << "<rect class=\"workspace\" x=\"" << num(X(b.min_x)) << "\" y=\""
       << num(Y(b.max_y)) << "\" width=\"" << num(b.width() * kScale)
       << "\" height=\"" << num(b.height() * kScale)
       << "\" fill=\"#f8f8f4\" stroke=\"#333\" stroke-width=\"2\"/>\n";

    // goal marker: disc plus heading tick
    {
        const Pose2& g = scene.goal.pose;
        const double r = std::max(scene.goal.pos_tolerance, 0.008) * kScale;
        os << "<g class=\"goal\">\n";
        os << "  <circle cx=\"" << num(X(g.x)) << "\" cy=\"" << num(Y(g.y))
           << "\" r=\"" << num(r)
           << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"3\"/>\n";
        const double hx = g.x + 0.03 * std::cos(g.yaw);
        const double hy = g.y + 0.03 * std::sin(g.yaw);
        os << "  <line x1=\"" << num(X(g.x)) << "\" y1=\"" << num(Y(g.y))
           << "\" x2=\"" << num(X(hx)) << "\" y2=\"" << num(Y(hy))
           << "\" stroke=\"#1f77b4\" stroke-width=\"3\"/>\n";
        os << "</g>\n";
    }

    const std::map<int, Pose2>& base_poses = scene.start.objects;
    for (const auto& o : scene.objects) {
        const Pose2& p = base_poses.at(o.id);
        os << "<circle class=\"" << (o.movable ? "movable" : "immovable")
           << "\" cx=\"" << num(X(p.x)) << "\" cy=\"" << num(Y(p.y))
           << "\" r=\"" << num(o.radius * kScale) << "\" fill=\""
           << (o.movable ? spec.movable_color : spec.immovable_color)
           << "\" fill-opacity=\"0.75\" stroke=\"#222\"/>\n";
    }

    if (spec.trajectory && !spec.trajectory->empty()) {
        const auto& traj = *spec.trajectory;
        const size_t last = traj.size() - 1;
        std::vector<LinkSegment> links;
        for (size_t i = 0; i < traj.size(); ++i) {
            if (i % static_cast<size_t>(spec.stride) != 0 && i != last) {
                continue;
            }
            link_segments(scene.robot, traj[i].robot, links);
            const double opacity = 0.25 + 0.75 * (last == 0 ? 1.0 : double(i) / last);
            os << "<polyline class=\"arm\" fill=\"none\" stroke=\"#444\""
               << " stroke-width=\"" << num(scene.robot.max_thickness() * 2.0 * kScale)
               << "\" stroke-linecap=\"round\" stroke-linejoin=\"round\""
               << " stroke-opacity=\"" << num(opacity) << "\" points=\"";
            os << num(X(links.front().a.x())) << ',' << num(Y(links.front().a.y()));
            for (const auto& link : links) {
                os << ' ' << num(X(link.b.x())) << ',' << num(Y(link.b.y()));
            }
            os << "\"/>\n";
        }
        // displacement arrows for objects that moved
        const auto& first_poses = traj.front().objects;
        const auto& last_poses = traj.back().objects;
        for (const auto& [id, p0] : first_poses) {
            const auto it = last_poses.find(id);
            if (it == last_poses.end()) {
                continue;
            }
            const Pose2& p1 = it->second;
            const double d = std::hypot(p1.x - p0.x, p1.y - p0.y);
            if (d < 1e-9) {
                continue;
            }
            os << "<line class=\"push\" x1=\"" << num(X(p0.x)) << "\" y1=\""
               << num(Y(p0.y)) << "\" x2=\"" << num(X(p1.x)) << "\" y2=\""
               << num(Y(p1.y))
               << "\" stroke=\"#d62728\" stroke-width=\"3\" stroke-dasharray=\"6,4\"/>\n";
            os << "<circle class=\"push-end\" cx=\"" << num(X(p1.x)) << "\" cy=\""
               << num(Y(p1.y)) << "\" r=\"5\" fill=\"#d62728\"/>\n";
        }
    }

    os << "</svg>\n";
    return os.str();
}

} // namespace mamo
