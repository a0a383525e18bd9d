#include <mamo/geometry.hpp>

#include <algorithm>

namespace mamo {

double segment_segment_distance(
    const Vec2& a1, const Vec2& a2,
    const Vec2& b1, const Vec2& b2)
{
    const Vec2 d1 = a2 - a1;
    const Vec2 d2 = b2 - b1;
    const Vec2 r = a1 - b1;
    const double A = d1.squaredNorm();
    const double E = d2.squaredNorm();
    const double F = d2.dot(r);

    double s = 0.0;
    double t = 0.0;
    if (A <= 0.0 && E <= 0.0) {
        return r.norm();
    }
    if (A <= 0.0) {
        t = std::clamp(F / E, 0.0, 1.0);
    } else {
        const double C = d1.dot(r);
        if (E <= 0.0) {
            s = std::clamp(-C / A, 0.0, 1.0);
        } else {
            const double B = d1.dot(d2);
            const double denom = A * E - B * B;
            if (denom > 0.0) {
                s = std::clamp((B * F - C * E) / denom, 0.0, 1.0);
            }
            t = (B * s + F) / E;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-C / A, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((B - C) / A, 0.0, 1.0);
            }
        }
    }
    const Vec2 p1 = a1 + s * d1;
    const Vec2 p2 = b1 + t * d2;
    return (p1 - p2).norm();
}

} // namespace mamo
