#include "lodcheck/quadric.hpp"

#include <cmath>

namespace lodcheck {

Quadric plane_quadric(const Vec3& normal, double d, double weight) {
    const double p[4] = {normal.x, normal.y, normal.z, d};
    Quadric q;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) q.at(r, c) = weight * p[r] * p[c];
    return q;
}

double quadric_error(const Quadric& q, const Vec3& p) {
    const double v[4] = {p.x, p.y, p.z, 1.0};
    double e = 0.0;
    for (int r = 0; r < 4; ++r) {
        double row = 0.0;
        for (int c = 0; c < 4; ++c) row += q.at(r, c) * v[c];
        e += v[r] * row;
    }
    return e > 0.0 ? e : 0.0;
}

namespace {

// Solve A x = b (A = upper-left 3x3 of the quadric, b = -q[0..2][3]).
// Rows are scaled to unit max before the determinant test so the
// singularity threshold is independent of the quadric's magnitude.
bool solve_minimizer(const Quadric& q, Vec3& out) {
    double a[3][3];
    double b[3];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) a[r][c] = q.at(r, c);
        b[r] = -q.at(r, 3);
    }
    double scaled[3][3];
    for (int r = 0; r < 3; ++r) {
        double mx = std::max({std::abs(a[r][0]), std::abs(a[r][1]), std::abs(a[r][2])});
        if (mx == 0.0) return false;
        for (int c = 0; c < 3; ++c) scaled[r][c] = a[r][c] / mx;
    }
    const double det = scaled[0][0] * (scaled[1][1] * scaled[2][2] - scaled[1][2] * scaled[2][1]) -
                       scaled[0][1] * (scaled[1][0] * scaled[2][2] - scaled[1][2] * scaled[2][0]) +
                       scaled[0][2] * (scaled[1][0] * scaled[2][1] - scaled[1][1] * scaled[2][0]);
    if (std::abs(det) <= 1e-12) return false;

    // Cramer's rule on the unscaled system.
    auto det3 = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double d0 = det3(a);
    if (d0 == 0.0) return false;
    double t[3][3];
    double x[3];
    for (int col = 0; col < 3; ++col) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t[r][c] = (c == col) ? b[r] : a[r][c];
        x[col] = det3(t) / d0;
    }
    out = {x[0], x[1], x[2]};
    return std::isfinite(out.x) && std::isfinite(out.y) && std::isfinite(out.z);
}

} // namespace

CollapseTarget optimal_collapse_position(const Quadric& q, const Vec3& a, const Vec3& b) {
    Vec3 solved;
    if (solve_minimizer(q, solved))
        return {solved, quadric_error(q, solved)};

    const Vec3 mid = (a + b) * 0.5;
    CollapseTarget best{a, quadric_error(q, a)};
    const double cost_b = quadric_error(q, b);
    if (cost_b < best.cost) best = {b, cost_b};
    const double cost_m = quadric_error(q, mid);
    if (cost_m < best.cost) best = {mid, cost_m};
    return best;
}

} // namespace lodcheck
