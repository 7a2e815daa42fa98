#pragma once

#include <array>

#include "lodcheck/geom.hpp"

namespace lodcheck {

/// Symmetric 4x4 accumulation of squared point-to-plane distances.
/// Built from plane coefficients (a,b,c,d) with |(a,b,c)| = 1; evaluating
/// at a homogeneous point v gives v^T Q v = sum of weighted squared
/// distances to the accumulated planes.
struct Quadric {
    std::array<double, 16> m{};

    double& at(int r, int c) { return m[r * 4 + c]; }
    double at(int r, int c) const { return m[r * 4 + c]; }

    Quadric& operator+=(const Quadric& o) {
        for (int i = 0; i < 16; ++i) m[i] += o.m[i];
        return *this;
    }
    Quadric operator+(const Quadric& o) const {
        Quadric r = *this;
        r += o;
        return r;
    }
};

/// weight * p p^T for plane p = (normal, d), normal assumed unit length.
Quadric plane_quadric(const Vec3& normal, double d, double weight);

/// v^T Q v at v = (p, 1); clamped to >= 0 to absorb roundoff.
double quadric_error(const Quadric& q, const Vec3& p);

struct CollapseTarget {
    Vec3 position;
    double cost = 0.0;
};

/// Position minimizing the quadric error for an edge (a,b). Solves the 3x3
/// normal system when it is well conditioned (row-scaled determinant above
/// 1e-12), otherwise falls back to the cheapest of {a, b, midpoint}.
CollapseTarget optimal_collapse_position(const Quadric& q, const Vec3& a, const Vec3& b);

} // namespace lodcheck
