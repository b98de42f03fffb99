#pragma once

// Test-only reference computations. Nothing here calls into the code paths it checks:
// linear rules are applied by the defining sum over the whole mask, hyperbolic distances
// come from the Poincare disk formula, and minimizers from brute-force grid search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "geosubdiv/mask.hpp"

namespace oracle {

using geosubdiv::Mask;
using geosubdiv::Rational;

// Finitely supported sequence i -> x_i.
using Sequence = std::map<std::int64_t, Rational>;

// (Sx)_i = sum_j a_{i - N j} x_j over the full (bi-infinite, zero-extended) sequence.
inline Sequence apply_rule(const Mask& mask, const Sequence& x) {
    Sequence y;
    for (const auto& [j, xj] : x)
        for (std::int64_t l = mask.offset(); l <= mask.last_index(); ++l) y[l + mask.dilation() * j] += mask[l] * xj;
    for (auto it = y.begin(); it != y.end();) it = it->second == 0 ? y.erase(it) : std::next(it);
    return y;
}

inline Sequence difference(const Sequence& x) {
    Sequence d;
    if (x.empty()) return d;
    for (std::int64_t i = x.begin()->first - 1; i <= x.rbegin()->first; ++i) {
        const auto next = x.count(i + 1) ? x.at(i + 1) : Rational(0);
        const auto cur = x.count(i) ? x.at(i) : Rational(0);
        if (next - cur != 0) d[i] = next - cur;
    }
    return d;
}

inline Sequence scale(const Sequence& x, const Rational& s) {
    Sequence y;
    for (const auto& [i, v] : x)
        if (v * s != 0) y[i] = v * s;
    return y;
}

inline Sequence random_sequence(std::mt19937_64& rng, int length, int span = 50) {
    std::uniform_int_distribution<int> num(-span, span), den(1, 12);
    Sequence x;
    for (int i = 0; i < length; ++i) {
        Rational v(num(rng), den(rng));
        if (v != 0) x[i] = v;
    }
    return x;
}

// Random mask whose residue classes each sum to one.
inline Mask random_affine_mask(std::mt19937_64& rng, std::int64_t dilation, int length) {
    // every residue class needs a coefficient to absorb the affine correction
    length = std::max<int>(length, static_cast<int>(dilation));
    std::uniform_int_distribution<int> num(-8, 8), den(1, 9), off(-6, 2);
    std::vector<Rational> c(static_cast<std::size_t>(length));
    for (auto& v : c) v = Rational(num(rng), den(rng));
    for (std::int64_t r = 0; r < dilation; ++r) {
        Rational sum = 0;
        std::int64_t last = -1;
        for (std::int64_t l = r; l < length; l += dilation) {
            sum += c[static_cast<std::size_t>(l)];
            last = l;
        }
        c[static_cast<std::size_t>(last)] += 1 - sum;
    }
    return Mask(dilation, off(rng), c);
}

// Linear rule applied to real data at output index L (bi-infinite indexing), or NaN-free
// std::nullopt when some contributing x_j is outside [0, n) for open data.
inline std::optional<Eigen::VectorXd> linear_output(const Mask& mask, const std::vector<Eigen::VectorXd>& x,
                                                    std::int64_t out_index, bool closed) {
    const auto n = static_cast<std::int64_t>(x.size());
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(x.front().size());
    for (std::int64_t l = mask.offset(); l <= mask.last_index(); ++l) {
        if (mask[l] == 0 || (out_index - l) % mask.dilation() != 0) continue;
        std::int64_t j = (out_index - l) / mask.dilation();
        if (closed) j = ((j % n) + n) % n;
        else if (j < 0 || j >= n) return std::nullopt;
        acc += geosubdiv::to_double(mask[l]) * x[static_cast<std::size_t>(j)];
    }
    return acc;
}

// One linear step on absolutely indexed data: out[L] = sum_l a_l x_{(L - l)/N}, emitted only
// where every contributing index is present.
inline std::map<std::int64_t, Eigen::VectorXd> linear_step(const Mask& mask, const std::map<std::int64_t, Eigen::VectorXd>& x) {
    std::map<std::int64_t, Eigen::VectorXd> out;
    const std::int64_t n = mask.dilation();
    const std::int64_t lo = n * x.begin()->first + mask.offset(), hi = n * x.rbegin()->first + mask.last_index();
    for (std::int64_t l = lo; l <= hi; ++l) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(x.begin()->second.size());
        bool ok = true;
        for (std::int64_t a = mask.offset(); a <= mask.last_index() && ok; ++a) {
            if (mask[a] == 0 || ((l - a) % n + n) % n != 0) continue;
            auto it = x.find((l - a) / n);
            if (it == x.end()) ok = false;
            else acc += geosubdiv::to_double(mask[a]) * it->second;
        }
        if (ok) out[l] = acc;
    }
    return out;
}

// --- hyperbolic plane in the Poincare disk ------------------------------------

inline double disk_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    const double num = 2.0 * (p - q).squaredNorm();
    const double den = (1.0 - p.squaredNorm()) * (1.0 - q.squaredNorm());
    return std::acosh(1.0 + num / den);
}

// Length of the diameter segment [0, r] under ds = 2 |dx| / (1 - |x|^2), composite Simpson.
inline double disk_radial_length(double r, int intervals = 20000) {
    auto f = [](double t) { return 2.0 / (1.0 - t * t); };
    const double h = r / intervals;
    double s = f(0) + f(r);
    for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0;
}

inline Eigen::Vector3d disk_to_hyperboloid(const Eigen::Vector2d& p) {
    const double r2 = p.squaredNorm();
    return Eigen::Vector3d(1.0 + r2, 2.0 * p[0], 2.0 * p[1]) / (1.0 - r2);
}

inline Eigen::Vector2d hyperboloid_to_disk(const Eigen::Vector3d& x) { return Eigen::Vector2d(x[1], x[2]) / (1.0 + x[0]); }

inline Eigen::Vector2d random_disk_point(std::mt19937_64& rng, double radius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius * std::sqrt(u(rng));
    const double t = 2.0 * M_PI * u(rng);
    return {r * std::cos(t), r * std::sin(t)};
}

inline double disk_objective(const std::vector<Eigen::Vector2d>& pts, const std::vector<double>& w,
                             const Eigen::Vector2d& x) {
    double f = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const double d = disk_distance(pts[j], x);
        f += w[j] * d * d;
    }
    return f;
}

// Objective with 50 significant digits.
inline double disk_objective_hp(const std::vector<Eigen::Vector2d>& pts, const std::vector<Rational>& w,
                                const Eigen::Vector2d& x) {
    using HP = boost::multiprecision::cpp_dec_float_50;
    const HP x0(x[0]), x1(x[1]);
    HP f = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const HP p0(pts[j][0]), p1(pts[j][1]);
        const HP num = 2 * ((p0 - x0) * (p0 - x0) + (p1 - x1) * (p1 - x1));
        const HP den = (1 - (p0 * p0 + p1 * p1)) * (1 - (x0 * x0 + x1 * x1));
        const HP z = 1 + num / den;
        const HP d = log(z + sqrt(z * z - 1));
        const HP wj = HP(numerator(w[j]).str()) / HP(denominator(w[j]).str());
        f += wj * d * d;
    }
    return static_cast<double>(f);
}

// Minimizer of the disk objective by nested grid search: step 1e-2 over the disk, then
// windows of +-2 cells refined to steps 1e-4 and 1e-6.
inline Eigen::Vector2d grid_minimizer(const std::vector<Eigen::Vector2d>& pts, const std::vector<double>& w) {
    Eigen::Vector2d best(0, 0);
    double best_f = std::numeric_limits<double>::infinity();
    auto scan = [&](const Eigen::Vector2d& center, double half_width, double step) {
        const int n = static_cast<int>(std::lround(half_width / step));
        Eigen::Vector2d local = best;
        double local_f = std::numeric_limits<double>::infinity();
        for (int a = -n; a <= n; ++a)
            for (int b = -n; b <= n; ++b) {
                const Eigen::Vector2d x(center[0] + a * step, center[1] + b * step);
                if (x.squaredNorm() >= 0.999999) continue;
                const double f = disk_objective(pts, w, x);
                if (f < local_f) {
                    local_f = f;
                    local = x;
                }
            }
        best = local;
        best_f = local_f;
    };
    scan({0, 0}, 1.0, 1e-2);
    scan(best, 2e-2, 1e-4);
    scan(best, 2e-4, 1e-6);
    return best;
}

// --- SPD ---------------------------------------------------------------------

// exp(A) by scaling and squaring a truncated Taylor series.
inline Eigen::MatrixXd expm_taylor(const Eigen::MatrixXd& a) {
    int squarings = 0;
    double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    while (norm > 0.25) {
        norm /= 2;
        ++squarings;
    }
    const Eigen::MatrixXd s = a / std::pow(2.0, squarings);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd sum = term;
    for (int k = 1; k < 30; ++k) {
        term = term * s / k;
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

inline Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
    return a;
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n, double scale = 0.6) {
    return expm_taylor(random_symmetric(rng, n, scale));
}

// Midpoint of an SVG elliptical arc with equal radii and no rotation, via the
// endpoint-to-center conversion of the SVG implementation notes.
inline Eigen::Vector2d svg_arc_midpoint(const Eigen::Vector2d& p0, double r, bool large, bool sweep,
                                        const Eigen::Vector2d& p1) {
    const Eigen::Vector2d h = (p0 - p1) / 2;
    const double rr = std::max(r * r, h.squaredNorm());
    double k = std::sqrt(std::max(0.0, (rr - h.squaredNorm()) / h.squaredNorm()));
    if (large == sweep) k = -k;
    const Eigen::Vector2d c = Eigen::Vector2d(k * h[1], -k * h[0]) + (p0 + p1) / 2;
    const double t0 = std::atan2(p0[1] - c[1], p0[0] - c[0]);
    double dt = std::atan2(p1[1] - c[1], p1[0] - c[0]) - t0;
    const double two_pi = 2 * std::acos(-1.0);
    if (sweep && dt < 0) dt += two_pi;
    if (!sweep && dt > 0) dt -= two_pi;
    const double t = t0 + dt / 2, rad = std::sqrt(rr);
    return {c[0] + rad * std::cos(t), c[1] + rad * std::sin(t)};
}

} // namespace oracle
