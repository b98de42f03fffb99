#pragma once

// Cartan-Hadamard geometries: flat space, the hyperbolic plane (K = -1) and SPD
// matrices with the affine-invariant metric. Every instance exposes the same
// value-semantic interface so averaging and refinement are written once.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>

#include <Eigen/Dense>

#include "geosubdiv/errors.hpp"

namespace geosubdiv {

template <class M>
concept CartanHadamard = requires(const M& m, const typename M::Point& p, const typename M::Tangent& v, double s) {
    { m.name() } -> std::convertible_to<std::string>;
    { m.dist(p, p) } -> std::convertible_to<double>;
    { m.exp(p, v) } -> std::same_as<typename M::Point>;
    { m.log(p, p) } -> std::same_as<typename M::Tangent>;
    { m.inner(p, v, v) } -> std::convertible_to<double>;
    { m.zero(p) } -> std::same_as<typename M::Tangent>;
    { v * s } -> std::convertible_to<typename M::Tangent>;
    { v + v } -> std::convertible_to<typename M::Tangent>;
};

template <CartanHadamard M>
double norm(const M& m, const typename M::Point& x, const typename M::Tangent& v) {
    return std::sqrt(std::max(0.0, m.inner(x, v, v)));
}

// exp(x, s log(x, y)); the endpoints are returned exactly.
template <CartanHadamard M>
typename M::Point geodesic_point(const M& m, const typename M::Point& x, const typename M::Point& y, double s) {
    if (s == 0.0) return x;
    if (s == 1.0) return y;
    return m.exp(x, m.log(x, y) * s);
}

// Nonpositive curvature makes exp_x distance non-decreasing:
// dist(exp(x,u), exp(x,v)) >= |u - v|_x.
template <CartanHadamard M>
bool exp_distance_nonexpansive_check(const M& m, const typename M::Point& x, const typename M::Tangent& u,
                                     const typename M::Tangent& v) {
    const typename M::Tangent diff = u + v * -1.0;
    return m.dist(m.exp(x, u), m.exp(x, v)) >= norm(m, x, diff) - 1e-9;
}

class Euclidean {
public:
    using Point = Eigen::VectorXd;
    using Tangent = Eigen::VectorXd;

    explicit Euclidean(int dim) : dim_(dim) {
        if (dim < 1) throw Error("euclidean dimension must be >= 1");
    }

    int dim() const { return dim_; }
    std::string name() const { return "euclidean:" + std::to_string(dim_); }

    double dist(const Point& x, const Point& y) const { return (x - y).norm(); }
    Point exp(const Point& x, const Tangent& v) const { return x + v; }
    Tangent log(const Point& x, const Point& y) const { return y - x; }
    double inner(const Point&, const Tangent& u, const Tangent& v) const { return u.dot(v); }
    Tangent zero(const Point&) const { return Tangent::Zero(dim_); }

    void validate(const Point& x) const {
        if (x.size() != dim_) throw ManifoldMismatch("expected " + std::to_string(dim_) + " coordinates");
        if (!x.allFinite()) throw Error("non-finite coordinates");
    }

private:
    int dim_;
};

// Hyperboloid model {x : -x0^2 + x1^2 + x2^2 = -1, x0 > 0}. The Poincare disk is
// only used for input and drawing.
class Hyperbolic {
public:
    using Point = Eigen::Vector3d;
    using Tangent = Eigen::Vector3d;

    std::string name() const { return "hyperbolic2"; }

    static double lorentz(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
        return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    }

    // 2 asinh(|x - y|_L / 2) stays accurate for nearby points where acosh(-<x,y>) does not.
    double dist(const Point& x, const Point& y) const {
        const Eigen::Vector3d d = x - y;
        const double chord = std::sqrt(std::max(0.0, lorentz(d, d)));
        return 2.0 * std::asinh(0.5 * chord);
    }

    Point exp(const Point& x, const Tangent& v) const {
        const double t = std::sqrt(std::max(0.0, lorentz(v, v)));
        if (t == 0.0) return x;
        const double sinhc = std::sinh(t) / t;
        return normalize(std::cosh(t) * x + sinhc * v);
    }

    Tangent log(const Point& x, const Point& y) const {
        const double d = dist(x, y);
        if (d == 0.0) return Tangent::Zero();
        Tangent u = y + lorentz(x, y) * x;
        u += lorentz(x, u) * x; // re-project onto the tangent space
        const double len = std::sqrt(std::max(0.0, lorentz(u, u)));
        if (len == 0.0) return Tangent::Zero();
        return u * (d / len);
    }

    double inner(const Point&, const Tangent& u, const Tangent& v) const { return lorentz(u, v); }
    Tangent zero(const Point&) const { return Tangent::Zero(); }

    // Lorentz normalization back onto the upper sheet.
    static Point normalize(const Point& x) {
        const Eigen::Vector2d s(x[1], x[2]);
        return Point(std::sqrt(1.0 + s.squaredNorm()), s[0], s[1]);
    }

    static Point from_disk(const Eigen::Vector2d& p) {
        const double r2 = p.squaredNorm();
        if (!(r2 < 1.0)) throw Error("disk coordinates must satisfy u^2 + v^2 < 1");
        const double den = 1.0 - r2;
        return Point((1.0 + r2) / den, 2.0 * p[0] / den, 2.0 * p[1] / den);
    }

    static Eigen::Vector2d to_disk(const Point& x) { return Eigen::Vector2d(x[1], x[2]) / (1.0 + x[0]); }

    void validate(const Point& x) const {
        if (!x.allFinite()) throw Error("non-finite coordinates");
        if (x[0] < 1.0 - 1e-12 || std::abs(lorentz(x, x) + 1.0) > 1e-10 * std::max(1.0, x[0] * x[0]))
            throw Error("point is not on the upper hyperboloid sheet");
    }
};

// Proper orthochronous Lorentz transform: rotation by `angle` after a boost of
// rapidity `rapidity` along x1. These are the isometries of the hyperboloid.
inline Eigen::Matrix3d hyperbolic_isometry(double rapidity, double angle) {
    Eigen::Matrix3d boost;
    boost << std::cosh(rapidity), std::sinh(rapidity), 0, std::sinh(rapidity), std::cosh(rapidity), 0, 0, 0, 1;
    Eigen::Matrix3d rot;
    rot << 1, 0, 0, 0, std::cos(angle), -std::sin(angle), 0, std::sin(angle), std::cos(angle);
    return rot * boost;
}

// Symmetric positive definite n x n matrices with <U,V>_X = tr(X^-1 U X^-1 V).
class Spd {
public:
    using Point = Eigen::MatrixXd;
    using Tangent = Eigen::MatrixXd;

    static constexpr int max_size = 8;

    explicit Spd(int n) : n_(n) {
        if (n < 1 || n > max_size) throw Error("spd size must be in 1..8");
    }

    int size() const { return n_; }
    std::string name() const { return "spd:" + std::to_string(n_); }

    double dist(const Point& x, const Point& y) const {
        const auto [sqrt_x, inv_sqrt_x] = roots(x);
        const Eigen::MatrixXd c = symmetrize(inv_sqrt_x * y * inv_sqrt_x);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
        return es.eigenvalues().array().log().matrix().norm();
    }

    Point exp(const Point& x, const Tangent& v) const {
        const auto [sqrt_x, inv_sqrt_x] = roots(x);
        const Eigen::MatrixXd w = symmetrize(inv_sqrt_x * v * inv_sqrt_x);
        return symmetrize(sqrt_x * apply(w, [](double l) { return std::exp(l); }) * sqrt_x);
    }

    Tangent log(const Point& x, const Point& y) const {
        const auto [sqrt_x, inv_sqrt_x] = roots(x);
        const Eigen::MatrixXd c = symmetrize(inv_sqrt_x * y * inv_sqrt_x);
        return symmetrize(sqrt_x * apply(c, [](double l) { return std::log(l); }) * sqrt_x);
    }

    double inner(const Point& x, const Tangent& u, const Tangent& v) const {
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(x);
        const Eigen::MatrixXd a = ldlt.solve(u);
        const Eigen::MatrixXd b = ldlt.solve(v);
        return (a * b).trace();
    }

    Tangent zero(const Point&) const { return Tangent::Zero(n_, n_); }

    void validate(const Point& x) const {
        if (x.rows() != n_ || x.cols() != n_) throw ManifoldMismatch("expected a " + std::to_string(n_) + "x" + std::to_string(n_) + " matrix");
        if (!x.allFinite()) throw Error("non-finite coordinates");
        if ((x - x.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, x.cwiseAbs().maxCoeff()))
            throw Error("matrix is not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
        if (es.eigenvalues().minCoeff() <= 0.0) throw Error("matrix is not positive definite");
    }

    static Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

    template <class F>
    static Eigen::MatrixXd apply(const Eigen::MatrixXd& sym, F f) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
        const Eigen::VectorXd mapped = es.eigenvalues().unaryExpr(f);
        return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
    }

private:
    static std::pair<Eigen::MatrixXd, Eigen::MatrixXd> roots(const Eigen::MatrixXd& x) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
        const Eigen::VectorXd s = es.eigenvalues().cwiseSqrt();
        const Eigen::MatrixXd& q = es.eigenvectors();
        return {q * s.asDiagonal() * q.transpose(), q * s.cwiseInverse().asDiagonal() * q.transpose()};
    }

    int n_;
};

} // namespace geosubdiv
