#pragma once

// Riemannian center of mass with signed weights summing to one.
//
// On a Cartan-Hadamard manifold f(x) = sum_j w_j dist(x_j, x)^2 has a unique
// minimizer x*, and the half gradient bounds the distance to it:
//     |1/2 grad f(x)| >= dist(x, x*).
// The solver therefore reports its final half-gradient norm as a certified error bound.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "geosubdiv/errors.hpp"
#include "geosubdiv/manifold.hpp"
#include "geosubdiv/rational.hpp"

namespace geosubdiv {

template <CartanHadamard M>
class WeightedConfiguration {
public:
    using Point = typename M::Point;

    WeightedConfiguration(std::vector<Point> points, std::vector<Rational> weights)
        : points_(std::move(points)), weights_(std::move(weights)) {
        if (points_.empty()) throw Error("weighted configuration needs at least one point");
        if (points_.size() != weights_.size()) throw Error("point and weight counts differ");
        Rational sum = 0;
        for (const auto& w : weights_) sum += w;
        if (sum != 1) throw Error("weights must sum to exactly 1, got " + to_string(sum));
        values_.reserve(weights_.size());
        for (const auto& w : weights_) values_.push_back(to_double(w));
    }

    std::size_t size() const { return points_.size(); }
    const std::vector<Point>& points() const { return points_; }
    const std::vector<Rational>& weights() const { return weights_; }
    std::span<const double> weight_values() const { return values_; }

private:
    std::vector<Point> points_;
    std::vector<Rational> weights_;
    std::vector<double> values_;
};

template <class Point>
struct MeanCertificate {
    Point mean;
    double grad_norm = 0.0;   // |1/2 grad f| at `mean`
    double error_bound = 0.0; // certified bound on dist(mean, minimizer)
    int iterations = 0;
    double f_value = 0.0;
    bool certified = false;   // grad_norm <= requested tolerance
};

template <class Point>
struct AverageOptions {
    int max_iterations = 10000;
    int max_halvings = 60;
    std::optional<Point> initial;
};

template <CartanHadamard M>
double objective(const M& m, const WeightedConfiguration<M>& config, const typename M::Point& x) {
    double f = 0.0;
    const auto w = config.weight_values();
    for (std::size_t j = 0; j < config.size(); ++j) {
        const double d = m.dist(config.points()[j], x);
        f += w[j] * d * d;
    }
    return f;
}

namespace detail {

// sum_j w_j log(x, x_j) = -1/2 grad f(x)
template <CartanHadamard M>
typename M::Tangent descent_direction(const M& m, const WeightedConfiguration<M>& config, const typename M::Point& x) {
    typename M::Tangent g = m.zero(x);
    const auto w = config.weight_values();
    for (std::size_t j = 0; j < config.size(); ++j)
        if (w[j] != 0.0) g = g + m.log(x, config.points()[j]) * w[j];
    return g;
}

template <CartanHadamard M>
double objective_scale(const M& m, const WeightedConfiguration<M>& config, const typename M::Point& x) {
    double s = 0.0;
    const auto w = config.weight_values();
    for (std::size_t j = 0; j < config.size(); ++j) {
        const double d = m.dist(config.points()[j], x);
        s += std::abs(w[j]) * d * d;
    }
    return s;
}

} // namespace detail

template <CartanHadamard M>
typename M::Tangent gradient(const M& m, const WeightedConfiguration<M>& config, const typename M::Point& x) {
    return detail::descent_direction(m, config, x) * -2.0;
}

// Gradient iteration x <- exp(x, t sum_j w_j log(x, x_j)) starting with t = 1 (exact in flat
// space) and halving t until the step is accepted. A step is accepted on sufficient decrease of f,
// or, once f is flat to rounding, when it is not worse than rounding and shrinks the gradient.
template <CartanHadamard M>
MeanCertificate<typename M::Point> riemannian_average(const M& m, const WeightedConfiguration<M>& config,
                                                      double tolerance,
                                                      const AverageOptions<typename M::Point>& options = {}) {
    using Point = typename M::Point;
    if (!(tolerance > 0.0)) throw Error("tolerance must be positive");

    MeanCertificate<Point> cert;
    const auto& w = config.weights();

    // Delta row: the average is the data point itself.
    for (std::size_t j = 0; j < config.size(); ++j) {
        if (w[j] != 1) continue;
        bool others_zero = true;
        for (std::size_t k = 0; k < config.size(); ++k)
            if (k != j && w[k] != 0) others_zero = false;
        if (others_zero) {
            cert.mean = config.points()[j];
            cert.certified = true;
            return cert;
        }
    }

    Point x;
    if (options.initial) {
        x = *options.initial;
    } else {
        std::size_t best = 0;
        for (std::size_t j = 1; j < config.size(); ++j)
            if (w[j] > w[best]) best = j;
        x = config.points()[best];
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();
    double f = objective(m, config, x);
    auto g = detail::descent_direction(m, config, x);
    double gn = norm(m, x, g);

    int it = 0;
    bool stalled = false;
    for (; it < options.max_iterations && gn > tolerance; ++it) {
        if (!std::isfinite(f) || !std::isfinite(gn)) throw Error("non-finite value in center-of-mass iteration");
        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h <= options.max_halvings; ++h, step *= 0.5) {
            Point candidate = m.exp(x, g * step);
            const double fc = objective(m, config, candidate);
            if (!std::isfinite(fc)) continue;
            const double noise = 16.0 * eps * (detail::objective_scale(m, config, candidate) + std::abs(fc));
            if (fc <= f - 1e-4 * step * 2.0 * gn * gn) {
                accepted = true;
            } else if (fc <= f + noise) {
                const auto gc = detail::descent_direction(m, config, candidate);
                if (norm(m, candidate, gc) < gn) accepted = true;
            }
            if (accepted) {
                x = std::move(candidate);
                f = fc;
                break;
            }
        }
        if (!accepted) {
            stalled = true;
            break;
        }
        g = detail::descent_direction(m, config, x);
        gn = norm(m, x, g);
    }
    if (!std::isfinite(f) || !std::isfinite(gn)) throw Error("non-finite value in center-of-mass iteration");

    cert.mean = std::move(x);
    cert.grad_norm = gn;
    cert.error_bound = gn;
    cert.iterations = it;
    cert.f_value = f;
    cert.certified = !stalled && gn <= tolerance;
    return cert;
}

// Midpoint second difference of f along the geodesic x -> y against the convexity bound
// d^2/ds^2 f(c(s)) >= |c'(s)|^2 = dist(x, y)^2.
template <CartanHadamard M>
bool strong_convexity_probe(const M& m, const WeightedConfiguration<M>& config, const typename M::Point& x,
                            const typename M::Point& y) {
    const double d = m.dist(x, y);
    const double f0 = objective(m, config, x);
    const double fh = objective(m, config, geodesic_point(m, x, y, 0.5));
    const double f1 = objective(m, config, y);
    const double second_difference = (f0 - 2.0 * fh + f1) / 0.25;
    return second_difference >= d * d * (1.0 - 1e-6);
}

} // namespace geosubdiv
