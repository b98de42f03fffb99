#pragma once

// Exact algebra of stationary subdivision masks.
//
// A mask (a_l) with dilation N defines the linear rule
//     (Sx)_i = sum_j a_{i - N j} x_j.
// Output (Sx)_{N i + r} only touches the window x_{i + k} with weight a_{r - N k};
// these per-residue weight rows are what the Riemannian analogue averages with.
// Everything here is exact over arbitrary precision rationals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geosubdiv/errors.hpp"
#include "geosubdiv/rational.hpp"

namespace geosubdiv {

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

inline std::int64_t mod(std::int64_t a, std::int64_t b) { return a - b * floor_div(a, b); }

} // namespace detail

class Mask {
public:
    // Trims zero coefficients at both ends; the offset follows the first kept entry.
    Mask(std::int64_t dilation, std::int64_t offset, std::vector<Rational> coeffs)
        : dilation_(dilation), offset_(offset), coeffs_(std::move(coeffs)) {
        if (dilation_ < 2) throw Error("mask dilation must be >= 2, got " + std::to_string(dilation_));
        auto first = std::find_if(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return c != 0; });
        if (first == coeffs_.end()) throw Error("mask has no nonzero coefficient");
        auto last = std::find_if(coeffs_.rbegin(), coeffs_.rend(), [](const Rational& c) { return c != 0; });
        offset_ += first - coeffs_.begin();
        coeffs_ = std::vector<Rational>(first, last.base());
    }

    std::int64_t dilation() const { return dilation_; }
    std::int64_t offset() const { return offset_; }
    std::int64_t last_index() const { return offset_ + static_cast<std::int64_t>(coeffs_.size()) - 1; }
    const std::vector<Rational>& coeffs() const { return coeffs_; }

    // a_l, zero outside the support.
    Rational operator[](std::int64_t l) const {
        if (l < offset_ || l > last_index()) return Rational(0);
        return coeffs_[static_cast<std::size_t>(l - offset_)];
    }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::int64_t dilation_;
    std::int64_t offset_;
    std::vector<Rational> coeffs_;
};

// Weights w_k = a_{r - N k} applied to x_{i + k} produce (Sx)_{N i + r}.
// `residue` may lie outside 0..N-1; residue N is the row of (Sx)_{N (i+1)} expressed
// over the window of x_i, which is how consecutive outputs across a block boundary pair up.
struct WeightRow {
    std::int64_t residue = 0;
    std::int64_t first = 0; // window index of weights.front()
    std::vector<Rational> weights;

    std::int64_t last() const { return first + static_cast<std::int64_t>(weights.size()) - 1; }

    Rational operator[](std::int64_t k) const {
        if (k < first || k > last()) return Rational(0);
        return weights[static_cast<std::size_t>(k - first)];
    }

    Rational sum() const {
        Rational s = 0;
        for (const auto& w : weights) s += w;
        return s;
    }

    // Index of the single unit weight when the row is a delta, i.e. the output is a data point.
    std::optional<std::int64_t> delta_index() const {
        if (weights.size() == 1 && weights.front() == 1) return first;
        return std::nullopt;
    }
};

inline WeightRow weight_row(const Mask& mask, std::int64_t residue) {
    const std::int64_t n = mask.dilation();
    const std::int64_t k_lo = detail::ceil_div(residue - mask.last_index(), n);
    const std::int64_t k_hi = detail::floor_div(residue - mask.offset(), n);
    WeightRow row;
    row.residue = residue;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) row.weights.push_back(mask[residue - n * k]);
    // trim zeros so that window bounds reflect the actual support
    std::int64_t first = k_lo;
    while (!row.weights.empty() && row.weights.front() == 0) {
        row.weights.erase(row.weights.begin());
        ++first;
    }
    while (!row.weights.empty() && row.weights.back() == 0) row.weights.pop_back();
    row.first = first;
    return row;
}

inline Rational residue_sum(const Mask& mask, std::int64_t residue) {
    Rational s = 0;
    for (std::int64_t l = mask.offset(); l <= mask.last_index(); ++l)
        if (detail::mod(l - residue, mask.dilation()) == 0) s += mask[l];
    return s;
}

inline bool check_affine_invariance(const Mask& mask) {
    for (std::int64_t r = 0; r < mask.dilation(); ++r)
        if (residue_sum(mask, r) != 1) return false;
    return true;
}

inline void require_affine_invariance(const Mask& mask) {
    for (std::int64_t r = 0; r < mask.dilation(); ++r) {
        Rational s = residue_sum(mask, r);
        if (s != 1) throw NotAffineInvariant(r, to_string(s));
    }
}

inline std::vector<WeightRow> rows(const Mask& mask) {
    require_affine_invariance(mask);
    std::vector<WeightRow> out;
    out.reserve(static_cast<std::size_t>(mask.dilation()));
    for (std::int64_t r = 0; r < mask.dilation(); ++r) out.push_back(weight_row(mask, r));
    return out;
}

// Mask of S* with S* Delta = N Delta S, via
//     a*_l / N = sum_{k <= 0} a_{l - N k} - a_{l + 1 - N k}.
inline Mask derived_mask(const Mask& mask) {
    require_affine_invariance(mask);
    const std::int64_t n = mask.dilation();
    std::vector<Rational> out;
    for (std::int64_t l = mask.offset() - 1; l <= mask.last_index(); ++l) {
        Rational s = 0;
        for (std::int64_t j = l; j <= mask.last_index() + 1; j += n) s += mask[j] - mask[j + 1];
        out.push_back(s * n);
    }
    return Mask(n, mask.offset() - 1, std::move(out));
}

// Mask of S^m (dilation N^m). Built as S^m = S o S^{m-1}:
//     c_l = sum_i a_{l - N i} p_i,  p = mask of S^{m-1}.
inline Mask iterate_mask(const Mask& mask, int m) {
    if (m < 1) throw Error("iterate_mask: m must be >= 1");
    Mask current = mask;
    const std::int64_t n = mask.dilation();
    for (int step = 1; step < m; ++step) {
        const std::int64_t lo = n * current.offset() + mask.offset();
        const std::int64_t hi = n * current.last_index() + mask.last_index();
        std::vector<Rational> c(static_cast<std::size_t>(hi - lo + 1));
        for (std::int64_t i = current.offset(); i <= current.last_index(); ++i) {
            const Rational& p = current.coeffs()[static_cast<std::size_t>(i - current.offset())];
            if (p == 0) continue;
            for (std::int64_t k = mask.offset(); k <= mask.last_index(); ++k)
                c[static_cast<std::size_t>(k + n * i - lo)] += mask[k] * p;
        }
        current = Mask(current.dilation() * n, lo, std::move(c));
    }
    return current;
}

// max over residues r of sum_j |a_{r - N j}|.
inline Rational scheme_norm(const Mask& mask) {
    Rational best = 0;
    for (std::int64_t r = 0; r < mask.dilation(); ++r) {
        Rational s = 0;
        for (std::int64_t l = mask.offset(); l <= mask.last_index(); ++l)
            if (detail::mod(l - r, mask.dilation()) == 0) s += abs(mask[l]);
        best = std::max(best, s);
    }
    return best;
}

// Per residue r: sum_j |g^{(r+1)}_j - g^{(r)}_j| with g^{(r)}_j = sum_{i <= j} a_{r - N i}.
// The pair (N-1, N) crosses into the next block; g^{(N)} is the shifted g^{(0)}.
inline std::vector<Rational> contractivity_terms(const Mask& mask) {
    require_affine_invariance(mask);
    const std::int64_t n = mask.dilation();
    std::vector<Rational> terms;
    for (std::int64_t r = 0; r < n; ++r) {
        const std::int64_t j_lo = detail::ceil_div(r - mask.last_index(), n) - 1;
        const std::int64_t j_hi = detail::floor_div(r + 1 - mask.offset(), n) + 1;
        Rational prefix_r = 0, prefix_next = 0, total = 0;
        for (std::int64_t j = j_lo; j <= j_hi; ++j) {
            prefix_r += mask[r - n * j];
            prefix_next += mask[r + 1 - n * j];
            total += abs(prefix_next - prefix_r);
        }
        terms.push_back(total);
    }
    return terms;
}

inline Rational contractivity_factor(const Mask& mask) {
    const auto terms = contractivity_terms(mask);
    return *std::max_element(terms.begin(), terms.end());
}

struct MaskAnalysis {
    std::vector<Mask> derived_masks;   // derived mask of S^m, m = 1..m_max
    std::vector<Rational> norm_values; // ||S^{m*}||
    std::vector<Rational> gammas;      // ||S^{m*}|| / N^m
    bool converges = false;
    int witness = 0;                   // first m with gamma_m < 1, 0 if undecided
    double holder_exponent = 0.0;      // -log(gamma_w) / (w log N); NaN when undecided

    int m_max() const { return static_cast<int>(gammas.size()); }
};

inline MaskAnalysis analyze(const Mask& mask, int m_max = 4) {
    if (m_max < 1) throw Error("analyze: m_max must be >= 1");
    require_affine_invariance(mask);
    MaskAnalysis out;
    BigInt scale = 1;
    for (int m = 1; m <= m_max; ++m) {
        scale *= mask.dilation();
        Mask derived = derived_mask(iterate_mask(mask, m));
        Rational norm = scheme_norm(derived);
        Rational gamma = norm / Rational(scale);
        if (!out.converges && gamma < 1) {
            out.converges = true;
            out.witness = m;
            out.holder_exponent =
                -std::log(to_double(gamma)) / (m * std::log(static_cast<double>(mask.dilation())));
        }
        out.derived_masks.push_back(std::move(derived));
        out.norm_values.push_back(norm);
        out.gammas.push_back(gamma);
    }
    if (!out.converges) out.holder_exponent = std::nan("");
    return out;
}

} // namespace geosubdiv
