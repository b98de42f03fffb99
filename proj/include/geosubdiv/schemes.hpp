#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "geosubdiv/mask.hpp"

namespace geosubdiv {

// (1/4, 3/4, 3/4, 1/4) on a_{-2..1}.
inline Mask chaikin() {
    return Mask(2, -2, {Rational(1, 4), Rational(3, 4), Rational(3, 4), Rational(1, 4)});
}

// Interpolatory four-point rule: row 0 is x_i, row 1 is
// -w x_{i-1} + (1/2 + w) x_i + (1/2 + w) x_{i+1} - w x_{i+2}.
inline Mask four_point(const Rational& omega) {
    const Rational half(1, 2);
    return Mask(2, -3, {-omega, 0, half + omega, 1, half + omega, 0, -omega});
}

// Two rounds of the four-point rule as a single rule with dilation 4.
inline Mask four_point_two_round(const Rational& omega) { return iterate_mask(four_point(omega), 2); }

// Blend of the four-point rule (w = 1/16) and Chaikin with rows
// (-1, 21, 13, -1)/32 and (-1, 13, 21, -1)/32 over x_{i-1..i+2}.
inline Mask blend_example() {
    auto c = [](int p) { return Rational(p, 32); };
    return Mask(2, -4, {c(-1), c(-1), c(13), c(21), c(21), c(13), c(-1), c(-1)});
}

inline nlohmann::json mask_to_json(const Mask& mask) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : mask.coeffs()) coeffs.push_back(to_string(c));
    return {{"dilation", mask.dilation()}, {"offset", mask.offset()}, {"coeffs", coeffs}};
}

inline Mask mask_from_json(const nlohmann::json& j) {
    try {
        std::vector<Rational> coeffs;
        for (const auto& c : j.at("coeffs")) {
            if (c.is_number_integer()) coeffs.emplace_back(c.get<std::int64_t>());
            else if (c.is_string()) coeffs.push_back(parse_rational(c.get<std::string>()));
            else throw ParseError("mask coefficients must be \"p/q\" strings or integers");
        }
        return Mask(j.at("dilation").get<std::int64_t>(), j.at("offset").get<std::int64_t>(), std::move(coeffs));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid mask document: ") + e.what());
    }
}

// "chaikin", "fourpoint:<p/q>", "fourpoint2:<p/q>", "blend-example1", or a path to a mask JSON file.
inline Mask scheme_by_name(std::string_view name) {
    constexpr std::string_view fp = "fourpoint:";
    constexpr std::string_view fp2 = "fourpoint2:";
    if (name == "chaikin") return chaikin();
    if (name == "blend-example1") return blend_example();
    if (name.starts_with(fp)) return four_point(parse_rational(name.substr(fp.size())));
    if (name.starts_with(fp2)) return four_point_two_round(parse_rational(name.substr(fp2.size())));
    std::ifstream in{std::string(name)};
    if (!in) throw ParseError("unknown scheme '" + std::string(name) + "' (not a built-in name or readable file)");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("cannot parse mask file '" + std::string(name) + "': " + e.what());
    }
    return mask_from_json(j);
}

} // namespace geosubdiv
