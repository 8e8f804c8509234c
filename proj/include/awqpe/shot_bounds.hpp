#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace awqpe {

/// Parameters of the Hoeffding-based measurement budgets.
struct BoundParams {
    double epsilon1 = 0.01;  // top-outcome misidentification budget
    double epsilon2 = 0.01;  // ambiguity-decision error budget
    double delta_r = 0.05;   // margin from the ambiguity threshold
    double epsilon = 0.9;    // ambiguity threshold
    // Worst-case peak probability of the squared Dirichlet kernel.
    double p1 = 4.0 / (std::numbers::pi * std::numbers::pi);
    // Worst-case gap between the peak and any non-adjacent outcome,
    // 4/pi^2 - 1/(1.5 pi)^2 ~ 0.36.
    double delta_p_min = 4.0 / (std::numbers::pi * std::numbers::pi) -
                         1.0 / (2.25 * std::numbers::pi * std::numbers::pi);
};

/// Shots guaranteeing the empirical leader lands in {T1, T2} with error at
/// most epsilon1: N >= (2 / dP^2) ln((2^m - 2)/epsilon1). The constant with
/// the default gap is about 15.41.
inline std::uint64_t shots_for_top_outcome(int m, double epsilon1, const BoundParams& params = {}) {
    if (m < 2) throw std::invalid_argument("shots_for_top_outcome: m must be >= 2");
    if (!(epsilon1 > 0.0 && epsilon1 < 1.0))
        throw std::invalid_argument("shots_for_top_outcome: epsilon1 must be in (0, 1)");
    if (!(params.delta_p_min > 0.0))
        throw std::invalid_argument("shots_for_top_outcome: gap must be positive");
    double others = std::ldexp(1.0, m) - 2.0;
    double bound = 2.0 / (params.delta_p_min * params.delta_p_min) * std::log(others / epsilon1);
    return static_cast<std::uint64_t>(std::ceil(std::max(0.0, bound)));
}

/// Shots for reliable ambiguity classification with margin delta_r from the
/// threshold: N >= (1+eps)^2 / (2 p1^2 dR^2) * ln(1/epsilon2). The same bound
/// covers detecting ambiguity and confirming its absence.
inline std::uint64_t shots_for_ambiguity(double epsilon, double delta_r, double p1,
                                         double epsilon2) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("shots_for_ambiguity: epsilon must be in (0, 1)");
    if (!(delta_r > 0.0)) throw std::invalid_argument("shots_for_ambiguity: delta_r must be > 0");
    if (!(p1 > 0.0)) throw std::invalid_argument("shots_for_ambiguity: p1 must be > 0");
    if (!(epsilon2 > 0.0 && epsilon2 <= 1.0))
        throw std::invalid_argument("shots_for_ambiguity: epsilon2 must be in (0, 1]");
    double bound = (1.0 + epsilon) * (1.0 + epsilon) / (2.0 * p1 * p1 * delta_r * delta_r) *
                   std::log(1.0 / epsilon2);
    return static_cast<std::uint64_t>(std::ceil(std::max(0.0, bound)));
}

/// Hoeffding tail for one count-difference pair: exp(-N * gap^2 / 2).
inline double pair_error_bound(std::uint64_t n_shots, double gap) {
    if (!(gap > 0.0 && gap <= 1.0)) throw std::invalid_argument("pair_error_bound: gap in (0, 1]");
    return std::exp(-static_cast<double>(n_shots) * gap * gap / 2.0);
}

} // namespace awqpe
