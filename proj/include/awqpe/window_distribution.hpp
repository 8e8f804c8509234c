#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "awqpe/binary_math.hpp"
#include "awqpe/rng.hpp"

namespace awqpe {

/// Outcome probabilities of one m-qubit window measurement.
struct WindowOutcomeDistribution {
    int m = 1;
    std::vector<double> probs; // indexed by outcome j in [0, 2^m)

    double sum() const {
        double s = 0.0;
        for (double p : probs) s += p;
        return s;
    }
};

/// Measurement tallies for one window: outcome -> count.
struct ShotCounts {
    int m = 1;
    std::map<std::uint32_t, std::uint64_t> counts;
    std::uint64_t total = 0;

    std::uint64_t count(std::uint32_t j) const {
        auto it = counts.find(j);
        return it == counts.end() ? 0 : it->second;
    }
};

/// Exact window outcome distribution: the squared Dirichlet kernel
///
///   P(j | delta) = sin^2(2^m pi theta) / (2^{2m} sin^2(pi theta)),
///   theta = delta - j/2^m reduced to (-1/2, 1/2].
///
/// When 2^m * delta is an integer the kernel degenerates to a point mass at
/// that outcome; this is detected exactly on the fixed-point input rather
/// than by epsilon comparison, so grid phases stay exact.
inline WindowOutcomeDistribution dirichlet_pmf(const PhaseValue& delta, int m, int m_limit = 24) {
    if (m < 1) throw std::invalid_argument("dirichlet_pmf: m must be >= 1");
    if (m > m_limit) throw std::invalid_argument("dirichlet_pmf: m exceeds configured bound");

    const auto size = std::uint64_t{1} << m;
    WindowOutcomeDistribution dist;
    dist.m = m;
    dist.probs.assign(size, 0.0);

    // 2^m * delta = A + d with A integer and d in [0,1) exact.
    PhaseValue scaled = delta.widened(m + 1);
    BigInt a_big = (scaled.numerator() << m) >> scaled.bits();
    PhaseValue frac = window_fraction(scaled, m);
    auto peak = (a_big % BigInt(size)).convert_to<std::uint64_t>();

    if (frac.is_zero()) {
        dist.probs[peak] = 1.0;
        return dist;
    }

    const double d = frac.to_double();
    if (d <= 0.0 || d >= 1.0) {
        // the nonzero residual rounds to an integer in double precision;
        // the true distribution is a point mass to within ~1e-32
        dist.probs[(peak + (d >= 1.0 ? 1 : 0)) % size] = 1.0;
        return dist;
    }
    // sin^2(pi d) = sin^2(pi (1-d)); evaluate on the small side so the
    // argument stays away from pi (1 - d is exact for d in (1/2, 1))
    const double dr = d <= 0.5 ? d : 1.0 - d;
    const double numer = std::pow(std::sin(std::numbers::pi * dr), 2);
    const double norm = std::ldexp(1.0, 2 * m); // 2^{2m}
    const double half = std::ldexp(1.0, m - 1);

    for (std::uint64_t j = 0; j < size; ++j) {
        // r = (A - j mod 2^m) + d, the signed grid offset 2^m * theta.
        double r = static_cast<double>((peak + size - j) % size) + d;
        if (r > half) r -= static_cast<double>(size);
        // The kernel is even in theta; evaluating at |theta| keeps exact
        // half-integer ties bit-identical between the two tied outcomes.
        double theta = std::abs(r) / static_cast<double>(size);
        double s = std::sin(std::numbers::pi * theta);
        dist.probs[j] = numer / (norm * s * s);
    }
    return dist;
}

/// Two most frequent outcomes; ties resolved to the lowest outcome index.
/// Outcomes never observed count as zero, so a point mass yields t2 = the
/// lowest index other than t1.
inline std::pair<std::uint32_t, std::uint32_t> top_two(const ShotCounts& sc) {
    if (sc.total < 1) throw std::invalid_argument("top_two: empty counts");
    const auto size = std::uint64_t{1} << sc.m;
    std::uint32_t t1 = 0;
    std::uint64_t c1 = sc.count(0);
    for (std::uint64_t j = 1; j < size; ++j) {
        std::uint64_t c = sc.count(static_cast<std::uint32_t>(j));
        if (c > c1) { c1 = c; t1 = static_cast<std::uint32_t>(j); }
    }
    std::uint32_t t2 = t1 == 0 ? 1 : 0;
    std::uint64_t c2 = sc.count(t2);
    for (std::uint64_t j = 0; j < size; ++j) {
        if (j == t1) continue;
        std::uint64_t c = sc.count(static_cast<std::uint32_t>(j));
        if (c > c2 && j != t2) { c2 = c; t2 = static_cast<std::uint32_t>(j); }
    }
    return {t1, t2};
}

/// Randomized tie-break variant: among equally ranked outcomes each candidate
/// is picked uniformly. Matches top_two when no ties are present.
inline std::pair<std::uint32_t, std::uint32_t> top_two_random(const ShotCounts& sc,
                                                              std::mt19937_64& gen) {
    auto [t1, t2] = top_two(sc);
    const auto size = std::uint64_t{1} << sc.m;
    std::vector<std::uint32_t> first, second;
    for (std::uint64_t j = 0; j < size; ++j) {
        auto u = static_cast<std::uint32_t>(j);
        if (sc.count(u) == sc.count(t1)) first.push_back(u);
    }
    t1 = first[gen() % first.size()];
    for (std::uint64_t j = 0; j < size; ++j) {
        auto u = static_cast<std::uint32_t>(j);
        if (u != t1 && sc.count(u) == sc.count(t2)) second.push_back(u);
    }
    // sc.count(t2) can equal sc.count(t1); the pool excludes the chosen t1.
    if (second.empty()) second.push_back(t2);
    t2 = second[gen() % second.size()];
    return {t1, t2};
}

/// Multinomial sampling by inverse CDF with an explicit seed. Identical
/// (dist, n_shots, seed) give identical counts on every platform: the
/// generator is mt19937_64 and no implementation-defined distribution
/// adapters are involved.
inline ShotCounts sample(const WindowOutcomeDistribution& dist, std::uint64_t n_shots,
                         std::uint64_t seed) {
    if (n_shots < 1) throw std::invalid_argument("sample: n_shots must be >= 1");
    std::vector<double> cdf(dist.probs.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < dist.probs.size(); ++j) {
        acc += dist.probs[j];
        cdf[j] = acc;
    }
    std::mt19937_64 gen(seed);
    ShotCounts sc;
    sc.m = dist.m;
    sc.total = n_shots;
    for (std::uint64_t s = 0; s < n_shots; ++s) {
        double u = uniform_unit(gen) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        auto j = static_cast<std::uint32_t>(std::min<std::size_t>(
            static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1));
        ++sc.counts[j];
    }
    return sc;
}

/// Deterministic stand-in for the shot limit: counts = round(p * 2^31).
/// Exactly equal probabilities produce exactly equal counts, so symmetric
/// half-integer ties survive into the ambiguity check.
inline ShotCounts infinite_shot_counts(const WindowOutcomeDistribution& dist) {
    ShotCounts sc;
    sc.m = dist.m;
    for (std::size_t j = 0; j < dist.probs.size(); ++j) {
        auto c = static_cast<std::uint64_t>(std::llround(std::ldexp(dist.probs[j], 31)));
        if (c > 0) sc.counts[static_cast<std::uint32_t>(j)] = c;
        sc.total += c;
    }
    return sc;
}

} // namespace awqpe
