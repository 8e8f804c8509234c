#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "awqpe/binary_math.hpp"
#include "awqpe/estimator.hpp"
#include "awqpe/resolution.hpp"
#include "awqpe/rng.hpp"

namespace awqpe {

inline std::string shortest_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

/// Everything needed to replay and audit one estimation run.
struct CaseReport {
    std::string phi_decimal;     // exact input phase
    std::string phi_bits;        // target: best n_total-bit approximation
    std::vector<int> m_list;
    std::uint64_t shots = 0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    Backend backend = Backend::kKernelSampling;
    std::string raw_bits;
    std::vector<bool> flags;
    std::optional<int> last_idx;
    std::string est_bits;
    std::string est_decimal;     // exact
    double est_value = 0.0;
    bool success = false;
    bool exact_half_tie = false; // some window fraction is exactly one half
    std::vector<WindowRecord> windows;
};

struct CompositionStats {
    std::vector<int> m_list;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::uint64_t tie_trials = 0;
    std::uint64_t tie_successes = 0;
};

struct CampaignSummary {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::uint64_t tie_trials = 0;     // cases with an exact-0.5 window tie
    std::uint64_t tie_successes = 0;
    std::vector<CaseReport> failures; // ordered by case index (phase order)
    std::vector<CompositionStats> by_composition;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;

    double success_rate() const {
        return trials == 0 ? 1.0 : static_cast<double>(successes) / static_cast<double>(trials);
    }

    void add(const CaseReport& r) {
        ++trials;
        if (r.success) ++successes;
        if (r.exact_half_tie) {
            ++tie_trials;
            if (r.success) ++tie_successes;
        }
        if (!r.success) failures.push_back(r);
    }
};

/// Wires estimation, resolution and the success predicate: success means the
/// final bits equal the best n_total-bit approximation of the true phase
/// (wraparound at 1 included, since best_approx reduces mod 2^n).
inline CaseReport run_case(const UnitaryModel& model, const EstimationConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_total();
    const PhaseValue phi = model.eigenphase.widened(n + 64);

    RawEstimate raw = estimate_raw(model, cfg);
    ResolvedEstimate res = resolve(raw.raw_bits, cfg.m_list, raw.flags);

    CaseReport rep;
    rep.phi_decimal = phi.decimal();
    rep.phi_bits = BitString(best_approx(phi, n), n).str();
    rep.m_list = cfg.m_list;
    rep.shots = cfg.shots;
    rep.epsilon = cfg.epsilon;
    rep.seed = cfg.seed;
    rep.backend = cfg.backend;
    rep.raw_bits = raw.raw_bits.str();
    rep.flags = raw.flags;
    rep.last_idx = res.last_idx;
    rep.est_bits = res.est_bits.str();
    rep.est_decimal = res.value.decimal();
    rep.est_value = res.value.to_double();
    rep.success = res.est_bits.str() == rep.phi_bits;
    rep.windows = std::move(raw.windows);

    const BigInt half = pow2(phi.bits() - 1);
    int k = 0;
    for (int m : cfg.m_list) {
        if (window_fraction(phi, k + m).numerator() == half) {
            rep.exact_half_tie = true;
            break;
        }
        k += m;
    }
    return rep;
}

inline CaseReport run_case(const PhaseValue& phi, const EstimationConfig& cfg) {
    return run_case(UnitaryModel::diagonal(phi.widened(cfg.n_total() + 64)), cfg);
}

namespace detail {

// Ordered, batched parallel map over case indices. Results reach the sink in
// index order regardless of the thread count, which keeps campaign output
// byte-identical across schedules.
inline void for_each_case(std::uint64_t count, int threads,
                          const std::function<CaseReport(std::uint64_t)>& make,
                          const std::function<void(CaseReport&&)>& sink) {
    constexpr std::uint64_t kBatch = 4096;
    std::vector<CaseReport> buf;
    for (std::uint64_t start = 0; start < count; start += kBatch) {
        const std::uint64_t len = std::min(kBatch, count - start);
        buf.assign(len, CaseReport{});
        const int workers =
            std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::uint64_t>(
                                                   len, std::uint64_t{64}))));
        if (workers == 1) {
            for (std::uint64_t i = 0; i < len; ++i) buf[i] = make(start + i);
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w) {
                const std::uint64_t lo = len * static_cast<std::uint64_t>(w) /
                                         static_cast<std::uint64_t>(workers);
                const std::uint64_t hi = len * static_cast<std::uint64_t>(w + 1) /
                                         static_cast<std::uint64_t>(workers);
                pool.emplace_back([&, lo, hi, w] {
                    try {
                        for (std::uint64_t i = lo; i < hi; ++i) buf[i] = make(start + i);
                    } catch (...) {
                        errors[static_cast<std::size_t>(w)] = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) t.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }
        for (auto& r : buf) sink(std::move(r));
    }
}

} // namespace detail

/// All compositions of n into ordered parts >= 2, lexicographic by first
/// part. The count is the Fibonacci number F(n-1).
inline std::vector<std::vector<int>> compositions_min2(int n) {
    std::vector<std::vector<int>> out;
    if (n < 2) return out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int rest) {
        if (rest == 0) {
            out.push_back(cur);
            return;
        }
        for (int p = 2; p <= rest; ++p) {
            if (rest - p == 1) continue;
            cur.push_back(p);
            rec(rest - p);
            cur.pop_back();
        }
    };
    rec(n);
    return out;
}

using CaseSink = std::function<void(const CaseReport&)>;

/// Enumerates every dyadic phase I/2^n for each composition; the default
/// infinite-shot backend makes the sweep a deterministic check of the
/// reconstruction theorem. Cases with an exact-0.5 window fraction land in a
/// separate tally, since the measurement statistics are genuinely ambiguous
/// there.
inline CampaignSummary exhaustive_grid(int n, const std::vector<std::vector<int>>& m_lists,
                                       EstimationConfig base, int threads = 1,
                                       const CaseSink& sink = {}) {
    if (n < 2 || n > 14) throw std::invalid_argument("exhaustive_grid: n must be in [2, 14]");
    const auto t0 = std::chrono::steady_clock::now();
    CampaignSummary sum;
    sum.seed = base.seed;
    const std::uint64_t per_comp = std::uint64_t{1} << n;

    for (std::size_t c = 0; c < m_lists.size(); ++c) {
        const auto& m_list = m_lists[c];
        int total = 0;
        for (int m : m_list) total += m;
        if (total != n) throw std::invalid_argument("exhaustive_grid: composition does not sum to n");

        EstimationConfig cfg = base;
        cfg.m_list = m_list;
        CompositionStats stats;
        stats.m_list = m_list;

        detail::for_each_case(
            per_comp, threads,
            [&](std::uint64_t i) {
                EstimationConfig cc = cfg;
                cc.seed = derive_seed(base.seed, c * per_comp + i);
                PhaseValue phi = PhaseValue::from_dyadic(DyadicFraction(BigInt(i), n));
                return run_case(phi, cc);
            },
            [&](CaseReport&& r) {
                ++stats.trials;
                if (r.success) ++stats.successes;
                if (r.exact_half_tie) {
                    ++stats.tie_trials;
                    if (r.success) ++stats.tie_successes;
                }
                if (sink) sink(r);
                sum.add(r);
            });
        sum.by_composition.push_back(std::move(stats));
    }
    sum.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sum;
}

/// Uniform random phases at n + 64 fixed-point bits; fully determined by the
/// master seed.
inline CampaignSummary monte_carlo(std::uint64_t trials, int n, const std::vector<int>& m_list,
                                   EstimationConfig base, int threads = 1,
                                   const CaseSink& sink = {}) {
    if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();
    EstimationConfig cfg = base;
    cfg.m_list = m_list;
    cfg.validate();
    if (cfg.n_total() != n) throw std::invalid_argument("monte_carlo: m_list does not sum to n");

    CampaignSummary sum;
    sum.seed = base.seed;
    const int bits = n + 64;

    detail::for_each_case(
        trials, threads,
        [&](std::uint64_t i) {
            const std::uint64_t case_seed = derive_seed(base.seed, i);
            std::mt19937_64 gen(case_seed);
            BigInt num = 0;
            for (int b = 0; b < bits; b += 64) num = (num << 64) | BigInt(gen());
            EstimationConfig cc = cfg;
            cc.seed = case_seed;
            return run_case(PhaseValue(num % pow2(bits), bits), cc);
        },
        [&](CaseReport&& r) {
            if (sink) sink(r);
            sum.add(r);
        });
    sum.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sum;
}

/// Cross-validation against the shifted operator e^{i 2 pi dphi} U: both
/// phases are estimated independently and the difference of the estimates
/// must land within 2^(1 - n_total) of dphi on the circle.
struct PerturbationVerdict {
    CaseReport base;
    CaseReport shifted;
    std::string dphi_decimal;
    std::string difference_decimal;
    bool pass = false;
};

inline PerturbationVerdict perturbation_check(const PhaseValue& phi, const PhaseValue& dphi,
                                              const EstimationConfig& cfg) {
    const int n = cfg.n_total();
    PerturbationVerdict v;
    v.dphi_decimal = dphi.decimal();
    v.base = run_case(phi, cfg);

    EstimationConfig shifted_cfg = cfg;
    shifted_cfg.seed = derive_seed(cfg.seed, 0x70657274u); // independent second run
    v.shifted = run_case(phi.add_mod1(dphi), shifted_cfg);

    PhaseValue est1 = PhaseValue::from_dyadic(DyadicFraction(
        BitString::parse(v.base.est_bits).value(), n));
    PhaseValue est2 = PhaseValue::from_dyadic(DyadicFraction(
        BitString::parse(v.shifted.est_bits).value(), n));
    PhaseValue diff = est2.sub_mod1(est1);
    v.difference_decimal = diff.decimal();
    PhaseValue tolerance(BigInt(2), n); // 2^(1 - n_total)
    v.pass = diff.circle_distance(dphi) <= tolerance;
    return v;
}

// --- structured-record serialization (field set is append-only) -----------

inline nlohmann::ordered_json window_record_json(const WindowRecord& w) {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> top(w.counts.counts.begin(),
                                                             w.counts.counts.end());
    std::stable_sort(top.begin(), top.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (top.size() > 5) top.resize(5);
    nlohmann::ordered_json j;
    j["block"] = w.block;
    j["start_bit"] = w.start_bit;
    j["width"] = w.width;
    j["t1"] = w.t1;
    j["t2"] = w.t2;
    j["ratio"] = w.ratio;
    j["flag_amb"] = w.flag_amb;
    j["top_two_adjacent"] = w.top_two_adjacent;
    j["chunk"] = w.chunk.str();
    auto tc = nlohmann::ordered_json::array();
    for (const auto& [outcome, count] : top) tc.push_back({outcome, count});
    j["top_counts"] = tc;
    return j;
}

inline nlohmann::ordered_json case_record(const CaseReport& r) {
    nlohmann::ordered_json j;
    j["phi_decimal"] = r.phi_decimal;
    j["phi_bits"] = r.phi_bits;
    j["m_list"] = r.m_list;
    j["shots"] = r.shots;
    j["epsilon"] = r.epsilon;
    j["seed"] = r.seed;
    j["backend"] = backend_name(r.backend);
    j["raw_bits"] = r.raw_bits;
    j["flags"] = r.flags;
    if (r.last_idx)
        j["last_idx"] = *r.last_idx;
    else
        j["last_idx"] = nullptr;
    j["est_bits"] = r.est_bits;
    j["est_decimal"] = r.est_decimal;
    j["est_double"] = shortest_double(r.est_value);
    j["success"] = r.success;
    j["exact_half_tie"] = r.exact_half_tie;
    auto ws = nlohmann::ordered_json::array();
    for (const auto& w : r.windows) ws.push_back(window_record_json(w));
    j["windows"] = ws;
    return j;
}

inline std::string record_line(const CaseReport& r) { return case_record(r).dump(); }

// Wall time is intentionally absent: summary records must be byte-identical
// across reruns and thread counts.
inline nlohmann::ordered_json summary_record(const CampaignSummary& s) {
    nlohmann::ordered_json j;
    j["trials"] = s.trials;
    j["successes"] = s.successes;
    j["success_rate"] = s.success_rate();
    j["tie_trials"] = s.tie_trials;
    j["tie_successes"] = s.tie_successes;
    j["failures"] = s.failures.size();
    j["seed"] = s.seed;
    if (!s.by_composition.empty()) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& c : s.by_composition) {
            nlohmann::ordered_json e;
            e["m_list"] = c.m_list;
            e["trials"] = c.trials;
            e["successes"] = c.successes;
            e["tie_trials"] = c.tie_trials;
            e["tie_successes"] = c.tie_successes;
            arr.push_back(e);
        }
        j["by_composition"] = arr;
    }
    return j;
}

} // namespace awqpe
