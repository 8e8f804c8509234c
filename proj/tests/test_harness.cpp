#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "awqpe/harness.hpp"
#include "awqpe/phase_expr.hpp"

using namespace awqpe;

namespace {

EstimationConfig cfg_of(std::vector<int> m_list, Backend backend = Backend::kKernelSampling,
                        std::uint64_t seed = 1) {
    EstimationConfig cfg;
    cfg.m_list = std::move(m_list);
    cfg.seed = seed;
    cfg.backend = backend;
    return cfg;
}

} // namespace

TEST_CASE("run_case on the walkthrough phase", "[harness]") {
    auto rep = run_case(PhaseValue::parse_decimal("0.8203125"), cfg_of({3, 2, 3}));
    CHECK(rep.raw_bits == "11110010");
    CHECK(rep.est_bits == "11010010");
    CHECK(rep.est_decimal == "0.8203125");
    CHECK(rep.success);
    CHECK_FALSE(rep.exact_half_tie);
    CHECK_FALSE(rep.last_idx.has_value());
    REQUIRE(rep.windows.size() == 3);
    CHECK(rep.windows[0].t1 == 7);
    CHECK(rep.windows[0].t2 == 6);
}

TEST_CASE("run_case on further table rows", "[harness]") {
    auto third = run_case(PhaseValue::parse_decimal("0.671875"), cfg_of({4, 4}));
    CHECK(third.est_decimal == "0.671875");
    CHECK(third.success);

    auto zero = run_case(PhaseValue(), cfg_of({2, 2}));
    CHECK(zero.est_bits == "0000");
    CHECK(zero.success);
}

TEST_CASE("phase near one wraps to zero and counts as success", "[harness]") {
    auto rep = run_case(PhaseValue::parse_decimal("0.99999999"), cfg_of({4, 4}));
    CHECK(rep.phi_bits == "00000000"); // best approximation wraps mod 2^n
    CHECK(rep.est_bits == "00000000");
    CHECK(rep.success);
}

TEST_CASE("dense two-qubit model runs through the full pipeline", "[harness]") {
    // U = (H (x) H) D (H (x) H) with eigenphase 21/64 on the rotated e_2
    const double phi = 0.328125;
    std::vector<Complex> had = {
        {0.5, 0}, {0.5, 0}, {0.5, 0}, {0.5, 0},
        {0.5, 0}, {-0.5, 0}, {0.5, 0}, {-0.5, 0},
        {0.5, 0}, {0.5, 0}, {-0.5, 0}, {-0.5, 0},
        {0.5, 0}, {-0.5, 0}, {-0.5, 0}, {0.5, 0}};
    std::vector<Complex> dmat(16, Complex{0.0, 0.0});
    dmat[0] = Complex{1.0, 0.0};
    dmat[5] = std::polar(1.0, 0.7);
    dmat[10] = std::polar(1.0, 2.0 * std::numbers::pi * phi);
    dmat[15] = std::polar(1.0, 2.3);
    auto u = detail::mat_mul(detail::mat_mul(had, dmat, 4), had, 4);
    std::vector<Complex> v(4);
    for (int i = 0; i < 4; ++i)
        v[static_cast<std::size_t>(i)] = had[static_cast<std::size_t>(i) * 4 + 2];
    auto model = UnitaryModel::dense(u, v);

    for (Backend backend : {Backend::kStatevectorSampling, Backend::kKernelSampling}) {
        auto rep = run_case(model, cfg_of({3, 3}, backend, 5));
        CHECK(rep.est_bits == "010101"); // 21/64
        CHECK(rep.est_decimal == "0.328125");
        CHECK(rep.success);
    }
}

TEST_CASE("composition enumeration", "[harness]") {
    CHECK(compositions_min2(2) == std::vector<std::vector<int>>{{2}});
    CHECK(compositions_min2(5).size() == 3);
    CHECK(compositions_min2(8).size() == 13); // F(7)
    CHECK(compositions_min2(12).size() == 89);
    for (const auto& c : compositions_min2(9)) {
        int total = 0;
        for (int m : c) {
            CHECK(m >= 2);
            total += m;
        }
        CHECK(total == 9);
    }
    // ordered enumeration is duplicate-free
    auto comps = compositions_min2(10);
    std::set<std::vector<int>> uniq(comps.begin(), comps.end());
    CHECK(uniq.size() == comps.size());
}

TEST_CASE("exhaustive grid at desk scale", "[harness]") {
    auto sum = exhaustive_grid(6, {{2, 2, 2}}, cfg_of({2, 2, 2}, Backend::kInfiniteShot));
    CHECK(sum.trials == 64);
    CHECK(sum.successes == 64);
    CHECK(sum.failures.empty());
    // exact-0.5 ties: remainder '1000' after block 1 (4 phases) or '10'
    // after block 2 (16 phases); disjoint patterns
    CHECK(sum.tie_trials == 20);
    CHECK(sum.tie_successes == 20);
    REQUIRE(sum.by_composition.size() == 1);
    CHECK(sum.by_composition[0].trials == 64);

    auto single = exhaustive_grid(2, {{2}}, cfg_of({2}, Backend::kInfiniteShot));
    CHECK(single.trials == 4);
    CHECK(single.successes == 4);
    CHECK(single.tie_trials == 0);
}

TEST_CASE("single-window grid reproduces standard QPE rounding", "[harness]") {
    for (int n : {4, 6}) {
        auto sum = exhaustive_grid(n, {{n}}, cfg_of({n}, Backend::kInfiniteShot));
        CHECK(sum.trials == std::uint64_t{1} << n);
        CHECK(sum.successes == sum.trials);
    }
}

TEST_CASE("monte carlo campaigns are deterministic", "[harness]") {
    std::vector<std::string> records1, records2, records4;
    auto sink_into = [](std::vector<std::string>& out) {
        return [&out](const CaseReport& r) { out.push_back(record_line(r)); };
    };

    auto s1 = monte_carlo(200, 8, {3, 2, 3}, cfg_of({3, 2, 3}, Backend::kKernelSampling, 11), 1,
                          sink_into(records1));
    auto s2 = monte_carlo(200, 8, {3, 2, 3}, cfg_of({3, 2, 3}, Backend::kKernelSampling, 11), 1,
                          sink_into(records2));
    auto s4 = monte_carlo(200, 8, {3, 2, 3}, cfg_of({3, 2, 3}, Backend::kKernelSampling, 11), 4,
                          sink_into(records4));

    CHECK(records1 == records2);
    CHECK(records1 == records4); // thread count must not leak into output
    CHECK(records1.size() == 200);
    CHECK(summary_record(s1).dump() == summary_record(s4).dump());
    // A final window of 3 bits leaves a ~5% band of real phases whose last
    // chunk spuriously matches the special pattern '100' and loses its
    // borrow; see the grid tests for the exact-phase behavior.
    CHECK(s1.successes >= 175);
    CHECK(s1.trials == 200);

    auto other_seed = monte_carlo(200, 8, {3, 2, 3},
                                  cfg_of({3, 2, 3}, Backend::kKernelSampling, 12), 1);
    CHECK(summary_record(other_seed)["seed"] != summary_record(s1)["seed"]);

    // trials = 1 replays as run_case with the derived per-case seed
    std::vector<std::string> one;
    auto single = monte_carlo(1, 8, {3, 2, 3}, cfg_of({3, 2, 3}, Backend::kKernelSampling, 11), 1,
                              sink_into(one));
    REQUIRE(one.size() == 1);
    CHECK(one[0] == records1[0]);
    CHECK(single.trials == 1);
}

TEST_CASE("wide final window keeps the special pattern inside the flag band", "[harness]") {
    // With a 6-bit final window every phase whose last chunk reads '100000'
    // has a preceding-window ratio above the 0.9 threshold, so the ambiguity
    // flag (not the special-chunk bypass) governs the borrow.
    auto sum = monte_carlo(200, 8, {2, 6}, cfg_of({2, 6}, Backend::kKernelSampling, 13), 2);
    CHECK(sum.trials == 200);
    CHECK(sum.successes >= 198);
}

TEST_CASE("uniform four-bit windows at sixteen bits", "[harness]") {
    // With a 4-bit final window, real phases whose residual lands in
    // (0.51, 0.53) draw the special-pattern bypass and lose a needed borrow
    // (~2% of cases), so the rate sits near 0.98 rather than 1; see the
    // README behavior notes. Pinning the band documents the trade-off.
    auto sum = monte_carlo(2000, 16, {4, 4, 4, 4},
                           cfg_of({4, 4, 4, 4}, Backend::kKernelSampling, 17), 4);
    CHECK(sum.trials == 2000);
    CHECK(sum.success_rate() >= 0.95);
    CHECK(sum.success_rate() <= 0.995);
    std::size_t bypass = 0;
    for (const auto& f : sum.failures)
        if (f.last_idx.has_value()) ++bypass;
    CHECK(2 * bypass >= sum.failures.size()); // the bypass dominates the losses
}

TEST_CASE("failures are replayable from their recorded seed", "[harness]") {
    // an otherwise unreachable failure: starve the sampler so noise dominates
    EstimationConfig cfg = cfg_of({3, 3}, Backend::kKernelSampling, 5);
    cfg.shots = 2;
    auto sum = monte_carlo(300, 6, {3, 3}, cfg, 2);
    REQUIRE(sum.trials == 300);
    REQUIRE_FALSE(sum.failures.empty());
    const auto& f = sum.failures.front();
    EstimationConfig replay = cfg;
    replay.seed = f.seed;
    auto again = run_case(PhaseValue::parse_decimal(f.phi_decimal.c_str(),
                                                    6 + 64),
                          replay);
    CHECK(record_line(again) == record_line(f));
}

TEST_CASE("perturbation cross-check", "[harness]") {
    auto cfg = cfg_of({3, 2, 3});
    PhaseValue dphi(BigInt(1), 6); // 1/64
    auto v = perturbation_check(PhaseValue::parse_decimal("0.8203125"), dphi, cfg);
    CHECK(v.pass);
    CHECK(v.base.est_bits == "11010010");
    CHECK(v.shifted.est_bits == "11010110"); // 210/256 + 4/256

    // zero shift is trivially consistent
    auto z = perturbation_check(PhaseValue::parse_decimal("0.8203125"), PhaseValue(), cfg);
    CHECK(z.pass);

    // special chunk on the base run clears after the shift
    PhaseValue special(BigInt(212), 8); // 0.11010100
    PhaseValue shift(BigInt(3), 8);     // 3/256
    auto s = perturbation_check(special, shift, cfg);
    CHECK(s.base.last_idx == 3);
    CHECK(s.base.exact_half_tie);
    CHECK_FALSE(s.shifted.last_idx.has_value());
    CHECK(s.pass);
}

TEST_CASE("structured records carry the frozen field set", "[harness]") {
    auto rep = run_case(PhaseValue::parse_decimal("0.8203125"), cfg_of({3, 2, 3}));
    auto j = case_record(rep);
    for (const char* key :
         {"phi_decimal", "phi_bits", "m_list", "shots", "epsilon", "seed", "backend", "raw_bits",
          "flags", "last_idx", "est_bits", "est_decimal", "est_double", "success",
          "exact_half_tie", "windows"})
        CHECK(j.contains(key));
    REQUIRE(j["windows"].size() == 3);
    for (const char* key : {"block", "start_bit", "width", "t1", "t2", "ratio", "flag_amb",
                            "top_two_adjacent", "chunk", "top_counts"})
        CHECK(j["windows"][0].contains(key));
    CHECK(j["windows"][0]["top_counts"].size() <= 5);
    CHECK(j["est_double"] == "0.8203125");
    CHECK(j["backend"] == "kernel-sampling");

    // one line per record, no embedded newlines
    CHECK(record_line(rep).find('\n') == std::string::npos);
}
