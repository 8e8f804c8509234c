#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "awqpe/binary_math.hpp"
#include "awqpe/rng.hpp"
#include "awqpe/statevector.hpp"
#include "awqpe/window_distribution.hpp"

namespace awqpe {

enum class Backend { kKernelSampling, kStatevectorSampling, kInfiniteShot };

inline const char* backend_name(Backend b) {
    switch (b) {
        case Backend::kKernelSampling: return "kernel-sampling";
        case Backend::kStatevectorSampling: return "statevector-sampling";
        case Backend::kInfiniteShot: return "infinite-shot";
    }
    return "?";
}

inline std::optional<Backend> backend_from_name(std::string_view s) {
    if (s == "kernel-sampling") return Backend::kKernelSampling;
    if (s == "statevector-sampling") return Backend::kStatevectorSampling;
    if (s == "infinite-shot") return Backend::kInfiniteShot;
    return std::nullopt;
}

struct EstimationConfig {
    std::vector<int> m_list;
    std::uint64_t shots = 10240;
    double epsilon = 0.9;
    std::uint64_t seed = 0;
    Backend backend = Backend::kKernelSampling;
    bool random_tie_break = false;

    int n_total() const { return std::accumulate(m_list.begin(), m_list.end(), 0); }

    void validate() const {
        if (m_list.empty()) throw std::invalid_argument("config: m_list is empty");
        for (int m : m_list)
            if (m < 2 || m > 24)
                throw std::invalid_argument("config: every window size must be in [2, 24]");
        if (shots < 1) throw std::invalid_argument("config: shots must be >= 1");
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::invalid_argument("config: epsilon must be in (0, 1)");
    }
};

/// Diagnostics of one executed window.
struct WindowRecord {
    int block = 0;     // 1-based
    int start_bit = 0; // k
    int width = 0;     // m_i
    ShotCounts counts;
    std::uint32_t t1 = 0;
    std::uint32_t t2 = 0;
    double ratio = 0.0;
    bool flag_amb = false;
    bool top_two_adjacent = true;
    BitString chunk;
};

/// Output of the windowed estimation loop: concatenated raw chunks plus the
/// per-block ambiguity flags (most significant block first).
struct RawEstimate {
    BitString raw_bits;
    std::vector<bool> flags;
    std::vector<WindowRecord> windows;
};

/// One window execution through the configured backend. Sampling backends
/// draw `cfg.shots` multinomial shots from the window distribution; the
/// infinite-shot backend freezes counts at round(p * 2^31), preserving exact
/// probability ties.
inline ShotCounts run_window(const UnitaryModel& model, int k, int m, const EstimationConfig& cfg,
                             std::uint64_t block_seed) {
    WindowOutcomeDistribution dist;
    if (cfg.backend == Backend::kStatevectorSampling) {
        dist = window_distribution_exact(model, m, k);
    } else {
        PhaseValue phi = model.eigenphase.widened(k + m + 64);
        dist = dirichlet_pmf(window_fraction(phi, k), m);
    }
    if (cfg.backend == Backend::kInfiniteShot) return infinite_shot_counts(dist);
    return sample(dist, cfg.shots, block_seed);
}

struct ChunkSelection {
    BitString chunk;
    bool flag_amb = false;
    std::uint32_t t1 = 0;
    std::uint32_t t2 = 0;
    double ratio = 0.0;
    bool adjacent = true;
};

/// Ambiguity check and chunk choice for one window. The flag fires when
/// C(t2)/C(t1) exceeds epsilon; a flagged non-final block takes the cyclic
/// minimum of the two leaders (preemptive round-down), the final block keeps
/// t1 since no lower window can resolve it later.
inline ChunkSelection select_chunk(const ShotCounts& counts, double epsilon, bool is_final_block,
                                   bool random_tie_break = false,
                                   std::mt19937_64* gen = nullptr) {
    ChunkSelection sel;
    auto [t1, t2] = (random_tie_break && gen) ? top_two_random(counts, *gen) : top_two(counts);
    sel.t1 = t1;
    sel.t2 = t2;
    sel.ratio = static_cast<double>(counts.count(t2)) / static_cast<double>(counts.count(t1));
    const std::uint64_t size = std::uint64_t{1} << counts.m;
    const std::uint64_t diff = (t1 + size - t2) % size;
    sel.adjacent = diff == 1 || diff == size - 1;

    std::uint64_t chosen = t1;
    if (sel.ratio > epsilon) {
        sel.flag_amb = true;
        if (!is_final_block) chosen = cyclic_min(t1, t2, size);
    }
    sel.chunk = BitString(BigInt(chosen), counts.m);
    return sel;
}

/// Full estimation loop over the block list; block i covers start bit
/// k_i = m_1 + ... + m_{i-1}. Each block draws its shots from an
/// independently derived seed, so the result does not depend on the order
/// (or concurrency) of block execution.
inline RawEstimate estimate_raw(const UnitaryModel& model, const EstimationConfig& cfg) {
    cfg.validate();
    const int n_total = cfg.n_total();
    const int blocks = static_cast<int>(cfg.m_list.size());

    RawEstimate out;
    std::vector<BitString> chunks;
    chunks.reserve(static_cast<std::size_t>(blocks));

    int k = 0;
    for (int i = 0; i < blocks; ++i) {
        const int m = cfg.m_list[static_cast<std::size_t>(i)];
        const std::uint64_t block_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));

        WindowRecord rec;
        rec.block = i + 1;
        rec.start_bit = k;
        rec.width = m;
        rec.counts = run_window(model, k, m, cfg, block_seed);

        std::mt19937_64 tie_gen(derive_seed(block_seed, 0));
        ChunkSelection sel = select_chunk(rec.counts, cfg.epsilon, k + m >= n_total,
                                          cfg.random_tie_break, &tie_gen);
        rec.t1 = sel.t1;
        rec.t2 = sel.t2;
        rec.ratio = sel.ratio;
        rec.flag_amb = sel.flag_amb;
        rec.top_two_adjacent = sel.adjacent;
        rec.chunk = sel.chunk;

        out.flags.push_back(rec.flag_amb);
        chunks.push_back(rec.chunk);
        out.windows.push_back(std::move(rec));
        k += m;
    }
    out.raw_bits = BitString::concat(chunks);
    return out;
}

inline RawEstimate estimate_raw(const PhaseValue& phi, const EstimationConfig& cfg) {
    return estimate_raw(UnitaryModel::diagonal(phi.widened(cfg.n_total() + 64)), cfg);
}

} // namespace awqpe
