#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "awqpe/binary_math.hpp"

namespace awqpe {

/// Final corrected estimate.
struct ResolvedEstimate {
    BitString est_bits;
    std::optional<int> last_idx; // 1-based index of the special chunk, if any
    DyadicFraction value;
};

/// Scans from the last chunk toward the first, skipping all-zero chunks; at
/// the first non-zero chunk returns its index when the chunk equals
/// 2^(m_j - 1) (pattern '10...0'), otherwise nothing. Earlier chunks are
/// never inspected: a residual fraction of exactly one half can only sit
/// immediately left of trailing zeros.
inline std::optional<int> find_special_chunk(const std::vector<BitString>& chunks) {
    if (chunks.empty()) throw std::invalid_argument("find_special_chunk: no chunks");
    for (int j = static_cast<int>(chunks.size()) - 1; j >= 0; --j) {
        const BitString& c = chunks[static_cast<std::size_t>(j)];
        if (c.value() == 0) continue;
        if (c.value() == pow2(c.length() - 1)) return j + 1;
        return std::nullopt;
    }
    return std::nullopt;
}

/// LSB-to-MSB borrow correction. For j from B-1 down to 1 the correction bit
/// is the MSB of the (already corrected) chunk j+1; it is suppressed when
/// chunk j carries its own ambiguity flag (the round-down was applied
/// preemptively at selection time) or when chunk j+1 is the special chunk
/// (residual exactly one half, borrow direction undecidable). The correction
/// subtracts modulo 2^(m_j), so 0 wraps to 2^(m_j) - 1.
inline ResolvedEstimate resolve(const BitString& raw_bits, const std::vector<int>& m_list,
                                const std::vector<bool>& flags) {
    const int blocks = static_cast<int>(m_list.size());
    if (blocks == 0) throw std::invalid_argument("resolve: empty m_list");
    if (static_cast<int>(flags.size()) != blocks)
        throw std::invalid_argument("resolve: flag count does not match block count");
    int n_total = 0;
    for (int m : m_list) {
        if (m < 1) throw std::invalid_argument("resolve: bad chunk width");
        n_total += m;
    }
    if (raw_bits.length() != n_total)
        throw std::invalid_argument("resolve: raw bit length does not match m_list");

    std::vector<BitString> chunks;
    chunks.reserve(static_cast<std::size_t>(blocks));
    int pos = 0;
    for (int m : m_list) {
        chunks.push_back(raw_bits.slice(pos, m));
        pos += m;
    }

    std::optional<int> last_idx = find_special_chunk(chunks);

    for (int j = blocks - 2; j >= 0; --j) {
        const auto cur = static_cast<std::size_t>(j);
        int b_corr = chunks[cur + 1].msb() ? 1 : 0;
        if (flags[cur] || (last_idx && *last_idx == j + 2)) b_corr = 0;
        if (b_corr == 0) continue;
        const int m = m_list[cur];
        BigInt x = chunks[cur].value() - b_corr;
        if (x < 0) x += pow2(m);
        chunks[cur] = BitString(x, m);
    }

    ResolvedEstimate out;
    out.est_bits = BitString::concat(chunks);
    out.last_idx = last_idx;
    out.value = DyadicFraction::from_bits(out.est_bits);
    return out;
}

} // namespace awqpe
