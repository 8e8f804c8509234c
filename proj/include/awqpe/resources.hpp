#pragma once

#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace awqpe {

/// Gate tally of the inverse QFT on m qubits under the decomposition used by
/// the simulator: m Hadamards, m(m-1)/2 controlled rotations, floor(m/2)
/// qubit-reversal swaps.
struct IqftGates {
    int hadamards = 0;
    int controlled_rotations = 0;
    int swaps = 0;
    int total() const { return hadamards + controlled_rotations + swaps; }
};

inline IqftGates iqft_gates(int m) {
    if (m < 1) throw std::invalid_argument("iqft_gates: m must be >= 1");
    return {m, m * (m - 1) / 2, m / 2};
}

/// Per-block resource row. Unit costs are abstract: applications of U weigh
/// one gate-cost unit C_g(U) each; depths are in units of C_d(U).
struct BlockResources {
    int block = 0; // 1-based; 0 marks the standard-QPE comparison row
    int control_qubits = 0;
    std::uint64_t u_applications = 0;
    // Dominant controlled power in the block, 2^(sum_{j<=i} m_j - 1).
    std::uint64_t depth_dominant = 0;
    // Sequential applications of U in the block (all controlled powers
    // synthesized back to back), 2^(k_i) * (2^(m_i) - 1).
    std::uint64_t depth_sequential = 0;
    IqftGates iqft;
};

struct ResourceReport {
    std::vector<int> m_list;
    std::vector<BlockResources> blocks;
    BlockResources standard; // the n-qubit standard-QPE row
    std::uint64_t total_u_applications = 0;
    int max_control_qubits = 0;
};

namespace detail {
inline void check_resource_width(int n) {
    if (n < 1 || n > 62) throw std::invalid_argument("resources: total bits must be in [1, 62]");
}
} // namespace detail

/// Applications of U synthesized into block i (1-based):
/// 2^(m_1 + ... + m_{i-1}) * (2^(m_i) - 1). Summed over all blocks this
/// telescopes to 2^n - 1, the standard-QPE total.
inline std::uint64_t u_applications(const std::vector<int>& m_list, int block) {
    if (block < 1 || block > static_cast<int>(m_list.size()))
        throw std::invalid_argument("u_applications: block index out of range");
    int prefix = 0;
    for (int j = 0; j < block - 1; ++j) prefix += m_list[static_cast<std::size_t>(j)];
    const int m = m_list[static_cast<std::size_t>(block - 1)];
    detail::check_resource_width(prefix + m);
    return (std::uint64_t{1} << prefix) * ((std::uint64_t{1} << m) - 1);
}

inline std::uint64_t u_applications_standard(int n) {
    detail::check_resource_width(n);
    return (std::uint64_t{1} << n) - 1;
}

inline ResourceReport resource_report(const std::vector<int>& m_list) {
    if (m_list.empty()) throw std::invalid_argument("resource_report: empty m_list");
    const int n = std::accumulate(m_list.begin(), m_list.end(), 0);
    detail::check_resource_width(n);

    ResourceReport rep;
    rep.m_list = m_list;
    int prefix = 0;
    for (int i = 0; i < static_cast<int>(m_list.size()); ++i) {
        const int m = m_list[static_cast<std::size_t>(i)];
        if (m < 1) throw std::invalid_argument("resource_report: bad window size");
        BlockResources b;
        b.block = i + 1;
        b.control_qubits = m;
        b.u_applications = u_applications(m_list, i + 1);
        b.depth_dominant = std::uint64_t{1} << (prefix + m - 1);
        b.depth_sequential = b.u_applications;
        b.iqft = iqft_gates(m);
        rep.total_u_applications += b.u_applications;
        rep.max_control_qubits = std::max(rep.max_control_qubits, m);
        rep.blocks.push_back(b);
        prefix += m;
    }

    rep.standard.block = 0;
    rep.standard.control_qubits = n;
    rep.standard.u_applications = u_applications_standard(n);
    rep.standard.depth_dominant = std::uint64_t{1} << (n - 1);
    rep.standard.depth_sequential = rep.standard.u_applications;
    rep.standard.iqft = iqft_gates(n);
    return rep;
}

inline std::string to_csv(const ResourceReport& rep) {
    std::ostringstream os;
    os << "row,control_qubits,u_applications,depth_dominant,depth_sequential,"
          "iqft_h,iqft_crot,iqft_swap\n";
    for (const auto& b : rep.blocks)
        os << "block" << b.block << ',' << b.control_qubits << ',' << b.u_applications << ','
           << b.depth_dominant << ',' << b.depth_sequential << ',' << b.iqft.hadamards << ','
           << b.iqft.controlled_rotations << ',' << b.iqft.swaps << '\n';
    const auto& s = rep.standard;
    os << "standard," << s.control_qubits << ',' << s.u_applications << ',' << s.depth_dominant
       << ',' << s.depth_sequential << ',' << s.iqft.hadamards << ',' << s.iqft.controlled_rotations
       << ',' << s.iqft.swaps << '\n';
    return os.str();
}

inline std::string to_text(const ResourceReport& rep) {
    std::ostringstream os;
    os << "row        ctrl  U-apps      depth(dom)  depth(seq)  IQFT(H/CR/SW)\n";
    auto line = [&os](const BlockResources& b, const std::string& name) {
        os << name;
        for (std::size_t i = name.size(); i < 11; ++i) os << ' ';
        std::string ctrl = std::to_string(b.control_qubits);
        os << ctrl;
        for (std::size_t i = ctrl.size(); i < 6; ++i) os << ' ';
        std::string ua = std::to_string(b.u_applications);
        os << ua;
        for (std::size_t i = ua.size(); i < 12; ++i) os << ' ';
        std::string dd = std::to_string(b.depth_dominant);
        os << dd;
        for (std::size_t i = dd.size(); i < 12; ++i) os << ' ';
        std::string ds = std::to_string(b.depth_sequential);
        os << ds;
        for (std::size_t i = ds.size(); i < 12; ++i) os << ' ';
        os << b.iqft.hadamards << '/' << b.iqft.controlled_rotations << '/' << b.iqft.swaps << '\n';
    };
    for (const auto& b : rep.blocks) line(b, "block " + std::to_string(b.block));
    line(rep.standard, "standard");
    os << "total U applications over blocks: " << rep.total_u_applications
       << " (standard: " << rep.standard.u_applications << ")\n";
    os << "max control qubits: " << rep.max_control_qubits
       << " (standard: " << rep.standard.control_qubits << ")\n";
    return os.str();
}

} // namespace awqpe
