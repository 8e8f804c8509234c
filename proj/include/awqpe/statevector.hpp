#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "awqpe/binary_math.hpp"
#include "awqpe/window_distribution.hpp"

namespace awqpe {

using Complex = std::complex<double>;

/// Operator under estimation. Either a diagonal single-qubit phase model
/// (eigenstate |1>) or a dense unitary with a supplied eigenstate.
struct UnitaryModel {
    enum class Kind { kDiagonal, kDense };

    Kind kind = Kind::kDiagonal;
    PhaseValue eigenphase;            // exact for diagonal, derived for dense
    int n_target = 1;
    std::vector<Complex> matrix;      // dense only, row-major d x d
    std::vector<Complex> eigenstate;  // dense only, length d

    static UnitaryModel diagonal(PhaseValue phi) {
        UnitaryModel m;
        m.kind = Kind::kDiagonal;
        m.eigenphase = std::move(phi);
        m.n_target = 1;
        return m;
    }

    // Validates unitarity, eigenstate normalization and the eigenvalue
    // residual; the eigenphase is derived from the Rayleigh quotient.
    static UnitaryModel dense(std::vector<Complex> matrix, std::vector<Complex> eigenstate);

    int dimension() const { return 1 << n_target; }
};

namespace detail {

inline std::vector<Complex> mat_mul(const std::vector<Complex>& a, const std::vector<Complex>& b,
                                    int d) {
    std::vector<Complex> out(static_cast<std::size_t>(d) * d, Complex{0.0, 0.0});
    for (int i = 0; i < d; ++i)
        for (int l = 0; l < d; ++l) {
            Complex aik = a[static_cast<std::size_t>(i) * d + l];
            if (aik == Complex{}) continue;
            for (int j = 0; j < d; ++j)
                out[static_cast<std::size_t>(i) * d + j] += aik * b[static_cast<std::size_t>(l) * d + j];
        }
    return out;
}

inline std::vector<Complex> mat_vec(const std::vector<Complex>& a, const std::vector<Complex>& v,
                                    int d) {
    std::vector<Complex> out(static_cast<std::size_t>(d), Complex{0.0, 0.0});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out[i] += a[static_cast<std::size_t>(i) * d + j] * v[j];
    return out;
}

// U^(2^t) by t squarings; dyadic exponents stay exact.
inline std::vector<Complex> mat_pow2(std::vector<Complex> u, int d, int t) {
    for (int i = 0; i < t; ++i) u = mat_mul(u, u, d);
    return u;
}

inline double unitarity_defect(const std::vector<Complex>& u, int d) {
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Complex s{0.0, 0.0};
            for (int l = 0; l < d; ++l)
                s += std::conj(u[static_cast<std::size_t>(l) * d + i]) *
                     u[static_cast<std::size_t>(l) * d + j];
            if (i == j) s -= 1.0;
            worst = std::max(worst, std::abs(s));
        }
    return worst;
}

} // namespace detail

inline UnitaryModel UnitaryModel::dense(std::vector<Complex> matrix,
                                        std::vector<Complex> eigenstate) {
    UnitaryModel m;
    m.kind = Kind::kDense;
    const auto d = eigenstate.size();
    if (d < 2 || (d & (d - 1)) != 0)
        throw std::invalid_argument("UnitaryModel: eigenstate dimension must be a power of two >= 2");
    if (matrix.size() != d * d)
        throw std::invalid_argument("UnitaryModel: matrix is not d x d");
    m.n_target = 0;
    for (auto s = d; s > 1; s >>= 1) ++m.n_target;

    if (detail::unitarity_defect(matrix, static_cast<int>(d)) > 1e-10)
        throw std::invalid_argument("UnitaryModel: matrix is not unitary");

    double norm_sq = 0.0;
    for (const auto& a : eigenstate) norm_sq += std::norm(a);
    if (std::abs(norm_sq - 1.0) > 2e-12)
        throw std::invalid_argument("UnitaryModel: eigenstate is not normalized");

    auto image = detail::mat_vec(matrix, eigenstate, static_cast<int>(d));
    Complex lambda{0.0, 0.0};
    for (std::size_t i = 0; i < d; ++i) lambda += std::conj(eigenstate[i]) * image[i];
    double residual = 0.0;
    for (std::size_t i = 0; i < d; ++i) residual += std::norm(image[i] - lambda * eigenstate[i]);
    if (std::sqrt(residual) > 1e-10)
        throw std::invalid_argument("UnitaryModel: supplied vector is not an eigenstate");

    double phi = std::arg(lambda) / (2.0 * std::numbers::pi);
    if (phi < 0.0) phi += 1.0;
    if (phi >= 1.0) phi = 0.0;
    m.eigenphase = PhaseValue::from_double(phi);
    m.matrix = std::move(matrix);
    m.eigenstate = std::move(eigenstate);
    return m;
}

/// Dense model file: first token is the dimension d, followed by d rows of d
/// "re im" pairs, followed by d "re im" pairs for the eigenstate.
inline UnitaryModel load_dense_model(std::istream& in) {
    int d = 0;
    if (!(in >> d) || d < 2) throw std::runtime_error("model file: bad dimension");
    auto read_pair = [&in]() {
        double re = 0.0, im = 0.0;
        if (!(in >> re >> im)) throw std::runtime_error("model file: truncated complex entry");
        return Complex{re, im};
    };
    std::vector<Complex> u(static_cast<std::size_t>(d) * d);
    for (auto& e : u) e = read_pair();
    std::vector<Complex> v(static_cast<std::size_t>(d));
    for (auto& e : v) e = read_pair();
    return UnitaryModel::dense(std::move(u), std::move(v));
}

inline UnitaryModel load_dense_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("model file: cannot open " + path);
    return load_dense_model(in);
}

/// Dense statevector over n qubits; qubit q is bit q of the amplitude index
/// (qubit 0 least significant).
class StateVector {
public:
    explicit StateVector(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 1 || n_qubits > 30) throw std::invalid_argument("StateVector: qubit count");
        amp_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
        amp_[0] = Complex{1.0, 0.0};
        prev_norm_sq_ = 1.0;
    }

    int n_qubits() const { return n_qubits_; }
    const std::vector<Complex>& amplitudes() const { return amp_; }

    void set_amplitudes(std::vector<Complex> amps) {
        if (amps.size() != amp_.size()) throw std::invalid_argument("StateVector: size mismatch");
        amp_ = std::move(amps);
        prev_norm_sq_ = norm_sq();
    }

    void h(int q) {
        const std::size_t bit = std::size_t{1} << q;
        const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if (i & bit) continue;
            Complex a = amp_[i], b = amp_[i | bit];
            amp_[i] = (a + b) * inv_sqrt2;
            amp_[i | bit] = (a - b) * inv_sqrt2;
        }
        check_norm();
    }

    // diag(1, 1, 1, e^{i angle}) on the (control, target) pair.
    void cphase(int control, int target, double angle) {
        const std::size_t mask = (std::size_t{1} << control) | (std::size_t{1} << target);
        const Complex w = std::polar(1.0, angle);
        for (std::size_t i = 0; i < amp_.size(); ++i)
            if ((i & mask) == mask) amp_[i] *= w;
        check_norm();
    }

    void swap_qubits(int a, int b) {
        const std::size_t ba = std::size_t{1} << a, bb = std::size_t{1} << b;
        for (std::size_t i = 0; i < amp_.size(); ++i)
            if ((i & ba) && !(i & bb)) std::swap(amp_[i], amp_[(i ^ ba) | bb]);
        check_norm();
    }

    // Applies the d x d matrix `w` to the target register (qubits
    // [target_low, target_low + n_target)) on every branch where `control`
    // is set.
    void controlled_unitary(int control, int target_low, int n_target,
                            const std::vector<Complex>& w) {
        if (control >= target_low && control < target_low + n_target)
            throw std::invalid_argument("controlled_unitary: control inside target register");
        const int d = 1 << n_target;
        const std::size_t cbit = std::size_t{1} << control;
        const std::size_t tmask = std::size_t{static_cast<std::size_t>(d) - 1} << target_low;
        std::vector<Complex> in(static_cast<std::size_t>(d));
        for (std::size_t base = 0; base < amp_.size(); ++base) {
            if ((base & tmask) != 0 || !(base & cbit)) continue;
            for (int t = 0; t < d; ++t)
                in[t] = amp_[base | (static_cast<std::size_t>(t) << target_low)];
            for (int t = 0; t < d; ++t) {
                Complex s{0.0, 0.0};
                for (int u = 0; u < d; ++u) s += w[static_cast<std::size_t>(t) * d + u] * in[u];
                amp_[base | (static_cast<std::size_t>(t) << target_low)] = s;
            }
        }
        check_norm();
    }

    // Inverse quantum Fourier transform on qubits [low, low + m): qubit
    // reversal swaps, then for each wire the conjugated controlled rotations
    // followed by a Hadamard.
    void iqft(int low, int m) {
        for (int i = 0; i < m / 2; ++i) swap_qubits(low + i, low + m - 1 - i);
        for (int q = 0; q < m; ++q) {
            for (int d = 0; d < q; ++d)
                cphase(low + d, low + q, -std::numbers::pi / std::ldexp(1.0, q - d));
            h(low + q);
        }
    }

    // Marginal distribution of qubits [low, low + m).
    std::vector<double> marginal(int low, int m) const {
        std::vector<double> probs(std::size_t{1} << m, 0.0);
        const std::size_t mask = (std::size_t{1} << m) - 1;
        for (std::size_t i = 0; i < amp_.size(); ++i)
            probs[(i >> low) & mask] += std::norm(amp_[i]);
        return probs;
    }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& a : amp_) s += std::norm(a);
        return s;
    }

private:
    void check_norm() {
#ifndef NDEBUG
        double n = norm_sq();
        assert(std::abs(n - prev_norm_sq_) <= 1e-12 && "gate broke norm preservation");
        prev_norm_sq_ = n;
#endif
    }

    std::vector<Complex> amp_;
    int n_qubits_;
    double prev_norm_sq_;
};

/// Exact control-register distribution of one window circuit: Hadamards,
/// controlled U^(2^(k+p)) for p in [0, m), and the inverse QFT. Layout:
/// control qubits are bits [0, m), the target register bits [m, m + n_T).
inline WindowOutcomeDistribution window_distribution_exact(const UnitaryModel& model, int m, int k,
                                                           int max_qubits = 26) {
    if (m < 1) throw std::invalid_argument("window_distribution_exact: m must be >= 1");
    if (k < 0) throw std::invalid_argument("window_distribution_exact: k must be >= 0");
    if (m + model.n_target > max_qubits)
        throw std::invalid_argument("window_distribution_exact: dimension bound exceeded");

    StateVector sv(m + model.n_target);

    if (model.kind == UnitaryModel::Kind::kDiagonal) {
        // Eigenstate |1> on the single target qubit.
        std::vector<Complex> init(std::size_t{1} << (m + 1), Complex{0.0, 0.0});
        init[std::size_t{1} << m] = Complex{1.0, 0.0};
        sv.set_amplitudes(std::move(init));
        PhaseValue phi = model.eigenphase.widened(k + m + 64);
        for (int p = 0; p < m; ++p) sv.h(p);
        for (int p = 0; p < m; ++p) {
            double delta = window_fraction(phi, k + p).to_double();
            sv.cphase(p, m, 2.0 * std::numbers::pi * delta);
        }
    } else {
        const int d = model.dimension();
        std::vector<Complex> init(std::size_t{1} << (m + model.n_target), Complex{0.0, 0.0});
        for (int t = 0; t < d; ++t)
            init[static_cast<std::size_t>(t) << m] = model.eigenstate[t];
        sv.set_amplitudes(std::move(init));
        for (int p = 0; p < m; ++p) sv.h(p);
        auto w = detail::mat_pow2(model.matrix, d, k);
        for (int p = 0; p < m; ++p) {
            sv.controlled_unitary(p, m, model.n_target, w);
            if (p + 1 < m) w = detail::mat_mul(w, w, d);
        }
    }

    sv.iqft(0, m);

    WindowOutcomeDistribution dist;
    dist.m = m;
    dist.probs = sv.marginal(0, m);
    return dist;
}

/// Standard QPE with n control qubits: the window circuit at k = 0 and
/// width n.
inline WindowOutcomeDistribution standard_qpe_distribution(const UnitaryModel& model, int n,
                                                           int max_qubits = 26) {
    return window_distribution_exact(model, n, 0, max_qubits);
}

} // namespace awqpe
