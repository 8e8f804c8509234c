#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "awqpe/statevector.hpp"
#include "awqpe/window_distribution.hpp"

using namespace awqpe;

namespace {

PhaseValue dec(const char* s) { return PhaseValue::parse_decimal(s, 96); }

// Test-only oracle: the window distribution as the squared geometric sum
// |(1/N) sum_c e^{2 pi i (delta - j/N) c}|^2, evaluated term by term. No
// gates, no closed-form kernel.
std::vector<double> geometric_sum_distribution(double delta, int m) {
    const int n = 1 << m;
    std::vector<double> probs(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        std::complex<double> acc{0.0, 0.0};
        double theta = delta - static_cast<double>(j) / n;
        for (int c = 0; c < n; ++c)
            acc += std::polar(1.0, 2.0 * std::numbers::pi * theta * c);
        probs[static_cast<std::size_t>(j)] = std::norm(acc) / (static_cast<double>(n) * n);
    }
    return probs;
}

double max_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

std::vector<Complex> diag_phase_matrix(double phi) {
    return {Complex{1.0, 0.0}, Complex{0.0, 0.0}, Complex{0.0, 0.0},
            std::polar(1.0, 2.0 * std::numbers::pi * phi)};
}

} // namespace

TEST_CASE("iqft implements the inverse discrete Fourier transform", "[statevector]") {
    double worst = 0.0;
    for (int m = 1; m <= 4; ++m) {
        const int n = 1 << m;
        for (int x = 0; x < n; ++x) {
            StateVector sv(m);
            std::vector<Complex> init(static_cast<std::size_t>(n), Complex{0.0, 0.0});
            init[static_cast<std::size_t>(x)] = Complex{1.0, 0.0};
            sv.set_amplitudes(init);
            sv.iqft(0, m);
            for (int y = 0; y < n; ++y) {
                Complex expected =
                    std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                               -2.0 * std::numbers::pi * static_cast<double>(x) * y / n);
                worst = std::max(worst,
                                 std::abs(sv.amplitudes()[static_cast<std::size_t>(y)] - expected));
            }
        }
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("window circuit matches the kernel model", "[statevector]") {
    auto model = UnitaryModel::diagonal(dec("0.8203125"));
    auto sv = window_distribution_exact(model, 3, 0);
    auto kernel = dirichlet_pmf(dec("0.8203125"), 3);
    CHECK(max_norm_diff(sv.probs, kernel.probs) <= 1e-10);

    // and both match the geometric-sum route
    CHECK(max_norm_diff(sv.probs, geometric_sum_distribution(0.8203125, 3)) <= 1e-10);
}

TEST_CASE("grid eigenphases give point masses through the circuit", "[statevector]") {
    for (int m = 1; m <= 4; ++m) {
        for (int j : {0, 1, (1 << m) - 1}) {
            auto model = UnitaryModel::diagonal(
                PhaseValue(BigInt(j), m).widened(64));
            auto dist = window_distribution_exact(model, m, 0);
            CHECK(dist.probs[static_cast<std::size_t>(j)] == Catch::Approx(1.0).margin(1e-12));
        }
    }

    // shifted window lands on the grid: counts ('010', all shots) in the
    // walkthrough's third block
    auto dist = window_distribution_exact(UnitaryModel::diagonal(dec("0.8203125")), 3, 5);
    CHECK(dist.probs[2] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("standard QPE is the k = 0 window", "[statevector]") {
    auto model = UnitaryModel::diagonal(dec("0.8203125"));
    auto dist = standard_qpe_distribution(model, 8);
    CHECK(dist.probs[210] == Catch::Approx(1.0).margin(1e-10));

    auto one = standard_qpe_distribution(UnitaryModel::diagonal(dec("0.5")), 1);
    CHECK(one.probs[1] == Catch::Approx(1.0).margin(1e-12));

    auto third = standard_qpe_distribution(UnitaryModel::diagonal(dec("0.3")), 4);
    std::size_t argmax = 0;
    for (std::size_t j = 0; j < third.probs.size(); ++j)
        if (third.probs[j] > third.probs[argmax]) argmax = j;
    CHECK(argmax == 5); // 0.3125, Table 1 case 1

    auto window = window_distribution_exact(model, 8, 0);
    CHECK(max_norm_diff(dist.probs, window.probs) == 0.0);
}

TEST_CASE("oracle equivalence over random phases", "[statevector]") {
    std::mt19937_64 gen(5);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        PhaseValue phi(BigInt(gen()), 64);
        auto model = UnitaryModel::diagonal(phi);
        for (int m = 2; m <= 5; ++m)
            for (int k = 0; k <= 6; k += 3) {
                auto sv = window_distribution_exact(model, m, k);
                auto kernel = dirichlet_pmf(window_fraction(phi.widened(k + 64), k), m);
                worst = std::max(worst, max_norm_diff(sv.probs, kernel.probs));
            }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("dense single-qubit model reproduces the diagonal model", "[statevector]") {
    double phi = 0.8203125;
    auto dense = UnitaryModel::dense(diag_phase_matrix(phi),
                                     {Complex{0.0, 0.0}, Complex{1.0, 0.0}});
    CHECK(dense.n_target == 1);
    CHECK(std::abs(dense.eigenphase.to_double() - phi) < 1e-12);

    auto diag = UnitaryModel::diagonal(dec("0.8203125"));
    for (int k : {0, 2, 4}) {
        auto a = window_distribution_exact(dense, 3, k);
        auto b = window_distribution_exact(diag, 3, k);
        CHECK(max_norm_diff(a.probs, b.probs) <= 1e-12);
    }
}

TEST_CASE("two-qubit dense model with rotated eigenbasis", "[statevector]") {
    // U = (H (x) H) D (H (x) H) with D diagonal; eigenstate (H (x) H) e_2.
    const double phi = 0.328125; // 21/64
    const int d = 4;
    std::vector<Complex> had = {
        {0.5, 0}, {0.5, 0}, {0.5, 0}, {0.5, 0},
        {0.5, 0}, {-0.5, 0}, {0.5, 0}, {-0.5, 0},
        {0.5, 0}, {0.5, 0}, {-0.5, 0}, {-0.5, 0},
        {0.5, 0}, {-0.5, 0}, {-0.5, 0}, {0.5, 0}};
    std::vector<Complex> dmat(16, Complex{0.0, 0.0});
    dmat[0] = Complex{1.0, 0.0};
    dmat[5] = std::polar(1.0, 0.4);
    dmat[10] = std::polar(1.0, 2.0 * std::numbers::pi * phi);
    dmat[15] = std::polar(1.0, 1.9);
    auto u = detail::mat_mul(detail::mat_mul(had, dmat, d), had, d);
    std::vector<Complex> v(4);
    for (int i = 0; i < 4; ++i) v[static_cast<std::size_t>(i)] = had[static_cast<std::size_t>(i) * 4 + 2];

    auto model = UnitaryModel::dense(u, v);
    CHECK(model.n_target == 2);
    CHECK(std::abs(model.eigenphase.to_double() - phi) < 1e-12);

    for (int k : {0, 3}) {
        auto circuit = window_distribution_exact(model, 3, k);
        auto kernel = dirichlet_pmf(window_fraction(PhaseValue::parse_decimal("0.328125", 96), k), 3);
        CHECK(max_norm_diff(circuit.probs, kernel.probs) <= 1e-10);
    }
}

TEST_CASE("model validation rejects bad inputs", "[statevector]") {
    // not unitary
    std::vector<Complex> bad = {{1, 0}, {0, 0}, {0, 0}, {0.5, 0}};
    CHECK_THROWS_AS(UnitaryModel::dense(bad, {Complex{0, 0}, Complex{1, 0}}),
                    std::invalid_argument);
    // not normalized
    CHECK_THROWS_AS(UnitaryModel::dense(diag_phase_matrix(0.25), {Complex{0, 0}, Complex{2, 0}}),
                    std::invalid_argument);
    // not an eigenstate
    std::vector<Complex> mix = {Complex{std::numbers::sqrt2 / 2, 0},
                                Complex{std::numbers::sqrt2 / 2, 0}};
    CHECK_THROWS_AS(UnitaryModel::dense(diag_phase_matrix(0.25), mix), std::invalid_argument);
    // dimension bound
    auto model = UnitaryModel::diagonal(dec("0.3"));
    CHECK_THROWS_AS(window_distribution_exact(model, 26, 0), std::invalid_argument);
    CHECK_THROWS_AS(dirichlet_pmf(dec("0.3"), 0), std::invalid_argument);
}

TEST_CASE("dense model file round trip", "[statevector]") {
    std::istringstream file(
        "2\n"
        "1 0  0 0\n"
        "0 0  0.980785280403230449 0.195090322016128268\n" // e^{i 2 pi /32}
        "0 0  1 0\n");
    auto model = load_dense_model(file);
    CHECK(model.n_target == 1);
    CHECK(std::abs(model.eigenphase.to_double() - 1.0 / 32.0) < 1e-12);

    auto dist = window_distribution_exact(model, 5, 0);
    CHECK(dist.probs[1] == Catch::Approx(1.0).margin(1e-10));

    std::istringstream truncated("2\n1 0 0 0\n");
    CHECK_THROWS_AS(load_dense_model(truncated), std::runtime_error);
    std::istringstream empty("");
    CHECK_THROWS_AS(load_dense_model(empty), std::runtime_error);
}

TEST_CASE("norm is preserved through a full circuit", "[statevector]") {
    auto model = UnitaryModel::diagonal(dec("0.37"));
    StateVector sv(6);
    std::vector<Complex> init(64, Complex{0.0, 0.0});
    init[32] = Complex{1.0, 0.0};
    sv.set_amplitudes(init);
    for (int p = 0; p < 5; ++p) sv.h(p);
    for (int p = 0; p < 5; ++p) sv.cphase(p, 5, 0.11 * (p + 1));
    sv.iqft(0, 5);
    CHECK(sv.norm_sq() == Catch::Approx(1.0).margin(1e-12));
}
