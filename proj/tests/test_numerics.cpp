// Tests for the Hermitian linear-algebra kernels: eigendecomposition,
// spectral pseudo-powers, support projectors, PSD checks.

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "discrimlab/numerics.hpp"

using namespace discrimlab;

namespace {

// Deterministic random Hermitian matrix with entries O(1).
Matrix random_hermitian(int n, std::uint64_t seed) {
    std::mt19937_64 engine(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = Complex(gauss(engine), gauss(engine));
        }
    }
    return (a + a.adjoint()) / 2.0;
}

// Random positive definite matrix with spectrum in [shift, shift + O(1)].
Matrix random_positive_definite(int n, std::uint64_t seed, double shift = 0.5) {
    const Matrix h = random_hermitian(n, seed);
    return h * h + shift * Matrix::Identity(n, n);
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("eigh on the identity") {
    const Matrix id = Matrix::Identity(2, 2);
    const EigenDecomposition ed = eigh(id);
    REQUIRE(ed.eigenvalues(0) == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(ed.eigenvalues(1) == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(max_abs(ed.eigenvectors.adjoint() * ed.eigenvectors - id) < 1e-10);
}

TEST_CASE("eigh on an already diagonal matrix") {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = -1.0;
    h(1, 1) = 2.0;
    const EigenDecomposition ed = eigh(h);
    REQUIRE(ed.eigenvalues(0) == Catch::Approx(-1.0).margin(1e-14));
    REQUIRE(ed.eigenvalues(1) == Catch::Approx(2.0).margin(1e-14));
    // Eigenvectors are the standard basis up to phase.
    REQUIRE(std::abs(ed.eigenvectors(0, 0)) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(std::abs(ed.eigenvectors(1, 1)) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("eigh reconstructs a random Hermitian matrix") {
    const Matrix h = random_hermitian(6, 42);
    const EigenDecomposition ed = eigh(h);
    const Matrix rebuilt = ed.eigenvectors *
                           ed.eigenvalues.cast<Complex>().asDiagonal() *
                           ed.eigenvectors.adjoint();
    REQUIRE(max_abs(rebuilt - h) < 1e-10);
    REQUIRE(max_abs(ed.eigenvectors.adjoint() * ed.eigenvectors -
                    Matrix::Identity(6, 6)) < 1e-10);
    for (int i = 1; i < ed.eigenvalues.size(); ++i) {
        REQUIRE(ed.eigenvalues(i - 1) <= ed.eigenvalues(i));
    }
}

TEST_CASE("eigh rejects a non-Hermitian matrix and reports the asymmetry") {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 1) = Complex(0.5, 0.0);
    h(1, 0) = Complex(0.25, 0.0);  // asymmetry 0.25
    REQUIRE_THROWS_MATCHES(eigh(h), std::invalid_argument,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("0.25")));
}

TEST_CASE("spectral_power of the identity at p = -1/2") {
    const Matrix id = Matrix::Identity(3, 3);
    REQUIRE(max_abs(spectral_power(id, -0.5) - id) < 1e-12);
}

TEST_CASE("spectral_power applies the pseudo-inverse convention on zero modes") {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 4.0;
    const Matrix r = spectral_power(h, -0.5);
    REQUIRE(std::real(r(0, 0)) == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(std::abs(r(1, 1)) < 1e-14);
    REQUIRE(std::abs(r(0, 1)) < 1e-14);
}

TEST_CASE("a projector is a fixed point of positive powers") {
    // Rank-2 projector built from two orthonormal vectors in d=4.
    Matrix basis = Matrix::Zero(4, 2);
    basis(0, 0) = 1.0;
    basis(2, 1) = 1.0;
    const Matrix projector = basis * basis.adjoint();
    REQUIRE(max_abs(spectral_power(projector, 0.25) - projector) < 1e-12);
}

TEST_CASE("square root composed with squaring recovers the operator") {
    const Matrix h = random_positive_definite(5, 7);
    const Matrix root = spectral_power(h, 0.5);
    REQUIRE(max_abs(spectral_power(root, 2.0) - h) < 1e-9);
}

TEST_CASE("quarter power squared equals the half power") {
    const Matrix h = random_positive_definite(6, 11);
    const Matrix quarter = spectral_power(h, 0.25);
    const Matrix half = spectral_power(h, 0.5);
    REQUIRE(max_abs(quarter * quarter - half) < 1e-9);
}

TEST_CASE("whitening a rank-deficient operator yields its support projector") {
    // Rank-3 PSD operator in d=5.
    std::mt19937_64 engine(splitmix64(3));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix b(5, 3);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 3; ++j) b(i, j) = Complex(gauss(engine), gauss(engine));
    }
    const Matrix h = b * b.adjoint();
    const Matrix inv_sqrt = spectral_power(h, -0.5);
    const Matrix support = support_projector(h);
    REQUIRE(max_abs(inv_sqrt * h * inv_sqrt - support) < 1e-9);
    // The support is idempotent with rank 3.
    REQUIRE(max_abs(support * support - support) < 1e-10);
    REQUIRE(std::real(support.trace()) == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("fractional powers reject materially negative spectra") {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = -0.5;
    REQUIRE_THROWS_AS(spectral_power(h, -0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(spectral_power(h, 0.25), std::invalid_argument);
    // Non-negative integer powers pass negatives through exactly.
    const Matrix sq = spectral_power(h, 2.0);
    REQUIRE(std::real(sq(1, 1)) == Catch::Approx(0.25).margin(1e-14));
}

TEST_CASE("is_psd classifies definite, indefinite, and Gram-like matrices") {
    REQUIRE(is_psd(Matrix::Identity(3, 3), 1e-9));
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = -0.5;
    REQUIRE_FALSE(is_psd(h, 1e-9));
    // Any B B^dagger is PSD by construction.
    const Matrix g = random_positive_definite(4, 19, 0.0);
    REQUIRE(is_psd(g, 1e-9));
}

TEST_CASE("seed mixing is deterministic and sensitive to both arguments") {
    REQUIRE(mix_seed(1, 2) == mix_seed(1, 2));
    REQUIRE(mix_seed(1, 2) != mix_seed(1, 3));
    REQUIRE(mix_seed(1, 2) != mix_seed(2, 2));
}
