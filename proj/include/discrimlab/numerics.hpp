// numerics.hpp
// Dense complex Hermitian linear algebra: eigendecomposition, spectral
// pseudo-powers, support projectors, and PSD checks. Everything downstream
// (measurement construction, bound verification) is built on these kernels.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace discrimlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;   // Hermitian by contract where noted
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Eigenvalues treated as exactly zero when <= relative_threshold * lambda_max.
// Relative rather than absolute: the operators we invert scale with the number
// of states, so a fixed absolute floor would misclassify modes as m grows.
struct SpectralCutoff {
    double relative_threshold = 1e-10;
};

// Spectral data of a Hermitian operator: ascending eigenvalues, unitary
// eigenvector matrix (columns are eigenvectors).
struct EigenDecomposition {
    RealVector eigenvalues;
    Matrix eigenvectors;
};

// Largest absolute deviation from Hermitian symmetry.
inline double hermiticity_defect(const Matrix& h) {
    return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

// Hermitian eigendecomposition. Rejects inputs whose asymmetry exceeds the
// tolerance; the diagnostic carries the measured defect so callers can tell
// rounding drift from a genuinely wrong operator.
inline EigenDecomposition eigh(const Matrix& h, double hermitian_tol = 1e-12) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw std::invalid_argument("eigh: matrix must be square and non-empty");
    }
    const double defect = hermiticity_defect(h);
    if (!(defect <= hermitian_tol)) {
        std::ostringstream msg;
        msg << "eigh: matrix is not Hermitian (max asymmetry " << defect
            << " exceeds tolerance " << hermitian_tol << ")";
        throw std::invalid_argument(msg.str());
    }
    // Symmetrize before solving so the solver sees an exactly Hermitian input.
    const Matrix sym = (h + h.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigh: eigendecomposition failed to converge");
    }
    return EigenDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

// f(lambda) applied through an eigendecomposition: V diag(f(lambda)) V^dagger.
template <typename F>
inline Matrix apply_spectral_function(const EigenDecomposition& ed, F&& f) {
    const Eigen::Index n = ed.eigenvalues.size();
    RealVector mapped(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        mapped(i) = f(ed.eigenvalues(i));
    }
    Matrix result = ed.eigenvectors * mapped.asDiagonal() * ed.eigenvectors.adjoint();
    // Symmetrize to erase the rounding skew of the triple product.
    return (result + result.adjoint()) / 2.0;
}

// Spectral pseudo-power H^p. Eigenvalues at or below the relative cutoff are
// mapped to zero (pseudo-inverse convention on rank-deficient operators).
// Fractional or negative powers require a PSD input: an eigenvalue negative
// beyond the cutoff scale is rejected. Non-negative integer powers pass
// negative eigenvalues through as lambda^p.
inline Matrix spectral_power(const Matrix& h, double p, SpectralCutoff cutoff = {}) {
    const EigenDecomposition ed = eigh(h);
    const double lambda_max = ed.eigenvalues(ed.eigenvalues.size() - 1);
    const double scale = ed.eigenvalues.cwiseAbs().maxCoeff();
    const double zero_cut = cutoff.relative_threshold * std::max(lambda_max, 0.0);
    const bool needs_psd = (p < 0.0) || (std::floor(p) != p);
    if (needs_psd) {
        const double lambda_min = ed.eigenvalues(0);
        if (lambda_min < -cutoff.relative_threshold * scale) {
            std::ostringstream msg;
            msg << "spectral_power: operator is not PSD (eigenvalue "
                << lambda_min << ") for power " << p;
            throw std::invalid_argument(msg.str());
        }
        return apply_spectral_function(ed, [&](double lambda) {
            return lambda > zero_cut ? std::pow(lambda, p) : 0.0;
        });
    }
    return apply_spectral_function(ed, [&](double lambda) {
        return std::abs(lambda) > zero_cut ? std::pow(lambda, p) : 0.0;
    });
}

// Orthogonal projector onto the span of the eigenvectors above the cutoff.
inline Matrix support_projector(const Matrix& h, SpectralCutoff cutoff = {}) {
    const EigenDecomposition ed = eigh(h);
    const double lambda_max = ed.eigenvalues(ed.eigenvalues.size() - 1);
    const double zero_cut = cutoff.relative_threshold * std::max(lambda_max, 0.0);
    return apply_spectral_function(ed, [&](double lambda) {
        return lambda > zero_cut ? 1.0 : 0.0;
    });
}

// Number of eigenvalues above the cutoff.
inline int spectral_rank(const EigenDecomposition& ed, SpectralCutoff cutoff = {}) {
    const double lambda_max = ed.eigenvalues(ed.eigenvalues.size() - 1);
    const double zero_cut = cutoff.relative_threshold * std::max(lambda_max, 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i) {
        if (ed.eigenvalues(i) > zero_cut) ++rank;
    }
    return rank;
}

// True iff the smallest eigenvalue is >= -tol.
inline bool is_psd(const Matrix& h, double tol) {
    return eigh(h).eigenvalues(0) >= -tol;
}

// Smallest eigenvalue; convenient for PSD margins in reports.
inline double min_eigenvalue(const Matrix& h) {
    return eigh(h).eigenvalues(0);
}

// SplitMix64 scrambler; used to decorrelate user seeds and derive
// per-trajectory / per-trial streams deterministically.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic combination of a base seed with a counter.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
    return splitmix64(splitmix64(seed) + counter);
}

}  // namespace discrimlab
