// ensemble.hpp
// Pure-state ensembles: random and overlap-controlled construction, Gram
// matrices, and the worst-case pairwise overlap/fidelity statistics that the
// closed-form bounds consume.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "discrimlab/numerics.hpp"

namespace discrimlab {

// A pure state is a unit vector; ensembles own m of them in dimension d.
using PureState = Vector;

struct StateEnsemble {
    int d = 0;
    std::vector<PureState> states;

    int m() const { return static_cast<int>(states.size()); }
};

// Validates dimensions and unit norms (norm within 1e-12 of 1). All factory
// functions call this before returning; operations may assume it holds.
inline void validate_ensemble(const StateEnsemble& e) {
    if (e.d < 1) {
        throw std::invalid_argument("ensemble: dimension must be >= 1");
    }
    if (e.m() < 2) {
        throw std::invalid_argument("ensemble: need at least 2 states");
    }
    for (int i = 0; i < e.m(); ++i) {
        if (e.states[i].size() != e.d) {
            std::ostringstream msg;
            msg << "ensemble: state " << (i + 1) << " has dimension "
                << e.states[i].size() << ", expected " << e.d;
            throw std::invalid_argument(msg.str());
        }
        const double norm = e.states[i].norm();
        if (std::abs(norm - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg << "ensemble: state " << (i + 1) << " has norm " << norm
                << " (must be 1 within 1e-12)";
            throw std::invalid_argument(msg.str());
        }
    }
}

// Gram matrix G(i,j) = <v_i|v_j>. Built exactly Hermitian with unit diagonal.
inline Matrix gram(const StateEnsemble& e) {
    validate_ensemble(e);
    const int m = e.m();
    Matrix g(m, m);
    for (int i = 0; i < m; ++i) {
        g(i, i) = 1.0;
        for (int j = i + 1; j < m; ++j) {
            const Complex inner = e.states[i].dot(e.states[j]);
            g(i, j) = inner;
            g(j, i) = std::conj(inner);
        }
    }
    return g;
}

// Largest pairwise overlap magnitude c = max_{i<j} |<v_i|v_j>|. This is the
// quantity the closed-form bounds are functions of.
inline double max_pairwise_overlap(const StateEnsemble& e) {
    const Matrix g = gram(e);
    double c = 0.0;
    for (int i = 0; i < g.rows(); ++i) {
        for (int j = i + 1; j < g.cols(); ++j) {
            c = std::max(c, std::abs(g(i, j)));
        }
    }
    return std::min(c, 1.0);
}

// Largest pairwise fidelity max_{i<j} |<v_i|v_j>|^2, i.e. the square of
// max_pairwise_overlap. Reported alongside the overlap; see README on which
// of the two each formula consumes.
inline double max_pairwise_fidelity(const StateEnsemble& e) {
    const double c = max_pairwise_overlap(e);
    return c * c;
}

// m independent Haar-random unit vectors in dimension d: i.i.d. standard
// complex Gaussian entries, then normalize (exact Haar marginal for a single
// vector). Fully deterministic for a fixed seed.
inline StateEnsemble haar_random(int d, int m, std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("haar_random: d must be >= 1");
    if (m < 2) throw std::invalid_argument("haar_random: m must be >= 2");
    std::mt19937_64 engine(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    StateEnsemble e;
    e.d = d;
    e.states.reserve(m);
    for (int i = 0; i < m; ++i) {
        Vector v(d);
        double norm2 = 0.0;
        do {
            for (int k = 0; k < d; ++k) {
                v(k) = Complex(gauss(engine), gauss(engine));
            }
            norm2 = v.squaredNorm();
        } while (norm2 < 1e-24);  // a.s. never loops; guards the degenerate draw
        e.states.push_back(v / std::sqrt(norm2));
    }
    validate_ensemble(e);
    return e;
}

// Factorizes a PSD unit-diagonal Gram matrix into an ensemble realizing it:
// state i has components sqrt(lambda_k) * conj(V(i,k)) over the eigenmodes
// above the cutoff, so <w_i|w_j> = G(i,j). The dimension is rank(G) unless a
// larger target_dim is requested (zero-padded).
inline StateEnsemble from_gram(const Matrix& g,
                               std::optional<int> target_dim = std::nullopt,
                               SpectralCutoff cutoff = {}) {
    if (g.rows() != g.cols() || g.rows() < 2) {
        throw std::invalid_argument("from_gram: matrix must be square with m >= 2");
    }
    const int m = static_cast<int>(g.rows());
    const double defect = hermiticity_defect(g);
    if (!(defect <= 1e-12)) {
        std::ostringstream msg;
        msg << "from_gram: matrix is not Hermitian (max asymmetry " << defect << ")";
        throw std::invalid_argument(msg.str());
    }
    for (int i = 0; i < m; ++i) {
        if (std::abs(g(i, i) - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg << "from_gram: diagonal entry " << (i + 1) << " is " << g(i, i)
                << " (must be 1 within 1e-12)";
            throw std::invalid_argument(msg.str());
        }
    }
    const EigenDecomposition ed = eigh(g);
    if (ed.eigenvalues(0) < -1e-9) {
        std::ostringstream msg;
        msg << "from_gram: matrix is not PSD (eigenvalue " << ed.eigenvalues(0) << ")";
        throw std::invalid_argument(msg.str());
    }
    const double zero_cut =
        cutoff.relative_threshold * std::max(ed.eigenvalues(m - 1), 0.0);
    std::vector<int> kept;
    for (int k = 0; k < m; ++k) {
        if (ed.eigenvalues(k) > zero_cut) kept.push_back(k);
    }
    const int rank = static_cast<int>(kept.size());
    if (target_dim && *target_dim < rank) {
        std::ostringstream msg;
        msg << "from_gram: target_dim " << *target_dim << " is below rank " << rank;
        throw std::invalid_argument(msg.str());
    }
    const int d = target_dim.value_or(rank);
    StateEnsemble e;
    e.d = d;
    e.states.reserve(m);
    for (int i = 0; i < m; ++i) {
        Vector v = Vector::Zero(d);
        for (int k = 0; k < rank; ++k) {
            const double lambda = ed.eigenvalues(kept[k]);
            v(k) = std::sqrt(lambda) * std::conj(ed.eigenvectors(i, kept[k]));
        }
        // Unit diagonal guarantees norm 1 up to rounding and discarded modes;
        // renormalize so the ensemble invariant holds exactly.
        e.states.push_back(v / v.norm());
    }
    validate_ensemble(e);
    return e;
}

// Ensemble whose pairwise overlaps are all equal to c, built from the Gram
// matrix (1-c)I + cJ. PSD for real c in [0,1); c=1 collapses all states.
inline StateEnsemble equal_overlap_ensemble(int m, double c) {
    if (m < 2) throw std::invalid_argument("equal_overlap_ensemble: m must be >= 2");
    if (!(c >= 0.0 && c < 1.0)) {
        std::ostringstream msg;
        msg << "equal_overlap_ensemble: overlap " << c << " outside [0, 1)";
        throw std::invalid_argument(msg.str());
    }
    Matrix g = Matrix::Constant(m, m, Complex(c, 0.0));
    for (int i = 0; i < m; ++i) g(i, i) = 1.0;
    return from_gram(g);
}

}  // namespace discrimlab
