// pgm.hpp
// The worst-case pretty good measurement: POVM elements
// E_i = S^{-1/2} |v_i><v_i| S^{-1/2} with S = sum_i |v_i><v_i|, exact
// per-state and worst-case success probabilities, and the trace diagnostics
// (A_i, B_i) that certify the inequality chain behind the refined bound.

#pragma once

#include <sstream>
#include <stdexcept>
#include <vector>

#include "discrimlab/ensemble.hpp"
#include "discrimlab/numerics.hpp"
#include "discrimlab/sma.hpp"

namespace discrimlab {

// A finite family of PSD effects summing to the projector onto the span of
// the states; completeness holds on that support, not on the full space,
// whenever S is rank-deficient.
struct Povm {
    std::vector<Matrix> elements;
    Matrix support;
};

// Exact success probabilities p_i = <v_i|E_i|v_i> and their minimum.
struct DiscriminationReport {
    std::vector<double> per_state;
    double worst_case = 0.0;
    int argmin_index = 0;  // 1-based
};

// Tr(A_i^2), Tr(B_i^2), Tr(A_i B_i) for A_i = S^{1/4} M_i S^{1/4} and
// B_i = S^{-1/4} |v_i><v_i| S^{-1/4}, where M_i are the sequential effects.
struct ProofDiagnostics {
    std::vector<double> tr_a2;
    std::vector<double> tr_b2;
    std::vector<double> tr_ab;
};

namespace detail {

inline Matrix state_sum_operator(const StateEnsemble& e) {
    Matrix s = Matrix::Zero(e.d, e.d);
    for (const Vector& v : e.states) {
        s += v * v.adjoint();
    }
    return (s + s.adjoint()) / 2.0;
}

}  // namespace detail

inline Povm build_pgm(const StateEnsemble& e, SpectralCutoff cutoff = {}) {
    validate_ensemble(e);
    const Matrix s = detail::state_sum_operator(e);
    const Matrix s_inv_sqrt = spectral_power(s, -0.5, cutoff);
    Povm povm;
    povm.elements.reserve(e.m());
    for (const Vector& v : e.states) {
        const Vector w = s_inv_sqrt * v;
        Matrix element = w * w.adjoint();
        povm.elements.push_back((element + element.adjoint()) / 2.0);
    }
    povm.support = support_projector(s, cutoff);
    return povm;
}

// p_i = (<v_i|S^{-1/2}|v_i>)^2, computed without materializing E_i (fewer
// products, better conditioning). Values are sanity-checked against [0,1]
// with a 1e-9 slack -- anything further out is a bug, not rounding -- and
// then clamped.
inline DiscriminationReport pgm_success(const StateEnsemble& e, SpectralCutoff cutoff = {}) {
    validate_ensemble(e);
    const Matrix s = detail::state_sum_operator(e);
    const Matrix s_inv_sqrt = spectral_power(s, -0.5, cutoff);
    DiscriminationReport report;
    report.per_state.reserve(e.m());
    for (int i = 0; i < e.m(); ++i) {
        const double amplitude = detail::expectation(s_inv_sqrt, e.states[i]);
        double p = amplitude * amplitude;
        if (p < -1e-9 || p > 1.0 + 1e-9) {
            std::ostringstream msg;
            msg << "pgm_success: probability " << p << " for state " << (i + 1)
                << " is outside [0,1] beyond tolerance";
            throw std::runtime_error(msg.str());
        }
        report.per_state.push_back(std::min(std::max(p, 0.0), 1.0));
    }
    report.worst_case = report.per_state[0];
    report.argmin_index = 1;
    for (int i = 1; i < e.m(); ++i) {
        if (report.per_state[i] < report.worst_case) {
            report.worst_case = report.per_state[i];
            report.argmin_index = i + 1;
        }
    }
    return report;
}

// Trace diagnostics for the refined bound's proof chain. Exact identities
// (verified by the test suite): Tr(B_i^2) equals p_i from pgm_success, and
// Tr(A_i B_i) equals <v_i|M_i|v_i> because the S^{1/4} factors cancel under
// the trace against the rank-one B_i.
inline ProofDiagnostics proof_diagnostics(const StateEnsemble& e, SpectralCutoff cutoff = {}) {
    validate_ensemble(e);
    const Matrix s = detail::state_sum_operator(e);
    const Matrix s_quarter = spectral_power(s, 0.25, cutoff);
    const Matrix s_inv_quarter = spectral_power(s, -0.25, cutoff);
    const SequentialOperators ops = build_sequential(e);
    ProofDiagnostics diag;
    diag.tr_a2.reserve(e.m());
    diag.tr_b2.reserve(e.m());
    diag.tr_ab.reserve(e.m());
    for (int i = 0; i < e.m(); ++i) {
        Matrix a = s_quarter * ops.effects[i] * s_quarter;
        a = (a + a.adjoint()) / 2.0;
        const Vector w = s_inv_quarter * e.states[i];  // B_i = |w><w|
        diag.tr_a2.push_back(a.squaredNorm());         // Tr(A^2) for Hermitian A
        const double w2 = w.squaredNorm();
        diag.tr_b2.push_back(w2 * w2);
        diag.tr_ab.push_back(std::real(Complex(w.adjoint() * a * w)));
    }
    return diag;
}

}  // namespace discrimlab
