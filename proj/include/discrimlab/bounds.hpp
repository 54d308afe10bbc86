// bounds.hpp
// Closed-form lower bounds on worst-case discrimination success, the
// polynomial apparatus certifying that the refined bound dominates the linear
// one, and the grid/critical-point verifier for the whole inequality family.
//
// Convention: every closed form below is a function of the maximal pairwise
// overlap magnitude F = max_{i<j} |<v_i|v_j>| (NOT its square). Whenever a
// bound is evaluated on a concrete ensemble, max_pairwise_overlap supplies
// the argument; the squared quantity (max_pairwise_fidelity) is carried in
// reports for reference. See README for the rationale and the numerical
// evidence behind this choice.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "discrimlab/ensemble.hpp"
#include "discrimlab/pgm.hpp"
#include "discrimlab/sma.hpp"

namespace discrimlab {

// ---------------------------------------------------------------------------
// Closed-form bounds
// ---------------------------------------------------------------------------

// Linear bound 1 - mF. May be negative; never clamped (dominance comparisons
// need the raw value).
inline double linear_bound(int m, double f) {
    return 1.0 - m * f;
}

// The union term 1 - 4(m-1)F^2 shared by the refined bound and the
// sequential-measurement bound. The refined bound is only meaningful as a
// lower bound when this is non-negative.
inline double union_term(int m, double f) {
    return 1.0 - 4.0 * (m - 1) * f * f;
}

// Refined bound (1 - 4(m-1)F^2)^2 / (1 + mF^2).
inline double refined_bound(int m, double f) {
    const double u = union_term(m, f);
    return u * u / (1.0 + m * f * f);
}

// Sequential-measurement lower bound evaluated on a concrete ensemble:
// min over k of [ 1 - 4(m-1)F^2 + (1/m) <v_k|M_{m+1}|v_k> ], with F the
// maximal pairwise overlap. The per-state vector is exposed for diagnostics;
// the minimum is the worst-case statement.
inline std::vector<double> seq_bound_per_state(const StateEnsemble& e) {
    validate_ensemble(e);
    const SequentialOperators ops = build_sequential(e);
    const int m = e.m();
    const double u = union_term(m, max_pairwise_overlap(e));
    std::vector<double> values;
    values.reserve(m);
    for (int k = 0; k < m; ++k) {
        const double survive = detail::expectation(ops.effects[m], e.states[k]);
        values.push_back(u + survive / m);
    }
    return values;
}

inline double seq_lower_bound(const StateEnsemble& e) {
    const std::vector<double> per_state = seq_bound_per_state(e);
    double worst = per_state[0];
    for (double v : per_state) worst = std::min(worst, v);
    return worst;
}

// ---------------------------------------------------------------------------
// Polynomial apparatus: g(F,m) = F * h(F,m) measures refined - linear
// dominance; p(F) lower-bounds dh/dm for m >= 4.
// ---------------------------------------------------------------------------

// g(F,m) = (1 - 4(m-1)F^2)^2 - (1 + mF^2)(1 - mF).
inline double g_poly(double f, int m) {
    const double u = union_term(m, f);
    return u * u - (1.0 + m * f * f) * linear_bound(m, f);
}

// h(F,m) = 16(m-1)^2 F^3 + m^2 F^2 - 8(m-1)F - mF + m, the cofactor in
// g = F * h. Positivity of h on (0,1] for m >= 4 is the dominance claim.
inline double h_poly(double f, int m) {
    const double mm1 = static_cast<double>(m - 1);
    return 16.0 * mm1 * mm1 * f * f * f + static_cast<double>(m) * m * f * f -
           8.0 * mm1 * f - m * f + m;
}

// dh/dF = 48(m-1)^2 F^2 + 2 m^2 F - 8(m-1) - m.
inline double h_poly_df(double f, int m) {
    const double mm1 = static_cast<double>(m - 1);
    return 48.0 * mm1 * mm1 * f * f + 2.0 * static_cast<double>(m) * m * f -
           8.0 * mm1 - m;
}

// dh/dm = 32(m-1)F^3 + 2mF^2 - 9F + 1. At m = 4 this is exactly p(F).
inline double dh_dm(double f, int m) {
    return 32.0 * (m - 1) * f * f * f + 2.0 * m * f * f - 9.0 * f + 1.0;
}

// p(F) = 96F^3 + 8F^2 - 9F + 1.
inline double p_poly(double f) {
    return 96.0 * f * f * f + 8.0 * f * f - 9.0 * f + 1.0;
}

enum class CurvatureSign { positive, negative };

// A stationary point of one of the polynomials: location, value there, and
// the sign of the second derivative (positive certifies a local minimum).
struct CriticalPoint {
    double location = 0.0;
    double value = 0.0;
    CurvatureSign second_derivative_sign = CurvatureSign::positive;
};

// Positive root of dh/dF(., m) = 48(m-1)^2 F^2 + 2m^2 F - (8(m-1)+m), i.e.
// the minimizer of h(., m) on (0, infinity). For m = 4 the quadratic is
// 432 F^2 + 32 F - 28. h'' = 96(m-1)^2 F + 2m^2 > 0 for F > 0.
inline CriticalPoint h_critical_point(int m = 4) {
    if (m < 2) throw std::invalid_argument("h_critical_point: m must be >= 2");
    const double a = 48.0 * static_cast<double>(m - 1) * (m - 1);
    const double b = 2.0 * static_cast<double>(m) * m;
    const double c = -(8.0 * (m - 1) + m);
    const double root = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
    CriticalPoint cp;
    cp.location = root;
    cp.value = h_poly(root, m);
    cp.second_derivative_sign = CurvatureSign::positive;
    return cp;
}

// Positive root of p'(F) = 288 F^2 + 16 F - 9; p'' = 576 F + 16 > 0.
inline CriticalPoint p_critical_point() {
    const double a = 288.0;
    const double b = 16.0;
    const double c = -9.0;
    const double root = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
    CriticalPoint cp;
    cp.location = root;
    cp.value = p_poly(root);
    cp.second_derivative_sign = CurvatureSign::positive;
    return cp;
}

// ---------------------------------------------------------------------------
// Ensemble-level bound report
// ---------------------------------------------------------------------------

// Everything the eval command prints for one ensemble: the overlap argument
// F, its square (fidelity), raw bound values, exact success probabilities,
// and dominance flags recomputed from the stored values.
struct BoundReport {
    int m = 0;
    double overlap = 0.0;   // F fed to the closed forms
    double fidelity = 0.0;  // overlap^2, for reference
    double linear = 0.0;
    double refined = 0.0;
    double union_term = 0.0;
    std::optional<double> seq_bound;
    std::optional<double> pgm_exact;
    std::optional<double> sm_exact;
    bool refined_ge_linear = false;
    std::optional<bool> pgm_ge_linear;
    std::optional<bool> pgm_ge_refined;
    std::optional<bool> sm_ge_seq_bound;
};

inline void recompute_flags(BoundReport& r) {
    r.refined_ge_linear = r.refined >= r.linear;
    r.pgm_ge_linear.reset();
    r.pgm_ge_refined.reset();
    r.sm_ge_seq_bound.reset();
    if (r.pgm_exact) {
        r.pgm_ge_linear = *r.pgm_exact >= r.linear;
        r.pgm_ge_refined = *r.pgm_exact >= r.refined;
    }
    if (r.sm_exact && r.seq_bound) {
        r.sm_ge_seq_bound = *r.sm_exact >= *r.seq_bound;
    }
}

inline BoundReport make_bound_report(const StateEnsemble& e) {
    BoundReport r;
    r.m = e.m();
    r.overlap = max_pairwise_overlap(e);
    r.fidelity = r.overlap * r.overlap;
    r.linear = linear_bound(r.m, r.overlap);
    r.refined = refined_bound(r.m, r.overlap);
    r.union_term = union_term(r.m, r.overlap);
    r.seq_bound = seq_lower_bound(e);
    r.pgm_exact = pgm_success(e).worst_case;
    r.sm_exact = sm_success(e);
    recompute_flags(r);
    return r;
}

// ---------------------------------------------------------------------------
// Grid + critical-point verifier for the polynomial inequality family
// ---------------------------------------------------------------------------

// Result of certify_polynomials. Asserted on the grid F in {step, 2*step, .., 1},
// m in {4, .., m_max}: h > 0, |g - F*h| within relative 1e-12, refined >
// linear, dh/dm > 0 for m > 4, dh/dm >= p for m >= 4, and h strictly
// increasing in m. The minima of h(., m) and p are additionally certified at
// their exact closed-form critical points. m = 2 and m = 3 are negative
// controls: dominance failures there are counted but never asserted against.
struct VerificationSummary {
    double grid_step = 0.0;
    int m_max = 0;
    long cells_checked = 0;
    long violations = 0;
    std::string first_violation;  // empty when clean

    double min_h_value = std::numeric_limits<double>::infinity();
    double min_h_location_f = 0.0;
    int min_h_location_m = 0;
    double min_dominance_margin = std::numeric_limits<double>::infinity();
    double max_identity_rel_err = 0.0;
    double min_dh_dm_value = std::numeric_limits<double>::infinity();
    double min_monotonicity_gap = std::numeric_limits<double>::infinity();

    CriticalPoint h_minimum;        // of h(., 4)
    CriticalPoint p_minimum;        // of p
    long m2_dominance_failures = 0;  // negative control, reported only
    long m3_dominance_failures = 0;

    bool passed = false;
};

inline VerificationSummary certify_polynomials(double grid_step, int m_max) {
    if (!(grid_step > 0.0 && grid_step <= 0.01)) {
        throw std::invalid_argument("certify_polynomials: grid_step must lie in (0, 0.01]");
    }
    if (m_max < 4) {
        throw std::invalid_argument("certify_polynomials: m_max must be >= 4");
    }
    VerificationSummary s;
    s.grid_step = grid_step;
    s.m_max = m_max;

    auto record_violation = [&s](const std::string& what) {
        ++s.violations;
        if (s.first_violation.empty()) s.first_violation = what;
    };

    const long steps = std::lround(1.0 / grid_step);
    for (int m = 4; m <= m_max; ++m) {
        for (long k = 1; k <= steps; ++k) {
            const double f = static_cast<double>(k) * grid_step;
            ++s.cells_checked;

            const double h = h_poly(f, m);
            if (h < s.min_h_value) {
                s.min_h_value = h;
                s.min_h_location_f = f;
                s.min_h_location_m = m;
            }
            if (!(h > 0.0)) {
                std::ostringstream msg;
                msg << "h(F,m) <= 0 at F=" << f << " m=" << m << " (h=" << h << ")";
                record_violation(msg.str());
            }

            const double g = g_poly(f, m);
            const double rel_err =
                std::abs(g - f * h) / std::max(1.0, std::abs(g));
            s.max_identity_rel_err = std::max(s.max_identity_rel_err, rel_err);
            if (!(rel_err <= 1e-12)) {
                std::ostringstream msg;
                msg << "g != F*h at F=" << f << " m=" << m << " (rel err " << rel_err << ")";
                record_violation(msg.str());
            }

            const double margin = refined_bound(m, f) - linear_bound(m, f);
            s.min_dominance_margin = std::min(s.min_dominance_margin, margin);
            if (!(margin > 0.0)) {
                std::ostringstream msg;
                msg << "refined <= linear at F=" << f << " m=" << m
                    << " (margin " << margin << ")";
                record_violation(msg.str());
            }

            const double dm = dh_dm(f, m);
            if (m > 4) {
                s.min_dh_dm_value = std::min(s.min_dh_dm_value, dm);
                if (!(dm > 0.0)) {
                    std::ostringstream msg;
                    msg << "dh/dm <= 0 at F=" << f << " m=" << m << " (" << dm << ")";
                    record_violation(msg.str());
                }
            }
            if (!(dm >= p_poly(f) - 1e-12)) {
                std::ostringstream msg;
                msg << "dh/dm < p at F=" << f << " m=" << m;
                record_violation(msg.str());
            }

            if (m < m_max) {
                const double gap = h_poly(f, m + 1) - h;
                s.min_monotonicity_gap = std::min(s.min_monotonicity_gap, gap);
                if (!(gap > 0.0)) {
                    std::ostringstream msg;
                    msg << "h not increasing in m at F=" << f << " m=" << m;
                    record_violation(msg.str());
                }
            }
        }
    }

    // Exact certification at the closed-form minimizers: the grid guards
    // against transcription errors, the critical points certify positivity
    // between grid nodes.
    for (int m = 4; m <= m_max; ++m) {
        const CriticalPoint cp = h_critical_point(m);
        if (cp.location > 0.0 && cp.location <= 1.0 && !(cp.value > 0.0)) {
            std::ostringstream msg;
            msg << "h minimum not positive at its critical point for m=" << m;
            record_violation(msg.str());
        }
    }
    s.h_minimum = h_critical_point(4);
    s.p_minimum = p_critical_point();
    if (!(s.p_minimum.value > 0.0)) {
        record_violation("p minimum not positive at its critical point");
    }

    // Negative controls: count (never assert) dominance failures below the
    // m >= 4 hypothesis.
    for (long k = 1; k <= steps; ++k) {
        const double f = static_cast<double>(k) * grid_step;
        if (refined_bound(2, f) <= linear_bound(2, f)) ++s.m2_dominance_failures;
        if (refined_bound(3, f) <= linear_bound(3, f)) ++s.m3_dominance_failures;
    }

    s.passed = (s.violations == 0);
    return s;
}

}  // namespace discrimlab
