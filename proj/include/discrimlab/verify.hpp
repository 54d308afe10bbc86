// verify.hpp
// Randomized property suite over Haar-random ensembles: POVM/sequential
// completeness and positivity, the closed-form bounds against exact success
// probabilities, the trace-identity chain, and the low-fidelity sequential
// bound. One engine shared by the CLI verify command and the acceptance
// runner; fully deterministic for a fixed seed and free of wall-clock output.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "discrimlab/bounds.hpp"
#include "discrimlab/ensemble.hpp"
#include "discrimlab/pgm.hpp"
#include "discrimlab/sma.hpp"

namespace discrimlab {

// Every inequality below is checked against this spec's single tolerance.
// Trials are drawn from two strata: linearly independent draws
// (d in [d_min, d_max], m <= min(m_max, d)) and, every fifth trial,
// rank-deficient draws (small d, m > d) so completeness is exercised where S
// loses rank. After the main trials, extra ensembles are drawn until
// low_overlap_min_accepted of them pass the low-fidelity filter (fidelity <= 0.1),
// checking only the sequential bound on those.
struct VerifySpec {
    long trials = 1000;
    int d_min = 2;
    int d_max = 16;
    int m_min = 2;
    int m_max = 8;
    std::uint64_t seed = 1;
    double tolerance = 1e-9;
    long low_overlap_min_accepted = 0;
};

struct VerifyFailure {
    std::string check;
    long trial = 0;
    int d = 0;
    int m = 0;
    double lhs = 0.0;  // the value that broke the check
    double rhs = 0.0;  // what it was compared against
    std::optional<StateEnsemble> ensemble;
};

struct VerifyReport {
    VerifySpec spec;
    long trials_run = 0;
    long independent_trials = 0;
    long rank_deficient_trials = 0;

    // Residuals and identity errors (want ~machine epsilon, fail above tol).
    double max_povm_completeness_residual = 0.0;
    double max_sma_completeness_residual = 0.0;
    double max_outcome_sum_residual = 0.0;
    double max_trb2_identity_err = 0.0;
    double max_trab_identity_err = 0.0;
    double min_povm_eigenvalue = std::numeric_limits<double>::infinity();
    double min_sma_eigenvalue = std::numeric_limits<double>::infinity();

    // Inequality margins (want >= -tol; positive means slack).
    double min_linear_margin = std::numeric_limits<double>::infinity();
    double min_refined_margin = std::numeric_limits<double>::infinity();
    long refined_applicable = 0;
    double min_tra2_margin = std::numeric_limits<double>::infinity();
    double min_cauchy_schwarz_margin = std::numeric_limits<double>::infinity();
    double min_seq_bound_margin = std::numeric_limits<double>::infinity();
    long seq_bound_applicable = 0;
    long low_overlap_extra_draws = 0;

    bool passed = true;
    std::optional<VerifyFailure> failure;
};

namespace detail {

// Uniform integer in [lo, hi] from the shared master engine.
inline int uniform_int(std::mt19937_64& engine, int lo, int hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<int>(engine() % static_cast<std::uint64_t>(hi - lo + 1));
}

struct VerifyContext {
    const VerifySpec& spec;
    VerifyReport& report;

    bool fail(const std::string& check, long trial, const StateEnsemble& e,
              double lhs, double rhs) {
        report.passed = false;
        report.failure = VerifyFailure{check, trial, e.d, e.m(), lhs, rhs, e};
        return false;
    }

    // Full property battery for one ensemble. Returns false on the first
    // violated check; the failure carries the ensemble as counterexample.
    bool check_ensemble(const StateEnsemble& e, long trial) {
        const double tol = spec.tolerance;
        const int m = e.m();

        const Povm povm = build_pgm(e);
        Matrix sum = Matrix::Zero(e.d, e.d);
        for (const Matrix& element : povm.elements) sum += element;
        const double povm_residual = (sum - povm.support).cwiseAbs().maxCoeff();
        report.max_povm_completeness_residual =
            std::max(report.max_povm_completeness_residual, povm_residual);
        if (povm_residual > tol) {
            return fail("povm-completeness", trial, e, povm_residual, tol);
        }
        for (const Matrix& element : povm.elements) {
            const double eig = min_eigenvalue(element);
            report.min_povm_eigenvalue = std::min(report.min_povm_eigenvalue, eig);
            if (eig < -tol) return fail("povm-psd", trial, e, eig, -tol);
        }

        const SequentialOperators ops = build_sequential(e);
        sum.setZero();
        for (const Matrix& effect : ops.effects) sum += effect;
        const double sma_residual =
            (sum - Matrix::Identity(e.d, e.d)).cwiseAbs().maxCoeff();
        report.max_sma_completeness_residual =
            std::max(report.max_sma_completeness_residual, sma_residual);
        if (sma_residual > tol) {
            return fail("sma-completeness", trial, e, sma_residual, tol);
        }
        for (const Matrix& effect : ops.effects) {
            const double eig = min_eigenvalue(effect);
            report.min_sma_eigenvalue = std::min(report.min_sma_eigenvalue, eig);
            if (eig < -tol) return fail("sma-psd", trial, e, eig, -tol);
        }
        for (int k = 0; k < m; ++k) {
            double total = 0.0;
            for (const Matrix& effect : ops.effects) {
                total += expectation(effect, e.states[k]);
            }
            const double residual = std::abs(total - 1.0);
            report.max_outcome_sum_residual =
                std::max(report.max_outcome_sum_residual, residual);
            if (residual > tol) {
                return fail("outcome-sum", trial, e, total, 1.0);
            }
        }

        const double overlap = max_pairwise_overlap(e);
        const double fidelity = overlap * overlap;
        const DiscriminationReport pgm = pgm_success(e);

        const double linear_margin = pgm.worst_case - linear_bound(m, overlap);
        report.min_linear_margin = std::min(report.min_linear_margin, linear_margin);
        if (linear_margin < -tol) {
            return fail("linear-bound", trial, e, pgm.worst_case, linear_bound(m, overlap));
        }
        if (union_term(m, overlap) >= 0.0) {
            ++report.refined_applicable;
            const double refined_margin = pgm.worst_case - refined_bound(m, overlap);
            report.min_refined_margin =
                std::min(report.min_refined_margin, refined_margin);
            if (refined_margin < -tol) {
                return fail("refined-bound", trial, e, pgm.worst_case,
                            refined_bound(m, overlap));
            }
        }

        const ProofDiagnostics diag = proof_diagnostics(e);
        for (int i = 0; i < m; ++i) {
            const double b_err = std::abs(diag.tr_b2[i] - pgm.per_state[i]);
            report.max_trb2_identity_err =
                std::max(report.max_trb2_identity_err, b_err);
            if (b_err > tol) {
                return fail("trace-identity-b", trial, e, diag.tr_b2[i],
                            pgm.per_state[i]);
            }
            const double own_step = expectation(ops.effects[i], e.states[i]);
            const double ab_err = std::abs(diag.tr_ab[i] - own_step);
            report.max_trab_identity_err =
                std::max(report.max_trab_identity_err, ab_err);
            if (ab_err > tol) {
                return fail("trace-identity-ab", trial, e, diag.tr_ab[i], own_step);
            }
            const double tra2_margin = (1.0 + m * fidelity) - diag.tr_a2[i];
            report.min_tra2_margin = std::min(report.min_tra2_margin, tra2_margin);
            if (tra2_margin < -tol) {
                return fail("trace-bound-a", trial, e, diag.tr_a2[i],
                            1.0 + m * fidelity);
            }
            const double cs_margin =
                std::sqrt(diag.tr_a2[i] * diag.tr_b2[i]) - diag.tr_ab[i];
            report.min_cauchy_schwarz_margin =
                std::min(report.min_cauchy_schwarz_margin, cs_margin);
            if (cs_margin < -tol) {
                return fail("cauchy-schwarz", trial, e, diag.tr_ab[i],
                            std::sqrt(diag.tr_a2[i] * diag.tr_b2[i]));
            }
        }

        if (fidelity <= 0.1) {
            if (!check_seq_bound(e, trial)) return false;
        }
        return true;
    }

    bool check_seq_bound(const StateEnsemble& e, long trial) {
        ++report.seq_bound_applicable;
        const double sm = sm_success(e);
        const double bound = seq_lower_bound(e);
        const double margin = sm - bound;
        report.min_seq_bound_margin = std::min(report.min_seq_bound_margin, margin);
        if (margin < -spec.tolerance) {
            return fail("seq-lower-bound", trial, e, sm, bound);
        }
        return true;
    }
};

}  // namespace detail

inline VerifyReport run_verification(const VerifySpec& spec) {
    if (spec.trials < 1) throw std::invalid_argument("verify: trials must be >= 1");
    if (spec.d_min < 2 || spec.d_max < spec.d_min) {
        throw std::invalid_argument("verify: need 2 <= d_min <= d_max");
    }
    if (spec.m_min < 2 || spec.m_max < spec.m_min) {
        throw std::invalid_argument("verify: need 2 <= m_min <= m_max");
    }
    if (!(spec.tolerance > 0.0)) {
        throw std::invalid_argument("verify: tolerance must be positive");
    }

    VerifyReport report;
    report.spec = spec;
    detail::VerifyContext ctx{spec, report};
    std::mt19937_64 master(splitmix64(spec.seed ^ 0x5eedfacecafe1234ULL));

    // Rank-deficient draws need some d with room for m > d.
    const int rd_d_max = std::min(4, spec.d_max);
    const bool rank_deficient_possible =
        (rd_d_max >= spec.d_min) && (spec.m_max > spec.d_min);

    for (long t = 0; t < spec.trials; ++t) {
        int d = 0;
        int m = 0;
        const bool want_rank_deficient = rank_deficient_possible && (t % 5 == 4);
        if (want_rank_deficient) {
            d = detail::uniform_int(master, spec.d_min, std::min(rd_d_max, spec.m_max - 1));
            m = detail::uniform_int(master, d + 1, spec.m_max);
            ++report.rank_deficient_trials;
        } else {
            d = detail::uniform_int(master, spec.d_min, spec.d_max);
            const int m_hi = std::max(spec.m_min, std::min(spec.m_max, d));
            m = detail::uniform_int(master, spec.m_min, m_hi);
            ++report.independent_trials;
        }
        const StateEnsemble e = haar_random(d, m, mix_seed(spec.seed, 1000003ULL + t));
        ++report.trials_run;
        if (!ctx.check_ensemble(e, t)) {
            return report;
        }
    }

    // Top up the low-fidelity pool if a minimum was requested: draw from the
    // independent stratum and keep only ensembles passing the filter.
    const long attempts_cap = std::max<long>(200 * spec.low_overlap_min_accepted, 50000);
    long attempt = 0;
    while (report.seq_bound_applicable < spec.low_overlap_min_accepted) {
        if (attempt >= attempts_cap) {
            report.passed = false;
            report.failure = VerifyFailure{"low-overlap-sampling-exhausted", attempt, 0, 0,
                                           static_cast<double>(report.seq_bound_applicable),
                                           static_cast<double>(spec.low_overlap_min_accepted),
                                           std::nullopt};
            return report;
        }
        const int d = detail::uniform_int(master, spec.d_min, spec.d_max);
        const int m_hi = std::max(spec.m_min, std::min(spec.m_max, d));
        const int m = detail::uniform_int(master, spec.m_min, m_hi);
        const StateEnsemble e =
            haar_random(d, m, mix_seed(spec.seed, 2000003ULL + attempt));
        ++attempt;
        ++report.low_overlap_extra_draws;
        if (max_pairwise_fidelity(e) > 0.1) continue;
        if (!ctx.check_seq_bound(e, spec.trials + attempt)) {
            return report;
        }
    }
    return report;
}

// Plain-text rendering; deterministic for a fixed seed (no timing, no paths).
inline std::string format_verify_report(const VerifyReport& r) {
    std::ostringstream out;
    out << "randomized verification\n";
    out << "  trials                  : " << r.trials_run << " (independent "
        << r.independent_trials << ", rank-deficient " << r.rank_deficient_trials
        << ")\n";
    out << "  seed                    : " << r.spec.seed << "\n";
    out << "  tolerance               : " << r.spec.tolerance << "\n";
    out << "  povm completeness       : max residual "
        << r.max_povm_completeness_residual << "\n";
    out << "  povm elements psd       : min eigenvalue " << r.min_povm_eigenvalue
        << "\n";
    out << "  sequential completeness : max residual "
        << r.max_sma_completeness_residual << "\n";
    out << "  sequential effects psd  : min eigenvalue " << r.min_sma_eigenvalue
        << "\n";
    out << "  outcome sums            : max |sum-1| " << r.max_outcome_sum_residual
        << "\n";
    out << "  linear bound            : min margin " << r.min_linear_margin << "\n";
    out << "  refined bound           : min margin " << r.min_refined_margin
        << " (applicable " << r.refined_applicable << ")\n";
    out << "  trace identity (B)      : max error " << r.max_trb2_identity_err
        << "\n";
    out << "  trace identity (AB)     : max error " << r.max_trab_identity_err
        << "\n";
    out << "  trace bound (A)         : min margin " << r.min_tra2_margin << "\n";
    out << "  cauchy-schwarz chain    : min margin " << r.min_cauchy_schwarz_margin
        << "\n";
    out << "  low-fidelity seq bound  : min margin " << r.min_seq_bound_margin
        << " (applicable " << r.seq_bound_applicable << ", extra draws "
        << r.low_overlap_extra_draws << ")\n";
    if (r.passed) {
        out << "  result                  : PASS\n";
    } else if (r.failure) {
        out << "  result                  : FAIL (" << r.failure->check << " at trial "
            << r.failure->trial << ", d=" << r.failure->d << ", m=" << r.failure->m
            << ", value " << r.failure->lhs << " vs " << r.failure->rhs << ")\n";
    } else {
        out << "  result                  : FAIL\n";
    }
    return out.str();
}

}  // namespace discrimlab
