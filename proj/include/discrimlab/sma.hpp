// sma.hpp
// Sequential measurement of projectors onto the candidate states: measure
// Pi_1, Pi_2, ... in order, stop at the first success, guess uniformly at
// random if every round fails. Provides the exact operator family
// M_1..M_{m+1}, exact outcome distributions, the worst-case success
// probability, its correct-at-own-step / survived-all split, and a
// trajectory-level Monte Carlo sampler.

#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "discrimlab/ensemble.hpp"
#include "discrimlab/numerics.hpp"

namespace discrimlab {

// Kraus operators L_t = Pi_t (I-Pi_{t-1}) ... (I-Pi_1) for t <= m and
// L_{m+1} = (I-Pi_m) ... (I-Pi_1), with effects M_t = L_t^dagger L_t.
// The survived-all effect is realized as L^dagger L (the bare projector
// product is non-Hermitian in general); this symmetrization is what makes
// sum_t M_t = I an exact telescoping identity.
struct SequentialOperators {
    std::vector<Matrix> kraus;    // m+1 entries
    std::vector<Matrix> effects;  // m+1 entries, Hermitian PSD
};

enum class DistributionKind { exact, empirical };

// Outcome probabilities for one input state. Outcomes 1..m mean "round t
// fired"; outcome m+1 means every round failed. probs[t-1] holds outcome t.
// rejected_trajectories counts Monte Carlo trajectories discarded because a
// renormalization hit a numerically zero branch (always 0 for exact).
struct OutcomeDistribution {
    std::vector<double> probs;
    DistributionKind kind = DistributionKind::exact;
    long shots = 0;
    int input_index = 0;  // 1-based
    long rejected_trajectories = 0;
};

inline SequentialOperators build_sequential(const StateEnsemble& e) {
    validate_ensemble(e);
    const int m = e.m();
    SequentialOperators ops;
    ops.kraus.reserve(m + 1);
    ops.effects.reserve(m + 1);
    Matrix survived = Matrix::Identity(e.d, e.d);  // (I-Pi_{t-1})...(I-Pi_1)
    for (int t = 0; t < m; ++t) {
        const Matrix pi = e.states[t] * e.states[t].adjoint();
        Matrix l = pi * survived;
        Matrix effect = l.adjoint() * l;
        ops.kraus.push_back(std::move(l));
        ops.effects.push_back((effect + effect.adjoint()) / 2.0);
        survived = (Matrix::Identity(e.d, e.d) - pi) * survived;
    }
    Matrix tail = survived.adjoint() * survived;
    ops.kraus.push_back(std::move(survived));
    ops.effects.push_back((tail + tail.adjoint()) / 2.0);
    return ops;
}

namespace detail {

inline void check_input_index(const StateEnsemble& e, int k) {
    if (k < 1 || k > e.m()) {
        std::ostringstream msg;
        msg << "input index " << k << " out of range [1, " << e.m() << "]";
        throw std::out_of_range(msg.str());
    }
}

// <v|M|v> for Hermitian M; the imaginary part is rounding noise.
inline double expectation(const Matrix& m, const Vector& v) {
    return std::real(Complex(v.adjoint() * m * v));
}

// 53-bit uniform in [0,1), independent of library distribution internals.
inline double uniform53(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Exact outcome distribution for input state k (1-based):
// probs[t-1] = <v_k|M_t|v_k>.
inline OutcomeDistribution exact_distribution(const StateEnsemble& e, int k) {
    detail::check_input_index(e, k);
    const SequentialOperators ops = build_sequential(e);
    OutcomeDistribution dist;
    dist.kind = DistributionKind::exact;
    dist.input_index = k;
    dist.probs.reserve(e.m() + 1);
    for (const Matrix& effect : ops.effects) {
        dist.probs.push_back(detail::expectation(effect, e.states[k - 1]));
    }
    return dist;
}

// Correct-at-own-step and survived-all-then-guessed contributions for input k:
// good1 = <v_k|M_k|v_k>, good2 = (1/m) <v_k|M_{m+1}|v_k>. Their sum is the
// success probability for input k.
inline std::pair<double, double> good_decomposition(const StateEnsemble& e, int k) {
    detail::check_input_index(e, k);
    const SequentialOperators ops = build_sequential(e);
    const Vector& v = e.states[k - 1];
    const double good1 = detail::expectation(ops.effects[k - 1], v);
    const double good2 = detail::expectation(ops.effects[e.m()], v) / e.m();
    return {good1, good2};
}

// Worst-case success probability of the sequential procedure, including the
// uniform random fallback when all rounds fail:
// min over k of [ <v_k|M_k|v_k> + (1/m) <v_k|M_{m+1}|v_k> ].
inline double sm_success(const StateEnsemble& e) {
    validate_ensemble(e);
    const SequentialOperators ops = build_sequential(e);
    const int m = e.m();
    double worst = 2.0;
    for (int k = 0; k < m; ++k) {
        const Vector& v = e.states[k];
        const double p = detail::expectation(ops.effects[k], v) +
                         detail::expectation(ops.effects[m], v) / m;
        worst = std::min(worst, p);
    }
    return worst;
}

// Trajectory-level sampler for input state k: simulate the m projective
// rounds with state collapse. A round firing ends the trajectory at that
// outcome; otherwise the state is projected onto the complement and
// renormalized. When the surviving branch has squared norm below
// reject_threshold the trajectory is rejected and resampled (counted in
// rejected_trajectories). Each trajectory attempt draws its own RNG stream
// from (seed, attempt counter), so results are reproducible independent of
// scheduling or rejections.
inline OutcomeDistribution monte_carlo(const StateEnsemble& e, int k, long shots,
                                       std::uint64_t seed,
                                       double reject_threshold = 1e-14) {
    detail::check_input_index(e, k);
    if (shots < 1) throw std::invalid_argument("monte_carlo: shots must be >= 1");
    const int m = e.m();
    std::vector<long> counts(m + 1, 0);
    long rejected = 0;
    std::uint64_t attempt = 0;
    for (long accepted = 0; accepted < shots; ++attempt) {
        std::mt19937_64 engine(mix_seed(seed, attempt));
        Vector psi = e.states[k - 1];
        int outcome = m + 1;
        bool reject = false;
        for (int t = 0; t < m; ++t) {
            const Complex amp = e.states[t].dot(psi);
            const double fire_prob = std::norm(amp);
            if (detail::uniform53(engine) < fire_prob) {
                outcome = t + 1;
                break;
            }
            psi -= e.states[t] * amp;  // (I - Pi_t) |psi>
            const double survive_norm2 = psi.squaredNorm();
            if (survive_norm2 < reject_threshold) {
                reject = true;
                break;
            }
            psi /= std::sqrt(survive_norm2);
        }
        if (reject) {
            ++rejected;
            continue;
        }
        ++counts[outcome - 1];
        ++accepted;
    }
    OutcomeDistribution dist;
    dist.kind = DistributionKind::empirical;
    dist.shots = shots;
    dist.input_index = k;
    dist.rejected_trajectories = rejected;
    dist.probs.reserve(m + 1);
    for (long c : counts) {
        dist.probs.push_back(static_cast<double>(c) / static_cast<double>(shots));
    }
    return dist;
}

}  // namespace discrimlab
