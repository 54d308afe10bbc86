// Tests for the sequential measurement: operator family and telescoping
// completeness, exact distributions against hand-derived oracles, worst-case
// success, the good1/good2 split, and the Monte Carlo sampler.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "discrimlab/ensemble.hpp"
#include "discrimlab/sma.hpp"

using namespace discrimlab;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

StateEnsemble orthonormal_ensemble(int d, int m) {
    StateEnsemble e;
    e.d = d;
    for (int i = 0; i < m; ++i) {
        Vector v = Vector::Zero(d);
        v(i) = 1.0;
        e.states.push_back(v);
    }
    return e;
}

StateEnsemble pair_with_overlap(double c, int d = 2) {
    StateEnsemble e;
    e.d = d;
    Vector v1 = Vector::Zero(d), v2 = Vector::Zero(d);
    v1(0) = 1.0;
    v2(0) = c;
    v2(1) = std::sqrt(1.0 - c * c);
    e.states = {v1, v2};
    return e;
}

// Independent construction of the effects: multiply the full Kraus chain
// L_t = Pi_t (I - Pi_{t-1}) ... (I - Pi_1) from scratch for each t, rather
// than reusing an accumulated product.
std::vector<Matrix> effects_by_direct_products(const StateEnsemble& e) {
    const int m = e.m();
    const Matrix id = Matrix::Identity(e.d, e.d);
    std::vector<Matrix> effects;
    for (int t = 0; t <= m; ++t) {
        Matrix l = id;
        for (int j = 0; j < std::min(t + 1, m); ++j) {
            const Matrix pi = e.states[j] * e.states[j].adjoint();
            if (j == t) {
                l = pi * l;
            } else if (j < t || t == m) {
                l = (id - pi) * l;
            }
        }
        effects.push_back(l.adjoint() * l);
    }
    return effects;
}

}  // namespace

TEST_CASE("orthonormal pair gives commuting projector effects") {
    const StateEnsemble e = orthonormal_ensemble(3, 2);
    const SequentialOperators ops = build_sequential(e);
    const Matrix pi1 = e.states[0] * e.states[0].adjoint();
    const Matrix pi2 = e.states[1] * e.states[1].adjoint();
    REQUIRE(max_abs(ops.effects[0] - pi1) < 1e-12);
    REQUIRE(max_abs(ops.effects[1] - pi2) < 1e-12);
    REQUIRE(max_abs(ops.effects[2] - (Matrix::Identity(3, 3) - pi1 - pi2)) < 1e-12);
}

TEST_CASE("effects telescope to the identity on random ensembles") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const StateEnsemble e = haar_random(4, 4, seed);
        const SequentialOperators ops = build_sequential(e);
        Matrix sum = Matrix::Zero(4, 4);
        for (const Matrix& effect : ops.effects) sum += effect;
        REQUIRE(max_abs(sum - Matrix::Identity(4, 4)) < 1e-10);
        for (const Matrix& effect : ops.effects) {
            REQUIRE(is_psd(effect, 1e-9));
        }
    }
}

TEST_CASE("effects match the direct-product oracle, including the tail trace") {
    const double c = 0.6;
    const StateEnsemble e = pair_with_overlap(c, 4);
    const SequentialOperators ops = build_sequential(e);
    const std::vector<Matrix> oracle = effects_by_direct_products(e);
    REQUIRE(ops.effects.size() == oracle.size());
    for (std::size_t t = 0; t < oracle.size(); ++t) {
        REQUIRE(max_abs(ops.effects[t] - oracle[t]) < 1e-12);
    }
    // For two states with real overlap c in dimension d, the survived-all
    // effect acts as the identity off the pair's plane plus a c^2-weighted
    // rank-one piece inside it: trace d - 2 + c^2.
    REQUIRE(std::real(ops.effects[2].trace()) ==
            Catch::Approx(4.0 - 2.0 + c * c).margin(1e-12));
}

TEST_CASE("exact distribution for an orthonormal input is a point mass") {
    const OutcomeDistribution dist = exact_distribution(orthonormal_ensemble(3, 3), 1);
    REQUIRE(dist.probs[0] == Catch::Approx(1.0).margin(1e-12));
    for (std::size_t t = 1; t < dist.probs.size(); ++t) {
        REQUIRE(std::abs(dist.probs[t]) < 1e-12);
    }
}

TEST_CASE("exact distribution matches the hand-telescoped pair oracle") {
    // Input the second of two states with overlap c = 0.6: the first round
    // fires with c^2, the second with (1-c^2)^2, and the tail keeps c^2(1-c^2).
    const OutcomeDistribution dist = exact_distribution(pair_with_overlap(0.6), 2);
    REQUIRE(dist.probs.size() == 3);
    REQUIRE(dist.probs[0] == Catch::Approx(0.36).margin(1e-12));
    REQUIRE(dist.probs[1] == Catch::Approx(0.4096).margin(1e-12));
    REQUIRE(dist.probs[2] == Catch::Approx(0.2304).margin(1e-12));
    REQUIRE(dist.kind == DistributionKind::exact);
    REQUIRE(dist.input_index == 2);
}

TEST_CASE("exact distributions sum to one for every input") {
    const StateEnsemble e = haar_random(5, 4, 44);
    for (int k = 1; k <= 4; ++k) {
        const OutcomeDistribution dist = exact_distribution(e, k);
        const double total =
            std::accumulate(dist.probs.begin(), dist.probs.end(), 0.0);
        REQUIRE(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("completeness and sums survive any reordering of the states") {
    const StateEnsemble e = haar_random(4, 4, 71);
    StateEnsemble permuted = e;
    std::rotate(permuted.states.begin(), permuted.states.begin() + 1,
                permuted.states.end());
    const SequentialOperators ops = build_sequential(permuted);
    Matrix sum = Matrix::Zero(4, 4);
    for (const Matrix& effect : ops.effects) sum += effect;
    REQUIRE(max_abs(sum - Matrix::Identity(4, 4)) < 1e-10);
    for (int k = 1; k <= 4; ++k) {
        const OutcomeDistribution dist = exact_distribution(permuted, k);
        const double total =
            std::accumulate(dist.probs.begin(), dist.probs.end(), 0.0);
        REQUIRE(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("input index is validated") {
    const StateEnsemble e = pair_with_overlap(0.5);
    REQUIRE_THROWS_AS(exact_distribution(e, 0), std::out_of_range);
    REQUIRE_THROWS_AS(exact_distribution(e, 3), std::out_of_range);
    REQUIRE_THROWS_AS(good_decomposition(e, -1), std::out_of_range);
    REQUIRE_THROWS_AS(monte_carlo(e, 5, 10, 1), std::out_of_range);
    REQUIRE_THROWS_AS(monte_carlo(e, 1, 0, 1), std::invalid_argument);
}

TEST_CASE("worst-case success on oracles") {
    REQUIRE(sm_success(orthonormal_ensemble(4, 4)) ==
            Catch::Approx(1.0).margin(1e-12));
    // Input 1 always fires its own round; input 2 succeeds with
    // (1-c^2)^2 + c^2(1-c^2)/2 = 0.5248 at c = 0.6.
    REQUIRE(sm_success(pair_with_overlap(0.6)) ==
            Catch::Approx(0.5248).margin(1e-12));
}

TEST_CASE("good decomposition splits the success probability") {
    const auto [good1_ortho, good2_ortho] =
        good_decomposition(orthonormal_ensemble(3, 3), 1);
    REQUIRE(good1_ortho == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(std::abs(good2_ortho) < 1e-12);

    const auto [good1, good2] = good_decomposition(pair_with_overlap(0.6), 2);
    REQUIRE(good1 == Catch::Approx(0.4096).margin(1e-12));
    REQUIRE(good2 == Catch::Approx(0.1152).margin(1e-12));

    const StateEnsemble e = haar_random(4, 3, 88);
    for (int k = 1; k <= 3; ++k) {
        const auto [g1, g2] = good_decomposition(e, k);
        REQUIRE(g1 + g2 <= 1.0 + 1e-12);
        REQUIRE(g1 >= -1e-12);
        REQUIRE(g2 >= -1e-12);
    }
}

TEST_CASE("monte carlo puts all mass on the first outcome for orthonormal input") {
    const OutcomeDistribution dist =
        monte_carlo(orthonormal_ensemble(3, 3), 1, 2000, 7);
    REQUIRE(dist.probs[0] == 1.0);
    REQUIRE(dist.rejected_trajectories == 0);
    REQUIRE(dist.kind == DistributionKind::empirical);
    REQUIRE(dist.shots == 2000);
}

TEST_CASE("monte carlo is deterministic in the seed") {
    const StateEnsemble e = haar_random(4, 3, 5);
    const OutcomeDistribution a = monte_carlo(e, 2, 5000, 99);
    const OutcomeDistribution b = monte_carlo(e, 2, 5000, 99);
    REQUIRE(a.probs == b.probs);
    const OutcomeDistribution c = monte_carlo(e, 2, 5000, 100);
    REQUIRE(a.probs != c.probs);
}

TEST_CASE("monte carlo frequencies track the exact distribution") {
    // Fixed seeds; 3 binomial standard errors around the exact values.
    const long shots = 100000;
    {
        const StateEnsemble e = pair_with_overlap(0.6);
        const OutcomeDistribution exact = exact_distribution(e, 2);
        const OutcomeDistribution mc = monte_carlo(e, 2, shots, 424242);
        for (std::size_t t = 0; t < exact.probs.size(); ++t) {
            const double se =
                std::sqrt(exact.probs[t] * (1.0 - exact.probs[t]) / shots);
            REQUIRE(std::abs(mc.probs[t] - exact.probs[t]) <= 3.0 * se);
        }
    }
    {
        // Input 2, so the first round can fail and every outcome stays
        // strictly inside (0,1).
        const StateEnsemble e = haar_random(4, 3, 6);
        const OutcomeDistribution exact = exact_distribution(e, 2);
        const OutcomeDistribution mc = monte_carlo(e, 2, shots, 31337);
        for (std::size_t t = 0; t < exact.probs.size(); ++t) {
            const double p = std::clamp(exact.probs[t], 0.0, 1.0);
            const double se = std::sqrt(p * (1.0 - p) / shots);
            REQUIRE(std::abs(mc.probs[t] - p) <= std::max(3.0 * se, 1e-9));
        }
    }
}

TEST_CASE("trajectories hitting a tiny surviving branch are rejected and counted") {
    // With the threshold raised to 0.5, input 2 at c=0.6 rejects exactly the
    // trajectories that fail round 1 and then fail round 2 (surviving norm
    // c^2(1-c^2)/(1-c^2) = 0.36 < 0.5): about 23% of attempts.
    const StateEnsemble e = pair_with_overlap(0.6);
    const OutcomeDistribution dist = monte_carlo(e, 2, 20000, 11, 0.5);
    REQUIRE(dist.rejected_trajectories > 3000);
    // Accepted trajectories still form a distribution over the 3 outcomes,
    // with the tail outcome now unreachable.
    const double total =
        std::accumulate(dist.probs.begin(), dist.probs.end(), 0.0);
    REQUIRE(total == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(dist.probs[2] == 0.0);
    // The default threshold never rejects on a healthy ensemble.
    const OutcomeDistribution healthy = monte_carlo(e, 2, 20000, 11);
    REQUIRE(healthy.rejected_trajectories == 0);
}
