#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "engel/bigint.hpp"
#include "engel/chain.hpp"
#include "engel/errors.hpp"
#include "engel/rng.hpp"

namespace engel {

inline constexpr std::uint64_t kDefaultStepCap = 1'000'000;

// Seeded Monte Carlo tallies for one start state: mean visits per transient
// state and absorption frequency per absorbing state. A statistical
// cross-check of what N and B mean, never a computation path.
struct SimulationEstimate {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<BigInt> visits;           // total visits per transient dense index
    std::vector<std::uint64_t> absorbed;  // trials ended per absorbing dense index

    double visit_mean(int transient_dense) const {
        return Rational(visits[transient_dense], BigInt(trials)).to_double();
    }
    double absorption_freq(int absorbing_dense) const {
        return static_cast<double>(absorbed[absorbing_dense]) / static_cast<double>(trials);
    }
    // Standard error of a frequency estimate.
    double absorption_se(int absorbing_dense) const {
        const double p = absorption_freq(absorbing_dense);
        return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    }
};

// Simulates `trials` independent trajectories from u. Transitions are drawn
// exactly: a uniform integer in [0, r_i) selects the target through the
// cumulative chip counts r_ij, so no floating point enters the sampler.
// Reproducible for a fixed seed. A trajectory hitting the step cap is counted
// and reported as an error, since a validated absorbing chain absorbs almost
// surely.
inline SimulationEstimate monte_carlo_estimate(const IntegerChain& chain, int u,
                                               std::uint64_t trials, std::uint64_t seed,
                                               std::uint64_t step_cap = kDefaultStepCap) {
    if (u < 0 || u >= chain.transient_count)
        throw IllegalMoveError("monte_carlo_estimate: start state must be transient");
    if (trials == 0) throw std::invalid_argument("monte_carlo_estimate: trials must be >= 1");

    SimulationEstimate est;
    est.trials = trials;
    est.seed = seed;
    est.visits.assign(chain.transient_count, BigInt(0));
    est.absorbed.assign(chain.absorbing_count, 0);

    Xoshiro256pp rng(seed);
    std::uint64_t overruns = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        int state = u;
        std::uint64_t steps = 0;
        ++est.visits[state];  // the visit at time zero counts
        while (chain.is_transient(state)) {
            if (++steps > step_cap) {
                ++overruns;
                break;
            }
            const BigInt draw = rng.below(chain.quota[state]);
            BigInt cumulative = 0;
            int next = -1;
            for (const auto& [to, chips] : chain.targets[state]) {
                cumulative += chips;
                if (draw < cumulative) {
                    next = to;
                    break;
                }
            }
            state = next;
            if (chain.is_transient(state)) ++est.visits[state];
        }
        if (!chain.is_transient(state)) ++est.absorbed[state - chain.transient_count];
    }
    if (overruns > 0) throw TrialOverrunError(overruns, trials);
    return est;
}

}  // namespace engel
