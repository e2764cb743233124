#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "engel/bigint.hpp"
#include "engel/engine.hpp"
#include "engel/errors.hpp"
#include "engel/rng.hpp"

namespace engel {

// Order-free summary of a move list: firings per transient state plus the
// number of type-2 additions. The method A/B argument matches moves, not
// positions, so this is the comparison the theorem speaks about.
struct MoveMultiset {
    std::vector<BigInt> fires;  // per transient dense index
    BigInt additions;

    explicit MoveMultiset(const IntegerChain& chain)
        : fires(chain.transient_count, BigInt(0)) {}

    friend bool operator==(const MoveMultiset&, const MoveMultiset&) = default;
};

struct RepeatResult {
    ChipConfig recurrent;        // transient prefix only
    RunStats cycle_stats;        // accumulated strictly between the two occurrences
    std::size_t checkpoints;     // distinct checkpoints seen before the repeat
    std::uint64_t cycle_moves;   // moves in the repeated cycle
};

namespace detail {

inline ChipConfig transient_prefix(const ChipConfig& config, const IntegerChain& chain) {
    return ChipConfig(config.begin(), config.begin() + chain.transient_count);
}

}  // namespace detail

// Iterates the quiesce/refill loop from any loading at most the critical one,
// recording the configuration at every checkpoint (u just refilled to r_u,
// everything else quiescent). Only finitely many such configurations exist,
// so one must repeat; returns the first one seen twice together with the
// stats of the cycle between its two occurrences.
inline RepeatResult run_until_repeat(const IntegerChain& chain, int u, const ChipConfig& initial,
                                     std::uint64_t budget_moves = kDefaultBudget,
                                     const Schedule& schedule = lowest_first) {
    if (static_cast<int>(initial.size()) != chain.states())
        throw IllegalMoveError("run_until_repeat: configuration size mismatch");
    const ChipConfig critical = critical_loading(chain, u);
    for (int i = 0; i < chain.transient_count; ++i)
        if (initial[i] > critical[i])
            throw IllegalMoveError(
                "run_until_repeat: initial loading exceeds the critical loading at state " +
                std::to_string(chain.label_of(i)));
    for (int k = chain.transient_count; k < chain.states(); ++k)
        if (sgn(initial[k]) != 0)
            throw IllegalMoveError("run_until_repeat: chips on an absorbing state");

    ChipConfig config = initial;
    RunStats stats(chain);
    Budget budget{budget_moves};
    Trace* no_trace = nullptr;

    std::unordered_map<ChipConfig, std::size_t, BigIntVectorHash> seen;
    std::vector<RunStats> snapshots;
    std::vector<std::uint64_t> moves_at;

    auto checkpoint = [&](const ChipConfig& transient)
        -> std::optional<std::pair<std::size_t, std::size_t>> {
        auto [it, inserted] = seen.emplace(transient, snapshots.size());
        if (!inserted) return std::make_pair(it->second, snapshots.size());
        snapshots.push_back(stats);
        moves_at.push_back(budget_moves - budget.remaining);
        return std::nullopt;
    };

    // The initial loading counts as a checkpoint when it already has the
    // checkpoint shape; the critical loading itself is the canonical case.
    if (initial[u] == chain.quota[u]) checkpoint(detail::transient_prefix(initial, chain));

    for (;;) {
        quiesce(config, chain, schedule, budget, &stats, no_trace);
        while (config[u] < chain.quota[u]) {
            budget.spend();
            detail::apply_add(config, u, &stats, no_trace);
        }
        ChipConfig transient = detail::transient_prefix(config, chain);
        if (auto hit = checkpoint(transient)) {
            const std::size_t first = hit->first;
            return {std::move(transient), stats - snapshots[first], seen.size(),
                    (budget_moves - budget.remaining) - moves_at[first]};
        }
    }
}

// N/B row extracted from one cycle of a configuration known to recur. The
// correctness argument uses only the fact that the loading repeats, so the
// ratios must equal the critical-loading answers.
inline std::pair<std::vector<Rational>, std::vector<Rational>> stats_from_any_recurrent(
    const IntegerChain& chain, int u, const ChipConfig& recurrent_transient,
    std::uint64_t budget_moves = kDefaultBudget, const Schedule& schedule = lowest_first) {
    if (static_cast<int>(recurrent_transient.size()) != chain.transient_count)
        throw IllegalMoveError("stats_from_any_recurrent: expected a transient configuration");
    ChipConfig full(chain.states(), BigInt(0));
    for (int i = 0; i < chain.transient_count; ++i) full[i] = recurrent_transient[i];
    RepeatResult result = run_until_repeat(chain, u, full, budget_moves, schedule);
    if (result.recurrent != recurrent_transient)
        throw NotRecurrentError("configuration does not recur: the cycle closes elsewhere");
    return stats_to_row(result.cycle_stats, chain);
}

struct MethodResult {
    ChipConfig final_config;  // full dense configuration
    MoveMultiset moves;
    BigInt additions;  // m
};

// Method A: find a recurrent loading b with green chips, top it up to the
// critical loading with inert red chips, and replay one green-only cycle.
// The legality checks consult the green counts alone; the red filler never
// moves, so the final distribution is b + red = critical loading.
inline MethodResult method_A_run(const IntegerChain& chain, int u,
                                 std::uint64_t budget_moves = kDefaultBudget,
                                 const Schedule& schedule = lowest_first) {
    const ChipConfig zeros(chain.states(), BigInt(0));
    RepeatResult found = run_until_repeat(chain, u, zeros, budget_moves, schedule);

    const ChipConfig critical = critical_loading(chain, u);
    ChipConfig red(chain.states(), BigInt(0));
    for (int i = 0; i < chain.transient_count; ++i) {
        red[i] = critical[i] - found.recurrent[i];
        if (sgn(red[i]) < 0)
            throw IllegalMoveError("method A: recurrent loading exceeds the critical loading");
    }

    // Green replay: run the engine on the green counts only until b recurs.
    ChipConfig green(chain.states(), BigInt(0));
    for (int i = 0; i < chain.transient_count; ++i) green[i] = found.recurrent[i];
    MoveMultiset moves(chain);
    RunStats stats(chain);
    Budget budget{budget_moves};
    for (;;) {
        std::vector<BigInt> counts = quiesce(green, chain, schedule, budget, &stats, nullptr);
        for (int i = 0; i < chain.transient_count; ++i) moves.fires[i] += counts[i];
        while (green[u] < chain.quota[u]) {
            budget.spend();
            detail::apply_add(green, u, &stats, nullptr);
            ++moves.additions;
        }
        if (detail::transient_prefix(green, chain) == found.recurrent) break;
    }

    MethodResult out{ChipConfig(chain.states()), std::move(moves), stats.additions};
    for (int i = 0; i < chain.states(); ++i) out.final_config[i] = green[i] + red[i];
    return out;
}

// Method B: start from the critical loading and follow the plain Engel rules,
// halting immediately after the m-th type-2 move. The final configuration
// then has u back at its quota, so it is never quiescent; stopping on
// quiescence instead would contradict method A's critical-loading finish.
inline MethodResult method_B_run(const IntegerChain& chain, int u, const BigInt& m,
                                 std::uint64_t budget_moves = kDefaultBudget,
                                 const Schedule& schedule = lowest_first) {
    ChipConfig config = critical_loading(chain, u);
    MoveMultiset moves(chain);
    Budget budget{budget_moves};
    std::vector<int> fireable;
    while (moves.additions < m) {
        fireable.clear();
        for (int i = 0; i < chain.transient_count; ++i)
            if (can_fire(config, chain, i)) fireable.push_back(i);
        budget.spend();
        if (!fireable.empty()) {
            const int pick = schedule(fireable);
            detail::apply_fire(config, chain, pick, nullptr, nullptr);
            ++moves.fires[pick];
        } else {
            detail::apply_add(config, u, nullptr, nullptr);
            ++moves.additions;
        }
    }
    BigInt additions = moves.additions;
    return {std::move(config), std::move(moves), std::move(additions)};
}

// run_engel under a seeded random choice among the fireable states. By the
// abelian property the resulting counters match the default schedule exactly;
// only the move order may differ.
inline RunStats randomized_schedule_run(const IntegerChain& chain, int u, std::uint64_t seed,
                                        std::uint64_t budget_moves = kDefaultBudget) {
    auto rng = std::make_shared<Xoshiro256pp>(seed);
    Schedule random_pick = [rng](const std::vector<int>& fireable) {
        return fireable[static_cast<std::size_t>(
            rng->below(static_cast<std::uint64_t>(fireable.size())))];
    };
    return run_engel(chain, u, budget_moves, random_pick, /*trace_limit=*/0).stats;
}

}  // namespace engel
