#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "engel/chain.hpp"
#include "engel/engine.hpp"
#include "engel/matrix.hpp"
#include "engel/recurrence.hpp"
#include "engel/rng.hpp"

namespace engel {

struct VerifyOptions {
    int starts = 3;             // random sub-critical loadings per start state
    int seeds = 5;              // randomized firing schedules per start state
    std::uint64_t seed = 1;     // master seed for both of the above
    std::uint64_t budget = kDefaultBudget;
};

// One failed check, pinned to the chain, start state and seed that produced
// it so the run can be replayed.
struct VerifyIssue {
    std::string chain;
    std::string property;
    int start = -1;             // state label; -1 for chain-wide properties
    std::uint64_t seed = 0;
    bool seeded = false;
    std::string detail;
};

struct ChainVerification {
    std::string chain;
    int transient = 0;
    int absorbing = 0;
    long long checks = 0;
    std::vector<VerifyIssue> issues;

    bool ok() const { return issues.empty(); }
};

struct VerificationReport {
    VerifyOptions options;
    std::vector<ChainVerification> chains;

    bool ok() const {
        for (const ChainVerification& cv : chains)
            if (!cv.ok()) return false;
        return true;
    }
    long long checks() const {
        long long n = 0;
        for (const ChainVerification& cv : chains) n += cv.checks;
        return n;
    }
    long long failures() const {
        long long n = 0;
        for (const ChainVerification& cv : chains) n += static_cast<long long>(cv.issues.size());
        return n;
    }

    std::string text() const {
        std::ostringstream os;
        for (const ChainVerification& cv : chains) {
            os << cv.chain << ": " << cv.transient << " transient + " << cv.absorbing
               << " absorbing, " << cv.checks << " checks, ";
            if (cv.ok())
                os << "ok\n";
            else
                os << cv.issues.size() << " FAILED\n";
            for (const VerifyIssue& issue : cv.issues) {
                os << "  [" << issue.property << "]";
                if (issue.start >= 0) os << " start " << issue.start;
                if (issue.seeded) os << " seed " << issue.seed;
                os << ": " << issue.detail << '\n';
            }
        }
        os << (ok() ? "PASS" : "FAIL") << ": " << chains.size()
           << (chains.size() == 1 ? " chain, " : " chains, ") << checks() << " checks, "
           << failures() << (failures() == 1 ? " failure\n" : " failures\n");
        return os.str();
    }
};

namespace detail {

inline std::vector<Rational> matrix_row(const RationalMatrix& m, std::size_t r) {
    std::vector<Rational> out;
    out.reserve(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) out.push_back(m.at(r, j));
    return out;
}

inline std::string join_rationals(const std::vector<Rational>& values) {
    std::string out = "(";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += values[i].str();
    }
    return out + ")";
}

inline std::string join_bigints(const std::vector<BigInt>& values) {
    std::string out = "(";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += values[i].get_str();
    }
    return out + ")";
}

}  // namespace detail

// Checks every property the recurrence theorem promises on one chain:
//
//   inverse-exact          (I - Q) N == I and B rows sum to 1
//   abacus-matches-inverse chip counts reproduce N and B entry for entry
//   critical-recurrent     the critical loading is the checkpoint that repeats
//   cycle-counts-match     one cycle's ratios equal the N and B rows
//   chip-conservation      chips added == chips absorbed over a cycle
//   checkpoint-bound       distinct checkpoints <= prod of the other quotas
//   start-independent      any sub-critical loading yields the same ratios
//   methods-agree          replaying a recurrent cycle == counting additions
//   schedule-invariant     firing order never changes the counters
//
// Throws BudgetExhaustedError if any run outlives opt.budget.
inline ChainVerification verify_chain(const std::string& name, const ChainSpec& spec,
                                      const VerifyOptions& opt = {}) {
    require_absorbing(spec);
    const IntegerChain chain = integerize(spec);
    const CanonicalForm canon = canonical_form(spec);

    ChainVerification out;
    out.chain = name;
    out.transient = chain.transient_count;
    out.absorbing = chain.absorbing_count;

    auto check = [&out, &name](bool okay, const char* property, int start_label,
                               std::optional<std::uint64_t> seed, auto&& detail) {
        ++out.checks;
        if (!okay)
            out.issues.push_back(
                {name, property, start_label, seed.value_or(0), seed.has_value(), detail()});
    };

    const std::size_t t = canon.q.rows();
    const RationalMatrix n = fundamental_matrix(canon.q);
    const RationalMatrix b = absorption_matrix(n, canon.r);

    const RationalMatrix identity = RationalMatrix::identity(t);
    check((identity - canon.q) * n == identity, "inverse-exact", -1, std::nullopt,
          [] { return std::string("(I - Q) N differs from I"); });
    for (std::size_t i = 0; i < t; ++i) {
        check(b.row_sum(i) == Rational(1), "inverse-exact", canon.transient_labels[i],
              std::nullopt, [&] { return "B row sums to " + b.row_sum(i).str() + ", expected 1"; });
        check(n.at(i, i) >= Rational(1), "inverse-exact", canon.transient_labels[i], std::nullopt,
              [&] { return "N diagonal entry " + n.at(i, i).str() + " < 1"; });
    }

    const SolveResult solved = solve_all(chain, opt.budget);
    check(solved.n == n && solved.b == b, "abacus-matches-inverse", -1, std::nullopt, [&] {
        for (std::size_t u = 0; u < t; ++u) {
            if (detail::matrix_row(solved.n, u) != detail::matrix_row(n, u) ||
                detail::matrix_row(solved.b, u) != detail::matrix_row(b, u))
                return "row for start " + std::to_string(canon.transient_labels[u]) + ": chips say N " +
                       detail::join_rationals(detail::matrix_row(solved.n, u)) + " B " +
                       detail::join_rationals(detail::matrix_row(solved.b, u)) + ", inverse says N " +
                       detail::join_rationals(detail::matrix_row(n, u)) + " B " +
                       detail::join_rationals(detail::matrix_row(b, u));
        }
        return std::string("matrices differ");
    });

    SplitMix64 stream{opt.seed};
    for (int u = 0; u < chain.transient_count; ++u) {
        const int label = chain.label_of(u);
        const std::vector<Rational> expect_n = detail::matrix_row(n, static_cast<std::size_t>(u));
        const std::vector<Rational> expect_b = detail::matrix_row(b, static_cast<std::size_t>(u));
        const ChipConfig critical = critical_loading(chain, u);
        const ChipConfig critical_transient = detail::transient_prefix(critical, chain);

        BigInt bound = 1;
        for (int i = 0; i < chain.transient_count; ++i)
            if (i != u) bound *= chain.quota[i];

        auto check_cycle = [&](const RepeatResult& rr, std::optional<std::uint64_t> seed) {
            auto [cycle_n, cycle_b] = stats_to_row(rr.cycle_stats, chain);
            check(cycle_n == expect_n && cycle_b == expect_b,
                  seed ? "start-independent" : "cycle-counts-match", label, seed, [&] {
                      return "cycle gives N " + detail::join_rationals(cycle_n) + " B " +
                             detail::join_rationals(cycle_b) + ", expected N " +
                             detail::join_rationals(expect_n) + " B " +
                             detail::join_rationals(expect_b);
                  });
            check(rr.cycle_stats.additions == rr.cycle_stats.absorbed_total, "chip-conservation",
                  label, seed, [&] {
                      return "cycle added " + rr.cycle_stats.additions.get_str() +
                             " chips but absorbed " + rr.cycle_stats.absorbed_total.get_str();
                  });
            check(BigInt(rr.checkpoints) <= bound, "checkpoint-bound", label, seed, [&] {
                  return std::to_string(rr.checkpoints) + " checkpoints exceed the bound " +
                         bound.get_str();
            });
        };

        const RepeatResult at_critical = run_until_repeat(chain, u, critical, opt.budget);
        check(at_critical.recurrent == critical_transient, "critical-recurrent", label,
              std::nullopt, [&] {
                  return "loading " + detail::join_bigints(critical_transient) +
                         " leads back to " + detail::join_bigints(at_critical.recurrent);
              });
        check_cycle(at_critical, std::nullopt);

        const MethodResult via_replay = method_A_run(chain, u, opt.budget);
        const MethodResult via_count = method_B_run(chain, u, via_replay.additions, opt.budget);
        check(via_replay.final_config == via_count.final_config, "methods-agree", label,
              std::nullopt, [&] {
                  return "replay finishes at " + detail::join_bigints(via_replay.final_config) +
                         ", counting finishes at " + detail::join_bigints(via_count.final_config);
              });
        check(via_replay.moves == via_count.moves, "methods-agree", label, std::nullopt, [&] {
            return "replay fires " + detail::join_bigints(via_replay.moves.fires) + " add " +
                   via_replay.moves.additions.get_str() + ", counting fires " +
                   detail::join_bigints(via_count.moves.fires) + " add " +
                   via_count.moves.additions.get_str();
        });
        check(detail::transient_prefix(via_count.final_config, chain) == critical_transient,
              "methods-agree", label, std::nullopt, [&] {
                  return "counting run does not finish at the critical loading: " +
                         detail::join_bigints(via_count.final_config);
              });

        for (int trial = 0; trial < opt.starts; ++trial) {
            const std::uint64_t sub_seed = stream.next();
            Xoshiro256pp rng(sub_seed);
            ChipConfig init(chain.states(), BigInt(0));
            for (int i = 0; i < chain.transient_count; ++i)
                init[i] = rng.below(BigInt(critical[i] + 1));
            check_cycle(run_until_repeat(chain, u, init, opt.budget), sub_seed);
        }

        const RunStats& base = solved.runs[u];
        for (int trial = 0; trial < opt.seeds; ++trial) {
            const std::uint64_t sub_seed = stream.next();
            const RunStats shuffled = randomized_schedule_run(chain, u, sub_seed, opt.budget);
            check(shuffled.fires == base.fires && shuffled.absorbed == base.absorbed &&
                      shuffled.additions == base.additions,
                  "schedule-invariant", label, sub_seed, [&] {
                      return "shuffled schedule fires " + detail::join_bigints(shuffled.fires) +
                             " add " + shuffled.additions.get_str() + ", default fires " +
                             detail::join_bigints(base.fires) + " add " + base.additions.get_str();
                  });
        }
    }
    return out;
}

// Sweeps the full property list over several chains; each chain gets its own
// deterministic sub-seed so a failure replays in isolation.
inline VerificationReport verify_chains(
    const std::vector<std::pair<std::string, ChainSpec>>& specs, const VerifyOptions& opt = {}) {
    VerificationReport report;
    report.options = opt;
    SplitMix64 stream{opt.seed};
    for (const auto& [name, spec] : specs) {
        VerifyOptions per = opt;
        per.seed = stream.next();
        report.chains.push_back(verify_chain(name, spec, per));
    }
    return report;
}

}  // namespace engel
