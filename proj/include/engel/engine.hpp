#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "engel/bigint.hpp"
#include "engel/chain.hpp"
#include "engel/errors.hpp"
#include "engel/matrix.hpp"
#include "engel/rational.hpp"

namespace engel {

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;
inline constexpr std::size_t kDefaultTraceLimit = 100'000;

// Chip counts per state, indexed by the IntegerChain's dense order
// (transient states first, then absorbing).
using ChipConfig = std::vector<BigInt>;

struct Move {
    enum class Kind { Fire, AddChip };
    Kind kind;
    int state;  // dense transient index; the start state for AddChip

    friend bool operator==(const Move&, const Move&) = default;
};

// Ordered move list. Records beyond the limit are dropped but still counted;
// the counters in RunStats never depend on the stored records.
struct Trace {
    std::size_t limit = kDefaultTraceLimit;
    std::vector<Move> moves;
    std::uint64_t total_moves = 0;

    void push(Move m) {
        ++total_moves;
        if (moves.size() < limit) moves.push_back(m);
    }
    bool truncated() const { return total_moves > moves.size(); }
};

// Counters accumulated over a run: firings per transient state (chips moved
// out of j are fires[j] * r_j), chips absorbed per absorbing state, and the
// number of type-2 additions. All unbounded; cycle lengths can grow
// superpolynomially with chain size.
struct RunStats {
    std::vector<BigInt> fires;     // per transient dense index
    std::vector<BigInt> absorbed;  // per absorbing dense index (offset by transient_count)
    BigInt absorbed_total;         // v_u
    BigInt additions;              // m

    explicit RunStats(const IntegerChain& chain)
        : fires(chain.transient_count, BigInt(0)), absorbed(chain.absorbing_count, BigInt(0)) {}

    BigInt chips_out(const IntegerChain& chain, int transient_dense) const {
        return fires[transient_dense] * chain.quota[transient_dense];
    }

    BigInt total_moves() const {
        BigInt n = additions;
        for (const BigInt& f : fires) n += f;
        return n;
    }

    friend RunStats operator-(RunStats lhs, const RunStats& rhs) {
        for (std::size_t i = 0; i < lhs.fires.size(); ++i) lhs.fires[i] -= rhs.fires[i];
        for (std::size_t k = 0; k < lhs.absorbed.size(); ++k) lhs.absorbed[k] -= rhs.absorbed[k];
        lhs.absorbed_total -= rhs.absorbed_total;
        lhs.additions -= rhs.additions;
        return lhs;
    }
};

// Picks which fireable state to fire next. Receives the dense indices of all
// currently fireable transient states, ascending.
using Schedule = std::function<int(const std::vector<int>&)>;

// Default policy: lowest dense index first. The abelian property makes the
// choice irrelevant to the counts, so determinism wins for reproducible
// traces.
inline int lowest_first(const std::vector<int>& fireable) { return fireable.front(); }

// Move budget shared across one run; throws instead of hanging on an
// invalid chain.
struct Budget {
    std::uint64_t remaining = kDefaultBudget;

    void spend() {
        if (remaining == 0)
            throw BudgetExhaustedError("move budget exhausted (non-absorbing chain or budget too small)");
        --remaining;
    }
};

inline bool can_fire(const ChipConfig& config, const IntegerChain& chain, int i) {
    return config[i] >= chain.quota[i];
}

inline bool any_fireable(const ChipConfig& config, const IntegerChain& chain) {
    for (int i = 0; i < chain.transient_count; ++i)
        if (can_fire(config, chain, i)) return true;
    return false;
}

// The critical loading for start state u: r_u chips on u, r_i - 1 elsewhere
// on the transient states, none on the absorbing states.
inline ChipConfig critical_loading(const IntegerChain& chain, int u) {
    if (u < 0 || u >= chain.transient_count)
        throw IllegalMoveError("critical_loading: start state must be transient");
    ChipConfig config(chain.states(), BigInt(0));
    for (int i = 0; i < chain.transient_count; ++i) config[i] = chain.quota[i] - 1;
    config[u] = chain.quota[u];
    return config;
}

namespace detail {

inline void apply_fire(ChipConfig& config, const IntegerChain& chain, int i, RunStats* stats,
                       Trace* trace) {
    config[i] -= chain.quota[i];
    for (const auto& [to, chips] : chain.targets[i]) {
        config[to] += chips;
        if (stats && !chain.is_transient(to)) {
            stats->absorbed[to - chain.transient_count] += chips;
            stats->absorbed_total += chips;
        }
    }
    if (stats) ++stats->fires[i];
    if (trace) trace->push({Move::Kind::Fire, i});
}

inline void apply_add(ChipConfig& config, int u, RunStats* stats, Trace* trace) {
    ++config[u];
    if (stats) ++stats->additions;
    if (trace) trace->push({Move::Kind::AddChip, u});
}

}  // namespace detail

// Type 1 move: take r_i chips off state i and send r_ij to each target j.
// Pure form; the engine loop uses the in-place helpers above.
inline ChipConfig fire(ChipConfig config, const IntegerChain& chain, int i) {
    if (i < 0 || i >= chain.transient_count)
        throw IllegalMoveError("fire: state is not transient");
    if (!can_fire(config, chain, i))
        throw IllegalMoveError("fire: state " + std::to_string(chain.label_of(i)) +
                               " holds fewer than r_i chips");
    detail::apply_fire(config, chain, i, nullptr, nullptr);
    return config;
}

// Type 2 move: add one chip to the start state. Legal only when no type 1
// move exists anywhere.
inline ChipConfig add_chip(ChipConfig config, const IntegerChain& chain, int u) {
    if (u < 0 || u >= chain.transient_count)
        throw IllegalMoveError("add_chip: start state must be transient");
    if (any_fireable(config, chain))
        throw IllegalMoveError("add_chip: a type 1 move is still possible");
    detail::apply_add(config, u, nullptr, nullptr);
    return config;
}

// Makes type 1 moves until no transient state can fire, consulting the
// schedule whenever more than one state is fireable. Returns the firing
// counts of this call alone.
inline std::vector<BigInt> quiesce(ChipConfig& config, const IntegerChain& chain,
                                   const Schedule& schedule, Budget& budget,
                                   RunStats* stats = nullptr, Trace* trace = nullptr) {
    std::vector<BigInt> counts(chain.transient_count, BigInt(0));
    std::vector<int> fireable;
    for (;;) {
        fireable.clear();
        for (int i = 0; i < chain.transient_count; ++i)
            if (can_fire(config, chain, i)) fireable.push_back(i);
        if (fireable.empty()) return counts;
        const int pick = schedule(fireable);
        budget.spend();
        detail::apply_fire(config, chain, pick, stats, trace);
        ++counts[pick];
    }
}

struct RunResult {
    RunStats stats;
    Trace trace;
    ChipConfig final_config;
};

// One full cycle of Engel's algorithm from the critical loading: quiesce,
// refill u to r_u with type 2 moves, stop when the transient configuration is
// the critical loading again (the recurrence theorem guarantees it will be).
// The check is skipped before any move has been made, since the starting
// configuration trivially satisfies it.
inline RunResult run_engel(const IntegerChain& chain, int u,
                           std::uint64_t budget_moves = kDefaultBudget,
                           const Schedule& schedule = lowest_first,
                           std::size_t trace_limit = kDefaultTraceLimit) {
    ChipConfig config = critical_loading(chain, u);
    RunStats stats(chain);
    Trace trace;
    trace.limit = trace_limit;
    Budget budget{budget_moves};

    const ChipConfig critical = config;
    auto at_critical = [&] {
        for (int i = 0; i < chain.transient_count; ++i)
            if (config[i] != critical[i]) return false;
        return true;
    };

    for (;;) {
        quiesce(config, chain, schedule, budget, &stats, &trace);
        while (config[u] < chain.quota[u]) {
            budget.spend();
            detail::apply_add(config, u, &stats, &trace);
        }
        if (at_critical()) break;
    }
    return {std::move(stats), std::move(trace), std::move(config)};
}

// N_uj = w_uj / v_u over the transient states and B_uk = v_uk / v_u over the
// absorbing states, from one completed cycle.
inline std::pair<std::vector<Rational>, std::vector<Rational>> stats_to_row(
    const RunStats& stats, const IntegerChain& chain) {
    if (sgn(stats.absorbed_total) == 0)
        throw std::domain_error("stats_to_row: cycle absorbed no chips");
    std::vector<Rational> n_row;
    std::vector<Rational> b_row;
    n_row.reserve(chain.transient_count);
    b_row.reserve(chain.absorbing_count);
    for (int j = 0; j < chain.transient_count; ++j)
        n_row.emplace_back(stats.chips_out(chain, j), stats.absorbed_total);
    for (int k = 0; k < chain.absorbing_count; ++k)
        b_row.emplace_back(stats.absorbed[k], stats.absorbed_total);
    return {std::move(n_row), std::move(b_row)};
}

struct SolveResult {
    RationalMatrix n;            // transient x transient
    RationalMatrix b;            // transient x absorbing
    std::vector<RunStats> runs;  // one per transient start state, dense order
};

// Runs Engel's algorithm once per transient start state and assembles the
// full N and B matrices.
inline SolveResult solve_all(const IntegerChain& chain, std::uint64_t budget_moves = kDefaultBudget,
                             const Schedule& schedule = lowest_first) {
    SolveResult out{RationalMatrix(chain.transient_count, chain.transient_count),
                    RationalMatrix(chain.transient_count, chain.absorbing_count),
                    {}};
    out.runs.reserve(chain.transient_count);
    for (int u = 0; u < chain.transient_count; ++u) {
        RunResult run = [&] {
            try {
                return run_engel(chain, u, budget_moves, schedule, /*trace_limit=*/0);
            } catch (const BudgetExhaustedError& e) {
                throw BudgetExhaustedError(std::string(e.what()) + " (start state " +
                                           std::to_string(chain.label_of(u)) + ")");
            }
        }();
        auto [n_row, b_row] = stats_to_row(run.stats, chain);
        for (int j = 0; j < chain.transient_count; ++j) out.n.at(u, j) = n_row[j];
        for (int k = 0; k < chain.absorbing_count; ++k) out.b.at(u, k) = b_row[k];
        out.runs.push_back(std::move(run.stats));
    }
    return out;
}

// Renders a run in the layout of a hand-worked table: one header row of state
// labels, one row per configuration, and a move column ("1_i" for firing
// state i, "2" for adding a chip); the final row carries no move. The moves
// are replayed from the given initial configuration, so the text is
// byte-stable for a fixed schedule.
inline std::string render_trace(const IntegerChain& chain, const ChipConfig& initial,
                                const Trace& trace) {
    const int s = chain.states();
    std::vector<std::vector<std::string>> rows;  // config cells per row
    std::vector<std::string> move_cells;

    ChipConfig config = initial;
    auto snapshot = [&] {
        std::vector<std::string> cells(s);
        for (int i = 0; i < s; ++i) cells[i] = config[i].get_str();
        rows.push_back(std::move(cells));
    };
    snapshot();
    for (const Move& m : trace.moves) {
        if (m.kind == Move::Kind::Fire) {
            detail::apply_fire(config, chain, m.state, nullptr, nullptr);
            move_cells.push_back("1_" + std::to_string(chain.label_of(m.state)));
        } else {
            detail::apply_add(config, m.state, nullptr, nullptr);
            move_cells.push_back("2");
        }
        snapshot();
    }
    move_cells.emplace_back();  // final row

    // Column order follows the state labels ascending, as a reader would
    // write them, not the dense engine order.
    std::vector<int> by_label(s);
    std::iota(by_label.begin(), by_label.end(), 0);
    std::sort(by_label.begin(), by_label.end(),
              [&](int a, int b) { return chain.label_of(a) < chain.label_of(b); });

    std::vector<std::size_t> width(s);
    std::vector<std::string> header(s);
    for (int c = 0; c < s; ++c) {
        header[c] = std::to_string(chain.label_of(by_label[c]));
        width[c] = header[c].size();
        for (const auto& row : rows) width[c] = std::max(width[c], row[by_label[c]].size());
    }
    const std::string label0 = "State";
    std::size_t lead = label0.size();

    std::ostringstream os;
    auto pad_left = [](const std::string& text, std::size_t w) {
        return std::string(w - text.size(), ' ') + text;
    };
    auto emit = [&](const std::string& rowlabel, const std::vector<std::string>& cells,
                    const std::string& move) {
        os << rowlabel << std::string(lead - rowlabel.size(), ' ');
        for (int c = 0; c < s; ++c) os << "  " << pad_left(cells[c], width[c]);
        if (!move.empty()) os << "  " << move;
        os << '\n';
    };

    emit(label0, header, "Move");
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<std::string> cells(s);
        for (int c = 0; c < s; ++c) cells[c] = rows[r][by_label[c]];
        std::string rowlabel;
        if (r == 0) rowlabel = "Start";
        if (r + 1 == rows.size()) rowlabel = "Final";
        emit(rowlabel, cells, move_cells[r]);
    }
    if (trace.truncated())
        os << "(" << (trace.total_moves - trace.moves.size()) << " further moves not recorded)\n";
    return os.str();
}

}  // namespace engel
