#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "engel/chain.hpp"
#include "engel/engine.hpp"
#include "engel/generator.hpp"
#include "engel/matrix.hpp"
#include "engel/rng.hpp"

using engel::BigInt;
using engel::Budget;
using engel::ChipConfig;
using engel::IntegerChain;
using engel::Move;
using engel::Rational;
using engel::RunResult;
using engel::RunStats;
using engel::Xoshiro256pp;

namespace {

Rational rat(long n, long d) { return Rational(BigInt(n), BigInt(d)); }

IntegerChain drift() {
    return engel::integerize(engel::parse_chain(
        "states: 4\n"
        "absorbing: 0 3\n"
        "row 1: 0:1/3 2:2/3\n"
        "row 2: 1:1/3 3:2/3\n"));
}

IntegerChain symmetric() {
    return engel::integerize(engel::parse_chain(
        "states: 4\n"
        "absorbing: 0 3\n"
        "row 1: 0:1/2 2:1/2\n"
        "row 2: 1:1/2 3:1/2\n"));
}

IntegerChain lazy() {
    return engel::integerize(engel::parse_chain(
        "states: 4\n"
        "absorbing: 0 3\n"
        "row 1: 0:1/4 1:1/2 2:1/4\n"
        "row 2: 1:1/4 2:1/2 3:1/4\n"));
}

ChipConfig cfg(std::vector<long> v) {
    ChipConfig out;
    for (long x : v) out.emplace_back(x);
    return out;
}

}  // namespace

// Dense order everywhere below: transient states by ascending label, then
// absorbing states by ascending label. For the drift walk that is
// (state 1, state 2, state 0, state 3).

TEST_CASE("critical loading puts r_u on the start state") {
    const IntegerChain chain = drift();
    CHECK(engel::critical_loading(chain, 0) == cfg({3, 2, 0, 0}));
    CHECK(engel::critical_loading(chain, 1) == cfg({2, 3, 0, 0}));
    CHECK_THROWS_AS(engel::critical_loading(chain, 2), engel::IllegalMoveError);
    CHECK_THROWS_AS(engel::critical_loading(chain, -1), engel::IllegalMoveError);
}

TEST_CASE("fire moves one quota of chips") {
    const IntegerChain chain = drift();
    // label order (0,3,2,0) == dense (3,2,0,0); firing state 1 gives label
    // order (1,0,4,0) == dense (0,4,1,0)
    CHECK(engel::fire(cfg({3, 2, 0, 0}), chain, 0) == cfg({0, 4, 1, 0}));
    CHECK(engel::fire(cfg({4, 2, 1, 1}), chain, 0) == cfg({1, 4, 2, 1}));
    CHECK(engel::fire(cfg({1, 3, 0, 0}), chain, 1) == cfg({2, 0, 0, 2}));
    CHECK_THROWS_AS(engel::fire(cfg({2, 2, 0, 0}), chain, 0), engel::IllegalMoveError);
    CHECK_THROWS_AS(engel::fire(cfg({3, 2, 0, 0}), chain, 2), engel::IllegalMoveError);
}

TEST_CASE("fire returns self-loop chips to the fired state") {
    const IntegerChain chain = lazy();  // quotas are 4; half of each row loops back
    CHECK(chain.quota == std::vector<BigInt>{BigInt(4), BigInt(4)});
    // state 1 fires: 4 leave, 2 return, 1 to label 0, 1 to label 2.
    CHECK(engel::fire(cfg({4, 0, 0, 0}), chain, 0) == cfg({2, 1, 1, 0}));
}

TEST_CASE("add_chip is legal only when nothing can fire") {
    const IntegerChain chain = drift();
    CHECK(engel::add_chip(cfg({2, 2, 0, 0}), chain, 0) == cfg({3, 2, 0, 0}));
    CHECK_THROWS_AS(engel::add_chip(cfg({3, 2, 0, 0}), chain, 0), engel::IllegalMoveError);
    // A fireable state elsewhere also blocks the addition.
    CHECK_THROWS_AS(engel::add_chip(cfg({0, 3, 0, 0}), chain, 0), engel::IllegalMoveError);
    CHECK_THROWS_AS(engel::add_chip(cfg({0, 0, 0, 0}), chain, 2), engel::IllegalMoveError);
}

TEST_CASE("quiesce fires until no state holds its quota") {
    const IntegerChain chain = drift();
    ChipConfig config = cfg({3, 2, 0, 0});
    Budget budget{10};
    const std::vector<BigInt> counts = engel::quiesce(config, chain, engel::lowest_first, budget);
    CHECK(config == cfg({1, 1, 1, 2}));
    CHECK(counts == std::vector<BigInt>{BigInt(1), BigInt(1)});
    CHECK(budget.remaining == 8);

    // Already quiescent: nothing happens.
    ChipConfig still = cfg({1, 1, 1, 2});
    const std::vector<BigInt> none = engel::quiesce(still, chain, engel::lowest_first, budget);
    CHECK(still == cfg({1, 1, 1, 2}));
    CHECK(none == std::vector<BigInt>{BigInt(0), BigInt(0)});
    CHECK(budget.remaining == 8);
}

TEST_CASE("quiesce respects the budget") {
    const IntegerChain chain = drift();
    ChipConfig config = cfg({3, 2, 0, 0});
    Budget budget{1};
    CHECK_THROWS_AS(engel::quiesce(config, chain, engel::lowest_first, budget),
                    engel::BudgetExhaustedError);
}

TEST_CASE("one full run from state 1 of the drift walk") {
    const IntegerChain chain = drift();
    const RunResult run = engel::run_engel(chain, 0);

    CHECK(run.stats.fires == std::vector<BigInt>{BigInt(3), BigInt(2)});
    CHECK(run.stats.chips_out(chain, 0) == 9);
    CHECK(run.stats.chips_out(chain, 1) == 6);
    CHECK(run.stats.absorbed == std::vector<BigInt>{BigInt(3), BigInt(4)});
    CHECK(run.stats.absorbed_total == 7);
    CHECK(run.stats.additions == 7);
    CHECK(run.stats.total_moves() == 12);
    // label order (3,3,2,4) == dense (3,2,3,4)
    CHECK(run.final_config == cfg({3, 2, 3, 4}));

    const auto [n_row, b_row] = engel::stats_to_row(run.stats, chain);
    CHECK(n_row == std::vector<Rational>{rat(9, 7), rat(6, 7)});
    CHECK(b_row == std::vector<Rational>{rat(3, 7), rat(4, 7)});

    // The exact move order under the lowest-label-first schedule.
    using K = Move::Kind;
    const std::vector<Move> expected{
        {K::Fire, 0}, {K::Fire, 1}, {K::AddChip, 0}, {K::AddChip, 0},
        {K::Fire, 0}, {K::Fire, 1}, {K::AddChip, 0}, {K::AddChip, 0},
        {K::Fire, 0}, {K::AddChip, 0}, {K::AddChip, 0}, {K::AddChip, 0}};
    CHECK(run.trace.moves == expected);
    CHECK(run.trace.total_moves == 12);
    CHECK_FALSE(run.trace.truncated());
}

TEST_CASE("one full run from state 2 of the drift walk") {
    const IntegerChain chain = drift();
    const RunResult run = engel::run_engel(chain, 1);
    CHECK(run.stats.fires == std::vector<BigInt>{BigInt(1), BigInt(3)});
    CHECK(run.stats.absorbed == std::vector<BigInt>{BigInt(1), BigInt(6)});
    CHECK(run.stats.additions == 7);
    const auto [n_row, b_row] = engel::stats_to_row(run.stats, chain);
    CHECK(n_row == std::vector<Rational>{rat(3, 7), rat(9, 7)});
    CHECK(b_row == std::vector<Rational>{rat(1, 7), rat(6, 7)});
}

TEST_CASE("a single-transient chain closes in two moves") {
    const IntegerChain chain = engel::integerize(engel::parse_chain(
        "states: 2\n"
        "absorbing: 1\n"
        "row 0: 1:1\n"));
    const RunResult run = engel::run_engel(chain, 0);
    CHECK(run.stats.fires == std::vector<BigInt>{BigInt(1)});
    CHECK(run.stats.absorbed == std::vector<BigInt>{BigInt(1)});
    CHECK(run.stats.additions == 1);
    CHECK(run.stats.total_moves() == 2);
    const auto [n_row, b_row] = engel::stats_to_row(run.stats, chain);
    CHECK(n_row == std::vector<Rational>{Rational(1)});
    CHECK(b_row == std::vector<Rational>{Rational(1)});
}

TEST_CASE("run_engel respects the move budget") {
    const IntegerChain chain = drift();
    CHECK_THROWS_AS(engel::run_engel(chain, 0, 3), engel::BudgetExhaustedError);
    CHECK_NOTHROW(engel::run_engel(chain, 0, 12));
}

TEST_CASE("stats_to_row rejects a cycle that absorbed nothing") {
    const IntegerChain chain = drift();
    const RunStats empty(chain);
    CHECK_THROWS_AS(engel::stats_to_row(empty, chain), std::domain_error);
}

TEST_CASE("solve_all reproduces the worked matrices") {
    const IntegerChain chain = drift();
    const engel::SolveResult solved = engel::solve_all(chain);
    CHECK(solved.n.at(0, 0) == rat(9, 7));
    CHECK(solved.n.at(0, 1) == rat(6, 7));
    CHECK(solved.n.at(1, 0) == rat(3, 7));
    CHECK(solved.n.at(1, 1) == rat(9, 7));
    CHECK(solved.b.at(0, 0) == rat(3, 7));
    CHECK(solved.b.at(0, 1) == rat(4, 7));
    CHECK(solved.b.at(1, 0) == rat(1, 7));
    CHECK(solved.b.at(1, 1) == rat(6, 7));
    REQUIRE(solved.runs.size() == 2);
    CHECK(solved.runs[0].additions == 7);
    CHECK(solved.runs[1].additions == 7);
}

TEST_CASE("solve_all on the symmetric walk") {
    const engel::SolveResult solved = engel::solve_all(symmetric());
    CHECK(solved.n.at(0, 0) == rat(4, 3));
    CHECK(solved.n.at(0, 1) == rat(2, 3));
    CHECK(solved.n.at(1, 0) == rat(2, 3));
    CHECK(solved.n.at(1, 1) == rat(4, 3));
    CHECK(solved.b.at(0, 0) == rat(2, 3));
    CHECK(solved.b.at(0, 1) == rat(1, 3));
    CHECK(solved.b.at(1, 0) == rat(1, 3));
    CHECK(solved.b.at(1, 1) == rat(2, 3));
}

TEST_CASE("solve_all matches the matrix inverse on random chains") {
    Xoshiro256pp rng(37);
    for (int trial = 0; trial < 25; ++trial) {
        const engel::ChainSpec spec = engel::random_chain(rng);
        const IntegerChain chain = engel::integerize(spec);
        const engel::CanonicalForm cf = engel::canonical_form(spec);
        const engel::SolveResult solved = engel::solve_all(chain);
        const engel::RationalMatrix n = engel::fundamental_matrix(cf.q);
        CHECK(solved.n == n);
        CHECK(solved.b == engel::absorption_matrix(n, cf.r));
    }
}

TEST_CASE("every completed cycle conserves chips") {
    Xoshiro256pp rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        const IntegerChain chain = engel::integerize(engel::random_chain(rng));
        for (int u = 0; u < chain.transient_count; ++u) {
            const RunStats stats = engel::run_engel(chain, u, engel::kDefaultBudget,
                                                    engel::lowest_first, 0)
                                       .stats;
            CHECK(stats.additions == stats.absorbed_total);  // m == v_u
        }
    }
}

TEST_CASE("cycle counts satisfy the flow balance equations") {
    // Over one cycle: chips out of j equal chips into j, with the addition
    // stream feeding u and the absorbing states draining.
    Xoshiro256pp rng(43);
    for (int trial = 0; trial < 15; ++trial) {
        const IntegerChain chain = engel::integerize(engel::random_chain(rng));
        for (int u = 0; u < chain.transient_count; ++u) {
            const RunStats stats = engel::run_engel(chain, u, engel::kDefaultBudget,
                                                    engel::lowest_first, 0)
                                       .stats;
            for (int j = 0; j < chain.transient_count; ++j) {
                Rational in;
                for (int k = 0; k < chain.transient_count; ++k)
                    in += Rational(stats.chips_out(chain, k)) * chain.prob(k, j);
                if (j == u) in += Rational(stats.additions);
                CHECK(Rational(stats.chips_out(chain, j)) == in);
            }
            for (int a = 0; a < chain.absorbing_count; ++a) {
                Rational in;
                for (int k = 0; k < chain.transient_count; ++k)
                    in += Rational(stats.chips_out(chain, k)) *
                          chain.prob(k, chain.transient_count + a);
                CHECK(Rational(stats.absorbed[a]) == in);
            }
        }
    }
}

TEST_CASE("the firing schedule never changes the counts") {
    const IntegerChain chain = lazy();
    auto highest_first = [](const std::vector<int>& fireable) { return fireable.back(); };
    for (int u = 0; u < chain.transient_count; ++u) {
        const RunStats low =
            engel::run_engel(chain, u, engel::kDefaultBudget, engel::lowest_first, 0).stats;
        const RunStats high =
            engel::run_engel(chain, u, engel::kDefaultBudget, highest_first, 0).stats;
        CHECK(low.fires == high.fires);
        CHECK(low.absorbed == high.absorbed);
        CHECK(low.additions == high.additions);
    }
}

TEST_CASE("trace records are capped but counted") {
    const IntegerChain chain = drift();
    const RunResult run = engel::run_engel(chain, 0, engel::kDefaultBudget, engel::lowest_first,
                                           /*trace_limit=*/5);
    CHECK(run.trace.moves.size() == 5);
    CHECK(run.trace.total_moves == 12);
    CHECK(run.trace.truncated());
    // Counters never depend on the stored records.
    CHECK(run.stats.total_moves() == 12);
}

TEST_CASE("render_trace reproduces the worked table byte for byte") {
    const IntegerChain chain = drift();
    const RunResult run = engel::run_engel(chain, 0);
    const std::string expected =
        "State  0  1  2  3  Move\n"
        "Start  0  3  2  0  1_1\n"
        "       1  0  4  0  1_2\n"
        "       1  1  1  2  2\n"
        "       1  2  1  2  2\n"
        "       1  3  1  2  1_1\n"
        "       2  0  3  2  1_2\n"
        "       2  1  0  4  2\n"
        "       2  2  0  4  2\n"
        "       2  3  0  4  1_1\n"
        "       3  0  2  4  2\n"
        "       3  1  2  4  2\n"
        "       3  2  2  4  2\n"
        "Final  3  3  2  4\n";
    CHECK(engel::render_trace(chain, engel::critical_loading(chain, 0), run.trace) == expected);
}

TEST_CASE("render_trace marks truncation") {
    const IntegerChain chain = drift();
    const RunResult run =
        engel::run_engel(chain, 0, engel::kDefaultBudget, engel::lowest_first, 5);
    const std::string text =
        engel::render_trace(chain, engel::critical_loading(chain, 0), run.trace);
    CHECK(text.find("(7 further moves not recorded)") != std::string::npos);
}
