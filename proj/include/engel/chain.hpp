#pragma once

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "engel/bigint.hpp"
#include "engel/errors.hpp"
#include "engel/matrix.hpp"
#include "engel/rational.hpp"

namespace engel {

// An absorbing Markov chain as written in a chain file: states 0..s-1, a set
// of absorbing labels, and one probability row per transient state. Rows hold
// only positive entries; zero-probability transitions are dropped on input.
struct ChainSpec {
    int state_count = 0;
    std::vector<int> absorbing;                    // ascending labels
    std::map<int, std::map<int, Rational>> rows;   // transient label -> target -> p > 0
    std::optional<int> start;

    bool is_absorbing(int label) const {
        return std::binary_search(absorbing.begin(), absorbing.end(), label);
    }

    std::vector<int> transient_labels() const {
        std::vector<int> out;
        for (int i = 0; i < state_count; ++i)
            if (!is_absorbing(i)) out.push_back(i);
        return out;
    }
};

// Integer form of the chain: each transient row scaled to its chip quota
// r_i = lcm of the row denominators, with r_ij chips per target. States are
// re-indexed densely, transient first, both groups in ascending label order.
struct IntegerChain {
    int transient_count = 0;
    int absorbing_count = 0;
    std::vector<int> labels;                                 // dense index -> label
    std::map<int, int> dense;                                // label -> dense index
    std::vector<BigInt> quota;                               // r_i per transient dense index
    std::vector<std::vector<std::pair<int, BigInt>>> targets;  // (dense target, r_ij), ascending

    int states() const { return transient_count + absorbing_count; }
    bool is_transient(int dense_index) const { return dense_index < transient_count; }
    int label_of(int dense_index) const { return labels[dense_index]; }
    int dense_of(int label) const { return dense.at(label); }

    // p_ij = r_ij / r_i; zero when no edge is stored.
    Rational prob(int from_dense, int to_dense) const {
        for (const auto& [to, chips] : targets[from_dense])
            if (to == to_dense) return Rational(chips, quota[from_dense]);
        return Rational();
    }
};

// Q and R blocks of the canonical form, with the state order they refer to.
struct CanonicalForm {
    RationalMatrix q;                 // transient x transient
    RationalMatrix r;                 // transient x absorbing
    std::vector<int> transient_labels;
    std::vector<int> absorbing_labels;
};

namespace detail {

// One whitespace-separated token and the 1-based column it starts at.
struct Token {
    std::string_view text;
    int col = 0;
};

inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t') {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        out.push_back({line.substr(i, j - i), static_cast<int>(i + 1)});
        i = j;
    }
    return out;
}

inline int parse_label(const Token& tok, int line_no, int state_count) {
    int value = 0;
    for (char c : tok.text) {
        if (c < '0' || c > '9')
            throw ParseError(line_no, tok.col, "expected a state label, got '" + std::string(tok.text) + "'");
        if (value > (std::numeric_limits<int>::max() - (c - '0')) / 10)
            throw ParseError(line_no, tok.col, "state label out of range");
        value = value * 10 + (c - '0');
    }
    if (tok.text.empty()) throw ParseError(line_no, tok.col, "empty state label");
    if (value >= state_count)
        throw ParseError(line_no, tok.col,
                         "unknown state label " + std::string(tok.text) + " (states: " +
                             std::to_string(state_count) + ")");
    return value;
}

}  // namespace detail

// Parses a chain file:
//
//   states: <s>
//   absorbing: <label> [<label> ...]
//   start: <label>              # optional default start state
//   row <i>: <j>:<num>/<den> [<j>:<num>/<den> ...]
//
// '#' starts a comment. Fractions need not be reduced; a bare integer is
// accepted for a whole probability ("1" == "1/1"). Every structural invariant
// is checked here; reachability of absorption is validate_absorbing's job.
inline ChainSpec parse_chain(std::string_view text) {
    ChainSpec spec;
    bool saw_states = false;
    bool saw_absorbing = false;
    std::set<int> absorbing_set;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const std::vector<detail::Token> toks = detail::tokenize(line);
        if (toks.empty()) continue;

        const std::string_view head = toks[0].text;
        if (head == "states:") {
            if (saw_states) throw ParseError(line_no, toks[0].col, "duplicate states: line");
            if (toks.size() != 2)
                throw ParseError(line_no, toks[0].col, "states: expects exactly one count");
            int count = 0;
            for (char c : toks[1].text) {
                if (c < '0' || c > '9')
                    throw ParseError(line_no, toks[1].col, "states: expects a nonnegative integer");
                if (count > (std::numeric_limits<int>::max() - (c - '0')) / 10)
                    throw ParseError(line_no, toks[1].col, "state count out of range");
                count = count * 10 + (c - '0');
            }
            if (count < 2)
                throw ParseError(line_no, toks[1].col,
                                 "need at least 2 states (one transient, one absorbing)");
            spec.state_count = count;
            saw_states = true;
        } else if (head == "absorbing:") {
            if (!saw_states) throw ParseError(line_no, toks[0].col, "states: must come first");
            if (saw_absorbing) throw ParseError(line_no, toks[0].col, "duplicate absorbing: line");
            if (toks.size() < 2)
                throw ParseError(line_no, toks[0].col, "absorbing: expects at least one label");
            for (std::size_t k = 1; k < toks.size(); ++k) {
                const int label = detail::parse_label(toks[k], line_no, spec.state_count);
                if (!absorbing_set.insert(label).second)
                    throw ParseError(line_no, toks[k].col,
                                     "duplicate absorbing label " + std::to_string(label));
            }
            spec.absorbing.assign(absorbing_set.begin(), absorbing_set.end());
            saw_absorbing = true;
        } else if (head == "start:") {
            if (!saw_states) throw ParseError(line_no, toks[0].col, "states: must come first");
            if (spec.start) throw ParseError(line_no, toks[0].col, "duplicate start: line");
            if (toks.size() != 2)
                throw ParseError(line_no, toks[0].col, "start: expects exactly one label");
            spec.start = detail::parse_label(toks[1], line_no, spec.state_count);
        } else if (head == "row") {
            if (!saw_states || !saw_absorbing)
                throw ParseError(line_no, toks[0].col,
                                 "states: and absorbing: must come before row lines");
            if (toks.size() < 3)
                throw ParseError(line_no, toks[0].col,
                                 "row expects a state and at least one transition");
            // "row <i>:" -- the source label carries a trailing colon.
            detail::Token src = toks[1];
            if (src.text.empty() || src.text.back() != ':')
                throw ParseError(line_no, src.col, "expected 'row <i>:'");
            src.text.remove_suffix(1);
            const int from = detail::parse_label(src, line_no, spec.state_count);
            if (absorbing_set.count(from))
                throw ParseError(line_no, src.col,
                                 "transition out of an absorbing state " + std::to_string(from));
            if (spec.rows.count(from))
                throw ParseError(line_no, src.col, "duplicate row for state " + std::to_string(from));

            std::map<int, Rational> row;
            Rational sum;
            for (std::size_t k = 2; k < toks.size(); ++k) {
                const std::string_view entry = toks[k].text;
                const std::size_t colon = entry.find(':');
                if (colon == std::string_view::npos)
                    throw ParseError(line_no, toks[k].col, "expected '<state>:<num>/<den>'");
                const detail::Token target_tok{entry.substr(0, colon), toks[k].col};
                const int to = detail::parse_label(target_tok, line_no, spec.state_count);
                if (row.count(to))
                    throw ParseError(line_no, toks[k].col,
                                     "repeated target " + std::to_string(to) + " in row " +
                                         std::to_string(from));
                Rational p;
                try {
                    p = parse_rational(entry.substr(colon + 1));
                } catch (const std::invalid_argument& e) {
                    throw ParseError(line_no, toks[k].col + static_cast<int>(colon) + 1, e.what());
                }
                if (p.sign() < 0)
                    throw ParseError(line_no, toks[k].col, "negative probability " + p.str());
                row.emplace(to, p);
                sum += p;
            }
            if (!(sum == Rational(1)))
                throw ParseError(line_no, toks[0].col,
                                 "row " + std::to_string(from) + " sums to " + sum.str() +
                                     ", expected 1");
            if (auto self = row.find(from); self != row.end() && self->second == Rational(1))
                throw ParseError(line_no, toks[0].col,
                                 "transient state " + std::to_string(from) +
                                     " has p = 1 self-loop (absorbing in disguise)");
            // Zero-probability transitions never move chips; drop them.
            std::erase_if(row, [](const auto& kv) { return kv.second.is_zero(); });
            spec.rows.emplace(from, std::move(row));
        } else {
            throw ParseError(line_no, toks[0].col,
                             "unrecognized directive '" + std::string(head) + "'");
        }
    }

    if (!saw_states) throw ParseError(0, 0, "missing states: line");
    if (!saw_absorbing) throw ParseError(0, 0, "missing absorbing: line");
    if (static_cast<int>(spec.absorbing.size()) == spec.state_count)
        throw ParseError(0, 0, "chain has no transient states");
    for (int i = 0; i < spec.state_count; ++i) {
        if (!spec.is_absorbing(i) && !spec.rows.count(i))
            throw ParseError(0, 0, "missing row for transient state " + std::to_string(i));
    }
    if (spec.start && spec.is_absorbing(*spec.start))
        throw ParseError(0, 0, "start state " + std::to_string(*spec.start) + " is absorbing");
    return spec;
}

// Labels of transient states from which no absorbing state is reachable
// through positive-probability edges; empty means the chain is absorbing.
// Breadth-first search from the absorbing states over reversed edges.
inline std::vector<int> validate_absorbing(const ChainSpec& spec) {
    std::vector<std::vector<int>> reverse_edges(spec.state_count);
    for (const auto& [from, row] : spec.rows)
        for (const auto& [to, p] : row)
            if (p.sign() > 0) reverse_edges[to].push_back(from);

    std::vector<char> reached(spec.state_count, 0);
    std::deque<int> queue;
    for (int label : spec.absorbing) {
        reached[label] = 1;
        queue.push_back(label);
    }
    while (!queue.empty()) {
        const int state = queue.front();
        queue.pop_front();
        for (int prev : reverse_edges[state])
            if (!reached[prev]) {
                reached[prev] = 1;
                queue.push_back(prev);
            }
    }

    std::vector<int> stuck;
    for (int i = 0; i < spec.state_count; ++i)
        if (!spec.is_absorbing(i) && !reached[i]) stuck.push_back(i);
    return stuck;
}

// Throwing form used by the pipeline.
inline void require_absorbing(const ChainSpec& spec) {
    std::vector<int> stuck = validate_absorbing(spec);
    if (stuck.empty()) return;
    std::string msg = "no absorbing state reachable from transient state(s):";
    for (int s : stuck) msg += " " + std::to_string(s);
    throw ValidationError(msg, std::move(stuck));
}

// r_i = lcm of the row's canonical denominators (the minimal chip quota);
// r_ij = p_ij * r_i. Exact by construction: r_ij/r_i reproduces p_ij.
inline IntegerChain integerize(const ChainSpec& spec) {
    IntegerChain chain;
    const std::vector<int> transient = spec.transient_labels();
    chain.transient_count = static_cast<int>(transient.size());
    chain.absorbing_count = static_cast<int>(spec.absorbing.size());
    chain.labels = transient;
    chain.labels.insert(chain.labels.end(), spec.absorbing.begin(), spec.absorbing.end());
    for (int i = 0; i < chain.states(); ++i) chain.dense.emplace(chain.labels[i], i);

    chain.quota.reserve(transient.size());
    chain.targets.resize(transient.size());
    for (int i = 0; i < chain.transient_count; ++i) {
        const std::map<int, Rational>& row = spec.rows.at(transient[i]);
        std::vector<BigInt> dens;
        dens.reserve(row.size());
        for (const auto& [to, p] : row) dens.push_back(p.den());
        const BigInt r = lcm_all(dens);
        chain.quota.push_back(r);
        for (const auto& [to, p] : row) {
            BigInt chips = p.num() * (r / p.den());
            chain.targets[i].emplace_back(chain.dense_of(to), std::move(chips));
        }
        std::sort(chain.targets[i].begin(), chain.targets[i].end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    return chain;
}

// Q (transient x transient) and R (transient x absorbing) blocks, states in
// ascending label order within each group.
inline CanonicalForm canonical_form(const ChainSpec& spec) {
    CanonicalForm cf;
    cf.transient_labels = spec.transient_labels();
    cf.absorbing_labels = spec.absorbing;
    const std::size_t t = cf.transient_labels.size();
    const std::size_t a = cf.absorbing_labels.size();
    cf.q = RationalMatrix(t, t);
    cf.r = RationalMatrix(t, a);

    std::map<int, std::size_t> tpos;
    std::map<int, std::size_t> apos;
    for (std::size_t i = 0; i < t; ++i) tpos[cf.transient_labels[i]] = i;
    for (std::size_t k = 0; k < a; ++k) apos[cf.absorbing_labels[k]] = k;

    for (std::size_t i = 0; i < t; ++i) {
        for (const auto& [to, p] : spec.rows.at(cf.transient_labels[i])) {
            if (auto it = tpos.find(to); it != tpos.end())
                cf.q.at(i, it->second) = p;
            else
                cf.r.at(i, apos.at(to)) = p;
        }
    }
    return cf;
}

}  // namespace engel
