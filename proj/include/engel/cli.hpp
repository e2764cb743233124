#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "engel/chain.hpp"
#include "engel/engine.hpp"
#include "engel/errors.hpp"
#include "engel/matrix.hpp"
#include "engel/simulate.hpp"
#include "engel/verify.hpp"

namespace engel {

// Exit codes shared by every subcommand.
//   0  success
//   1  a verified property failed (including a solve method disagreement)
//   2  input error: unreadable file, bad syntax, bad flags, non-absorbing chain
//   3  resource limit: move budget or simulation step cap exhausted
//   4  unexpected internal error
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitPropertyFailure = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitResourceLimit = 3;
inline constexpr int kExitInternalError = 4;

namespace cli_detail {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path);
    return ss.str();
}

inline ChainSpec load_chain(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return parse_chain(text);
    } catch (const ParseError& e) {
        throw ParseError(0, 0, path + ": " + e.what());
    }
}

inline void require_absorbing_file(const ChainSpec& spec, const std::string& path) {
    try {
        require_absorbing(spec);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what(), e.states());
    }
}

// Start label from the flag, falling back to the file's start: line. Returns
// the dense index, or -1 when absent and not required.
inline int resolve_start(const ChainSpec& spec, const IntegerChain& chain,
                         std::optional<int> flag, bool required) {
    const std::optional<int> label = flag ? flag : spec.start;
    if (!label) {
        if (required)
            throw std::invalid_argument("no start state: pass --start or add a start: line");
        return -1;
    }
    if (*label < 0 || *label >= spec.state_count)
        throw std::invalid_argument("start state " + std::to_string(*label) +
                                    " out of range (states: " + std::to_string(spec.state_count) +
                                    ")");
    if (spec.is_absorbing(*label))
        throw std::invalid_argument("start state " + std::to_string(*label) + " is absorbing");
    return chain.dense_of(*label);
}

inline std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(15) << v;
    return os.str();
}

inline std::string join_labels(const std::vector<int>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(labels[i]);
    }
    return out;
}

inline void write_chain_summary(std::ostream& os, const ChainSpec& spec,
                                const CanonicalForm& canon) {
    os << "chain: " << spec.state_count << " states, " << canon.transient_labels.size()
       << " transient (" << join_labels(canon.transient_labels) << "), "
       << canon.absorbing_labels.size() << " absorbing (" << join_labels(canon.absorbing_labels)
       << ")\n";
}

inline void write_matrix(std::ostream& os, const std::string& title,
                         const std::vector<int>& row_labels, const std::vector<int>& col_labels,
                         const RationalMatrix& m) {
    os << title << '\n';
    std::vector<std::string> row_names(row_labels.size());
    std::size_t lead = 0;
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        row_names[i] = std::to_string(row_labels[i]);
        lead = std::max(lead, row_names[i].size());
    }
    std::vector<std::size_t> width(col_labels.size());
    std::vector<std::string> header(col_labels.size());
    for (std::size_t j = 0; j < col_labels.size(); ++j) {
        header[j] = std::to_string(col_labels[j]);
        width[j] = header[j].size();
        for (std::size_t i = 0; i < m.rows(); ++i)
            width[j] = std::max(width[j], m.at(i, j).str().size());
    }
    auto pad = [](const std::string& text, std::size_t w) {
        return std::string(w - text.size(), ' ') + text;
    };
    os << std::string(lead, ' ');
    for (std::size_t j = 0; j < col_labels.size(); ++j) os << "  " << pad(header[j], width[j]);
    os << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        os << pad(row_names[i], lead);
        for (std::size_t j = 0; j < m.cols(); ++j) os << "  " << pad(m.at(i, j).str(), width[j]);
        os << '\n';
    }
}

inline std::string join_row(const std::vector<Rational>& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ' ';
        out += row[i].str();
    }
    return out;
}

inline std::vector<std::string> row_strings(const std::vector<Rational>& row) {
    std::vector<std::string> out;
    out.reserve(row.size());
    for (const Rational& r : row) out.push_back(r.str());
    return out;
}

inline std::vector<double> row_doubles(const std::vector<Rational>& row) {
    std::vector<double> out;
    out.reserve(row.size());
    for (const Rational& r : row) out.push_back(r.to_double());
    return out;
}

inline std::vector<std::string> bigint_strings(const std::vector<BigInt>& values) {
    std::vector<std::string> out;
    out.reserve(values.size());
    for (const BigInt& v : values) out.push_back(v.get_str());
    return out;
}

inline nlohmann::ordered_json chain_json(const std::string& file, const ChainSpec& spec,
                                         const CanonicalForm& canon) {
    nlohmann::ordered_json j;
    j["file"] = file;
    j["states"] = spec.state_count;
    j["transient"] = canon.transient_labels;
    j["absorbing"] = canon.absorbing_labels;
    return j;
}

inline nlohmann::ordered_json cycle_json(const IntegerChain& chain, const RunStats& stats) {
    nlohmann::ordered_json j;
    std::vector<BigInt> moved;
    moved.reserve(chain.transient_count);
    for (int i = 0; i < chain.transient_count; ++i) moved.push_back(stats.chips_out(chain, i));
    j["fires"] = bigint_strings(stats.fires);
    j["chips_moved"] = bigint_strings(moved);
    j["absorbed"] = bigint_strings(stats.absorbed);
    j["additions"] = stats.additions.get_str();
    j["moves"] = stats.total_moves().get_str();
    return j;
}

struct SolveArgs {
    std::string file;
    std::optional<int> start;
    std::string method = "both";
    std::string format = "text";
    std::uint64_t budget = kDefaultBudget;
};

inline int do_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    const ChainSpec spec = load_chain(a.file);
    require_absorbing_file(spec, a.file);
    const IntegerChain chain = integerize(spec);
    const CanonicalForm canon = canonical_form(spec);
    const int u = resolve_start(spec, chain, a.start, /*required=*/false);
    const bool use_chips = a.method != "matrix";
    const bool use_inverse = a.method != "abacus";
    const bool both = use_chips && use_inverse;

    if (u >= 0) {
        std::vector<Rational> n_row;
        std::vector<Rational> b_row;
        std::optional<RunStats> cycle;
        if (use_chips) {
            RunResult run = run_engel(chain, u, a.budget, lowest_first, /*trace_limit=*/0);
            std::tie(n_row, b_row) = stats_to_row(run.stats, chain);
            cycle = std::move(run.stats);
        }
        if (use_inverse) {
            const RationalMatrix n = fundamental_matrix(canon.q);
            const RationalMatrix b = absorption_matrix(n, canon.r);
            std::vector<Rational> inv_n = detail::matrix_row(n, static_cast<std::size_t>(u));
            std::vector<Rational> inv_b = detail::matrix_row(b, static_cast<std::size_t>(u));
            if (use_chips && (inv_n != n_row || inv_b != b_row)) {
                err << "method disagreement for start " << chain.label_of(u) << ": chips say N ("
                    << join_row(n_row) << ") B (" << join_row(b_row) << "), inverse says N ("
                    << join_row(inv_n) << ") B (" << join_row(inv_b) << ")\n";
                return kExitPropertyFailure;
            }
            n_row = std::move(inv_n);
            b_row = std::move(inv_b);
        }
        Rational moves_to_absorption;
        for (const Rational& r : n_row) moves_to_absorption += r;

        if (a.format == "json") {
            nlohmann::ordered_json doc;
            doc["chain"] = chain_json(a.file, spec, canon);
            doc["method"] = a.method;
            doc["start"] = chain.label_of(u);
            doc["N_row"] = row_strings(n_row);
            doc["B_row"] = row_strings(b_row);
            doc["expected_moves"] = moves_to_absorption.str();
            if (both) doc["methods_agree"] = true;
            if (cycle) doc["cycle"] = cycle_json(chain, *cycle);
            doc["approximate"]["N_row"] = row_doubles(n_row);
            doc["approximate"]["B_row"] = row_doubles(b_row);
            doc["approximate"]["expected_moves"] = moves_to_absorption.to_double();
            out << doc.dump(2) << '\n';
        } else {
            write_chain_summary(out, spec, canon);
            out << "start: " << chain.label_of(u) << '\n';
            out << "N row: " << join_row(n_row) << '\n';
            out << "B row: " << join_row(b_row) << '\n';
            out << "expected moves to absorption: " << moves_to_absorption.str() << " (~"
                << fmt_double(moves_to_absorption.to_double()) << ")\n";
            if (both) out << "check: chip counts and matrix inverse agree\n";
        }
        return kExitSuccess;
    }

    std::optional<SolveResult> solved;
    RationalMatrix n;
    RationalMatrix b;
    if (use_chips) {
        solved = solve_all(chain, a.budget);
        n = solved->n;
        b = solved->b;
    }
    if (use_inverse) {
        RationalMatrix inv_n = fundamental_matrix(canon.q);
        RationalMatrix inv_b = absorption_matrix(inv_n, canon.r);
        if (use_chips && (inv_n != n || inv_b != b)) {
            err << "method disagreement: chip counts and matrix inverse differ\n";
            for (std::size_t i = 0; i < n.rows(); ++i) {
                const auto chips_n = detail::matrix_row(n, i);
                const auto inverse_n = detail::matrix_row(inv_n, i);
                if (chips_n != inverse_n)
                    err << "  N row " << canon.transient_labels[i] << ": chips ("
                        << join_row(chips_n) << ") vs inverse (" << join_row(inverse_n) << ")\n";
            }
            for (std::size_t i = 0; i < b.rows(); ++i) {
                const auto chips_b = detail::matrix_row(b, i);
                const auto inverse_b = detail::matrix_row(inv_b, i);
                if (chips_b != inverse_b)
                    err << "  B row " << canon.transient_labels[i] << ": chips ("
                        << join_row(chips_b) << ") vs inverse (" << join_row(inverse_b) << ")\n";
            }
            return kExitPropertyFailure;
        }
        n = std::move(inv_n);
        b = std::move(inv_b);
    }
    std::vector<Rational> moves_per_start(n.rows());
    for (std::size_t i = 0; i < n.rows(); ++i) moves_per_start[i] = n.row_sum(i);

    if (a.format == "json") {
        nlohmann::ordered_json doc;
        doc["chain"] = chain_json(a.file, spec, canon);
        doc["method"] = a.method;
        nlohmann::ordered_json jn = nlohmann::ordered_json::array();
        nlohmann::ordered_json jb = nlohmann::ordered_json::array();
        nlohmann::ordered_json an = nlohmann::ordered_json::array();
        nlohmann::ordered_json ab = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < n.rows(); ++i) {
            jn.push_back(row_strings(detail::matrix_row(n, i)));
            an.push_back(row_doubles(detail::matrix_row(n, i)));
            jb.push_back(row_strings(detail::matrix_row(b, i)));
            ab.push_back(row_doubles(detail::matrix_row(b, i)));
        }
        doc["N"] = std::move(jn);
        doc["B"] = std::move(jb);
        doc["expected_moves"] = row_strings(moves_per_start);
        if (both) doc["methods_agree"] = true;
        if (solved) {
            nlohmann::ordered_json cycles = nlohmann::ordered_json::array();
            for (int i = 0; i < chain.transient_count; ++i) {
                nlohmann::ordered_json c = cycle_json(chain, solved->runs[i]);
                c["start"] = chain.label_of(i);
                cycles.push_back(std::move(c));
            }
            doc["cycles"] = std::move(cycles);
        }
        doc["approximate"]["N"] = std::move(an);
        doc["approximate"]["B"] = std::move(ab);
        doc["approximate"]["expected_moves"] = row_doubles(moves_per_start);
        out << doc.dump(2) << '\n';
    } else {
        write_chain_summary(out, spec, canon);
        write_matrix(out, "N (expected visits):", canon.transient_labels, canon.transient_labels,
                     n);
        write_matrix(out, "B (absorption probabilities):", canon.transient_labels,
                     canon.absorbing_labels, b);
        out << "expected moves to absorption:\n";
        for (std::size_t i = 0; i < n.rows(); ++i)
            out << "  from " << canon.transient_labels[i] << ": " << moves_per_start[i].str()
                << " (~" << fmt_double(moves_per_start[i].to_double()) << ")\n";
        if (both) out << "check: chip counts and matrix inverse agree\n";
    }
    return kExitSuccess;
}

struct TraceArgs {
    std::string file;
    std::optional<int> start;
    std::uint64_t budget = kDefaultBudget;
    std::size_t limit = kDefaultTraceLimit;
};

inline int do_trace(const TraceArgs& a, std::ostream& out, std::ostream&) {
    const ChainSpec spec = load_chain(a.file);
    require_absorbing_file(spec, a.file);
    const IntegerChain chain = integerize(spec);
    const int u = resolve_start(spec, chain, a.start, /*required=*/true);
    const int label = chain.label_of(u);

    const RunResult run = run_engel(chain, u, a.budget, lowest_first, a.limit);
    out << render_trace(chain, critical_loading(chain, u), run.trace);
    out << '\n';

    BigInt fire_total = 0;
    for (const BigInt& f : run.stats.fires) fire_total += f;
    out << "moves: " << run.stats.total_moves().get_str() << " = " << fire_total.get_str()
        << " fires + " << run.stats.additions.get_str() << " additions\n";
    out << "fires per state:";
    for (int i = 0; i < chain.transient_count; ++i)
        out << ' ' << chain.label_of(i) << ':' << run.stats.fires[i].get_str();
    out << '\n';
    out << "chips absorbed:";
    for (int k = 0; k < chain.absorbing_count; ++k)
        out << ' ' << chain.label_of(chain.transient_count + k) << ':'
            << run.stats.absorbed[k].get_str();
    out << '\n';
    const auto [n_row, b_row] = stats_to_row(run.stats, chain);
    out << "N row (start " << label << "): " << join_row(n_row) << '\n';
    out << "B row (start " << label << "): " << join_row(b_row) << '\n';
    return kExitSuccess;
}

struct VerifyArgs {
    std::vector<std::string> files;
    std::string dir;
    VerifyOptions options;
    std::string format = "text";
};

inline int do_verify(const VerifyArgs& a, std::ostream& out, std::ostream&) {
    std::vector<std::string> files = a.files;
    if (!a.dir.empty()) {
        namespace fs = std::filesystem;
        if (!fs::is_directory(a.dir)) throw IoError("not a directory: " + a.dir);
        std::vector<std::string> found;
        for (const auto& entry : fs::directory_iterator(a.dir))
            if (entry.is_regular_file() && entry.path().extension() == ".chain")
                found.push_back(entry.path().string());
        std::sort(found.begin(), found.end());
        files.insert(files.end(), found.begin(), found.end());
    }
    if (files.empty())
        throw std::invalid_argument("no chain files: pass paths or --chains-dir");

    std::vector<std::pair<std::string, ChainSpec>> specs;
    specs.reserve(files.size());
    for (const std::string& file : files) {
        ChainSpec spec = load_chain(file);
        require_absorbing_file(spec, file);
        specs.emplace_back(file, std::move(spec));
    }
    const VerificationReport report = verify_chains(specs, a.options);

    if (a.format == "json") {
        nlohmann::ordered_json doc;
        doc["options"]["starts"] = report.options.starts;
        doc["options"]["seeds"] = report.options.seeds;
        doc["options"]["seed"] = report.options.seed;
        doc["options"]["budget"] = report.options.budget;
        nlohmann::ordered_json chains = nlohmann::ordered_json::array();
        for (const ChainVerification& cv : report.chains) {
            nlohmann::ordered_json c;
            c["chain"] = cv.chain;
            c["transient"] = cv.transient;
            c["absorbing"] = cv.absorbing;
            c["checks"] = cv.checks;
            nlohmann::ordered_json issues = nlohmann::ordered_json::array();
            for (const VerifyIssue& issue : cv.issues) {
                nlohmann::ordered_json i;
                i["property"] = issue.property;
                if (issue.start >= 0)
                    i["start"] = issue.start;
                else
                    i["start"] = nullptr;
                if (issue.seeded)
                    i["seed"] = std::to_string(issue.seed);
                else
                    i["seed"] = nullptr;
                i["detail"] = issue.detail;
                issues.push_back(std::move(i));
            }
            c["issues"] = std::move(issues);
            chains.push_back(std::move(c));
        }
        doc["chains"] = std::move(chains);
        doc["checks"] = report.checks();
        doc["failures"] = report.failures();
        doc["ok"] = report.ok();
        out << doc.dump(2) << '\n';
    } else {
        out << report.text();
    }
    return report.ok() ? kExitSuccess : kExitPropertyFailure;
}

struct SimulateArgs {
    std::string file;
    std::optional<int> start;
    std::uint64_t trials = 100'000;
    std::uint64_t seed = 1;
    std::uint64_t cap = kDefaultStepCap;
    std::string format = "text";
};

inline int do_simulate(const SimulateArgs& a, std::ostream& out, std::ostream&) {
    const ChainSpec spec = load_chain(a.file);
    require_absorbing_file(spec, a.file);
    const IntegerChain chain = integerize(spec);
    const CanonicalForm canon = canonical_form(spec);
    const int u = resolve_start(spec, chain, a.start, /*required=*/true);
    const int label = chain.label_of(u);

    const SimulationEstimate est = monte_carlo_estimate(chain, u, a.trials, a.seed, a.cap);
    const RationalMatrix n = fundamental_matrix(canon.q);
    const RationalMatrix b = absorption_matrix(n, canon.r);
    const std::vector<Rational> n_row = detail::matrix_row(n, static_cast<std::size_t>(u));
    const std::vector<Rational> b_row = detail::matrix_row(b, static_cast<std::size_t>(u));

    if (a.format == "json") {
        nlohmann::ordered_json doc;
        doc["chain"] = chain_json(a.file, spec, canon);
        doc["start"] = label;
        doc["trials"] = est.trials;
        doc["seed"] = est.seed;
        nlohmann::ordered_json visits;
        nlohmann::ordered_json absorbed;
        for (int i = 0; i < chain.transient_count; ++i)
            visits[std::to_string(chain.label_of(i))] = est.visits[i].get_str();
        for (int k = 0; k < chain.absorbing_count; ++k)
            absorbed[std::to_string(chain.label_of(chain.transient_count + k))] =
                std::to_string(est.absorbed[k]);
        doc["visits"] = std::move(visits);
        doc["absorbed"] = std::move(absorbed);
        doc["exact"]["N_row"] = row_strings(n_row);
        doc["exact"]["B_row"] = row_strings(b_row);
        nlohmann::ordered_json mean;
        nlohmann::ordered_json freq;
        nlohmann::ordered_json se;
        for (int i = 0; i < chain.transient_count; ++i)
            mean[std::to_string(chain.label_of(i))] = est.visit_mean(i);
        for (int k = 0; k < chain.absorbing_count; ++k) {
            const std::string key = std::to_string(chain.label_of(chain.transient_count + k));
            freq[key] = est.absorption_freq(k);
            se[key] = est.absorption_se(k);
        }
        doc["approximate"]["visit_mean"] = std::move(mean);
        doc["approximate"]["absorption_freq"] = std::move(freq);
        doc["approximate"]["absorption_se"] = std::move(se);
        out << doc.dump(2) << '\n';
    } else {
        out << "start " << label << ", " << est.trials << " trials, seed " << est.seed << '\n';
        out << "expected visits per trajectory:\n";
        for (int i = 0; i < chain.transient_count; ++i)
            out << "  state " << chain.label_of(i) << ": estimate "
                << fmt_double(est.visit_mean(i)) << ", exact " << n_row[i].str() << " (~"
                << fmt_double(n_row[i].to_double()) << ")\n";
        out << "absorption frequency:\n";
        for (int k = 0; k < chain.absorbing_count; ++k)
            out << "  state " << chain.label_of(chain.transient_count + k) << ": estimate "
                << fmt_double(est.absorption_freq(k)) << " +/- " << fmt_double(est.absorption_se(k))
                << ", exact " << b_row[k].str() << " (~" << fmt_double(b_row[k].to_double())
                << ")\n";
    }
    return kExitSuccess;
}

}  // namespace cli_detail

// Full command-line driver; returns the process exit code. args excludes the
// program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact expected visits and absorption probabilities for absorbing Markov chains"};
    app.name("engel");
    app.require_subcommand(1);

    cli_detail::SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand(
        "solve", "Compute the expected-visits matrix N and absorption matrix B exactly");
    solve->add_option("file", solve_args.file, "chain file")->required();
    solve->add_option("--start", solve_args.start,
                      "start state label (default: the file's start: line, else all rows)");
    solve->add_option("--method", solve_args.method, "both, abacus (chip counts), or matrix")
        ->check(CLI::IsMember({"both", "abacus", "matrix"}))
        ->capture_default_str();
    solve->add_option("--format", solve_args.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    solve->add_option("--budget", solve_args.budget, "move budget per run")
        ->capture_default_str();

    cli_detail::TraceArgs trace_args;
    CLI::App* trace =
        app.add_subcommand("trace", "Print every move of one run as a worked table");
    trace->add_option("file", trace_args.file, "chain file")->required();
    trace->add_option("--start", trace_args.start,
                      "start state label (default: the file's start: line)");
    trace->add_option("--budget", trace_args.budget, "move budget")->capture_default_str();
    trace->add_option("--limit", trace_args.limit, "table rows to keep")->capture_default_str();

    cli_detail::VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand(
        "verify", "Check every recurrence and consistency property on the given chains");
    verify->add_option("files", verify_args.files, "chain files");
    verify->add_option("--chains-dir", verify_args.dir, "directory to sweep for *.chain files");
    verify->add_option("--starts", verify_args.options.starts,
                       "random sub-critical loadings per start state")
        ->capture_default_str();
    verify->add_option("--seeds", verify_args.options.seeds,
                       "randomized firing schedules per start state")
        ->capture_default_str();
    verify->add_option("--seed", verify_args.options.seed, "master seed")->capture_default_str();
    verify->add_option("--budget", verify_args.options.budget, "move budget per run")
        ->capture_default_str();
    verify->add_option("--format", verify_args.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    cli_detail::SimulateArgs sim_args;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte Carlo estimates of N and B next to the exact values");
    simulate->add_option("file", sim_args.file, "chain file")->required();
    simulate->add_option("--start", sim_args.start,
                         "start state label (default: the file's start: line)");
    simulate->add_option("--trials", sim_args.trials, "trajectories to sample")
        ->capture_default_str();
    simulate->add_option("--seed", sim_args.seed, "random seed")->capture_default_str();
    simulate->add_option("--cap", sim_args.cap, "step cap per trajectory")
        ->capture_default_str();
    simulate->add_option("--format", sim_args.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    std::vector<std::string> storage = std::move(args);
    storage.insert(storage.begin(), "engel");
    std::vector<const char*> argv;
    argv.reserve(storage.size());
    for (const std::string& s : storage) argv.push_back(s.c_str());

    try {
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help and friends
            err << "error: " << e.what() << '\n';
            return kExitInputError;
        }
        if (solve->parsed()) return cli_detail::do_solve(solve_args, out, err);
        if (trace->parsed()) return cli_detail::do_trace(trace_args, out, err);
        if (verify->parsed()) return cli_detail::do_verify(verify_args, out, err);
        if (simulate->parsed()) return cli_detail::do_simulate(sim_args, out, err);
        err << "error: no subcommand\n";
        return kExitInputError;
    } catch (const BudgetExhaustedError& e) {
        err << "error: " << e.what() << '\n';
        return kExitResourceLimit;
    } catch (const TrialOverrunError& e) {
        err << "error: " << e.what() << '\n';
        return kExitResourceLimit;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const cli_detail::IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternalError;
    }
}

}  // namespace engel
