#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace engel {

// Chain-file syntax or semantic error. Positions are 1-based; col 0 means
// "whole line".
class ParseError : public std::runtime_error {
public:
    ParseError(int line, int col, const std::string& what)
        : std::runtime_error(format(line, col, what)), line_(line), col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    static std::string format(int line, int col, const std::string& what) {
        if (line <= 0) return what;  // file-level error, no position
        std::string s = "line " + std::to_string(line);
        if (col > 0) s += ", col " + std::to_string(col);
        return s + ": " + what;
    }
    int line_;
    int col_;
};

// Structural validation failure (e.g. transient states that cannot reach
// absorption). Carries the offending state labels.
class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& what, std::vector<int> states = {})
        : std::runtime_error(what), states_(std::move(states)) {}

    const std::vector<int>& states() const { return states_; }

private:
    std::vector<int> states_;
};

// A move was attempted that the Engel rules forbid.
class IllegalMoveError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// The per-run move budget ran out before the stopping rule fired.
class BudgetExhaustedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// I - Q was singular; only reachable if a non-absorbing chain slipped past
// validation.
class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// stats_from_any_recurrent was handed a configuration that does not recur.
class NotRecurrentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One or more simulated trajectories hit the per-trial step cap.
class TrialOverrunError : public std::runtime_error {
public:
    TrialOverrunError(std::uint64_t overruns, std::uint64_t trials)
        : std::runtime_error(std::to_string(overruns) + " of " + std::to_string(trials) +
                             " trajectories exceeded the step cap"),
          overruns_(overruns) {}

    std::uint64_t overruns() const { return overruns_; }

private:
    std::uint64_t overruns_;
};

}  // namespace engel
