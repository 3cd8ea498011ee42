#pragma once

#include <stdexcept>
#include <string>

namespace krein {

// The discretized system has no numerically unique solution (condition
// estimate past the 1e12 cutoff, beyond which second-order accuracy claims
// are meaningless in double precision).
class NoUniqueSolutionError : public std::runtime_error {
public:
    NoUniqueSolutionError(std::string what, double xi, int xi_index)
        : std::runtime_error(std::move(what)), xi_(xi), xi_index_(xi_index) {}

    // Truncation point at which the solve degenerated; equals the right
    // endpoint for a full solve.
    double xi() const { return xi_; }
    int xi_index() const { return xi_index_; }

private:
    double xi_;
    int xi_index_;
};

// det M'(xi) fell below the invertibility threshold at some truncation
// point, so the reconstruction formula does not apply.
class KreinInapplicableError : public std::runtime_error {
public:
    KreinInapplicableError(std::string what, double xi, int xi_index)
        : std::runtime_error(std::move(what)), xi_(xi), xi_index_(xi_index) {}

    double xi() const { return xi_; }
    int xi_index() const { return xi_index_; }

private:
    double xi_;
    int xi_index_;
};

// Problem-description errors (bad key, bad expression, unknown kernel).
class SpecError : public std::runtime_error {
public:
    SpecError(std::string what, int line = 0, int column = 0)
        : std::runtime_error(std::move(what)), line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace krein
