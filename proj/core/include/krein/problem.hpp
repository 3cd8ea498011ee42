#pragma once

#include <optional>
#include <string>
#include <vector>

#include "krein/expression.hpp"
#include "krein/kernels.hpp"

namespace krein {

enum class SolverKind { Nystrom, Resolvent35, Krein34, Theorem41, Theorem42 };
enum class OutputFormat { Csv, Json };

std::string solver_name(SolverKind s);
SolverKind solver_from_name(const std::string& name);
std::string format_name(OutputFormat f);
OutputFormat format_from_name(const std::string& name);

/*
 * A problem description file is a flat key-value document with two optional
 * sections.  '#' starts a comment, keys are assigned with '=', unknown keys
 * are rejected:
 *
 *     interval = 0 1
 *     solver = krein_34
 *     grids = 9 17 33
 *     format = csv
 *     output = results
 *
 *     [kernel]
 *     name = constant_scalar
 *     c = 0.5
 *     c_im = 0.0
 *
 *     [rhs]
 *     f1 = 1
 *
 * Kernel parameters by name:
 *     zero:              m (block dimension, default 1)
 *     constant_scalar:   c, c_im
 *     separable_scalar:  (none)
 *     antidiag_block:    h1, h2   (expressions in t; block dimension 2)
 *     difference_scalar: h        (expression in t, must be even)
 *
 * The rhs section takes one expression per component, f1..f<m>, plus
 * optional analytic derivatives df1..df<m> used by the centered solver.
 */
struct ProblemSpec {
    double a = 0.0;
    double b = 1.0;
    std::string kernel_name;
    Complex c = 0.0;
    int zero_dim = 1;
    std::optional<Expression> h1, h2, h;
    std::vector<Expression> rhs;
    std::vector<Expression> rhs_derivative;  // empty or one per component
    std::vector<int> grid_sizes;
    SolverKind solver = SolverKind::Nystrom;
    OutputFormat format = OutputFormat::Csv;
    std::string output_dir = "out";
    int block_dim = 1;  // derived from the kernel

    bool operator==(const ProblemSpec& other) const;
};

// Strict parse: every key must be known and every value well formed.
// Throws SpecError with the offending line.
ProblemSpec parse_problem(const std::string& text);

// Cross-field checks (interval order, grid sizes, solver/kernel fit).
// parse_problem runs this; the CLI re-runs it after flag overrides.
void validate_problem(const ProblemSpec& spec);

// Canonical text form; parse(serialize(s)) == s.
std::string serialize_problem(const ProblemSpec& spec);

KernelSpec kernel_from_spec(const ProblemSpec& spec);
std::function<ColVec(double)> rhs_from_spec(const ProblemSpec& spec);
// Null when no analytic derivatives were given.
std::function<ColVec(double)> rhs_derivative_from_spec(const ProblemSpec& spec);

}  // namespace krein
