#pragma once

#include <optional>
#include <string>
#include <vector>

#include "krein/problem.hpp"

namespace krein {

// Diagnostics for one grid size.  Fields that do not apply to the chosen
// solver stay empty; they serialize as nulls (JSON) or empty cells (CSV).
struct GridRecord {
    int n_nodes = 0;
    bool ok = false;
    bool solver_inapplicable = false;  // singular truncation / determinant gate
    std::string error;

    std::vector<double> t;
    std::vector<ColVec> phi;         // chosen solver's solution
    std::vector<ColVec> phi_oracle;  // always attempted

    std::optional<double> residual_full;  // collocation residual at phi
    std::optional<double> oracle_residual;
    std::optional<double> oracle_condition;
    std::optional<double> sup_gap_vs_oracle;
    std::optional<double> rel_sup_gap_vs_oracle;

    std::optional<double> resolvent_defining_residual;
    std::optional<double> resolvent_second_form_residual;
    std::optional<double> resolvent_evolution_residual;
    std::optional<double> representation_gap;
    std::optional<double> family_derivative_residual;
    std::optional<double> accumulator_route_gap;
    std::optional<double> condition_37_min;
    std::optional<double> symmetry_gap;
    std::optional<double> liouville_gap;
    std::optional<double> det_m_prime_min;  // centered path
    std::optional<double> evenness_gap;     // centered path
};

struct RunReport {
    ProblemSpec spec;
    std::vector<GridRecord> records;  // one per grid size, in spec order
    // Richardson order between successive grids, from the oracle gap (or
    // nested-node self-differences for the oracle itself).
    std::vector<std::optional<double>> orders;
    bool all_ok = false;
    bool any_solver_inapplicable = false;
};

// Execute the chosen solver on every grid size (concurrently), always run
// the dense oracle alongside, and collect the applicable identity
// diagnostics.  Solver failures land in the per-grid records; the report is
// still assembled.
RunReport run(const ProblemSpec& spec);

// Write the solution table and diagnostics summary under out_dir:
// CSV -> solution.csv + summary.csv, JSON -> report.json.
// Numbers carry 17 significant digits.
void emit(const RunReport& report, const std::string& out_dir, OutputFormat format);

// Order estimate between two refinement levels; empty when either error is
// at the noise floor or the ratio is not meaningful.
std::optional<double> estimated_order(double err_coarse, double err_fine,
                                      double h_coarse, double h_fine);

}  // namespace krein
