// Command-line front end: read a problem description, run the selected
// solver together with the dense oracle, and write solution tables and
// identity diagnostics in CSV or JSON.
//
// Exit codes: 0 success, 2 problem-description error, 3 solver inapplicable
// (singular truncated system or determinant gate), 4 I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "krein/errors.hpp"
#include "krein/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSpec = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw krein::IoError("cannot read problem file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver for systems of Fredholm integral equations of the second kind"};
    app.require_subcommand(1);

    CLI::App* solve = app.add_subcommand("solve", "run a problem description file");
    std::string spec_path;
    std::string out_dir, format_flag, solver_flag, grids_flag;
    solve->add_option("spec-file", spec_path, "problem description file")->required();
    solve->add_option("--out", out_dir, "output directory (overrides the file)");
    solve->add_option("--format", format_flag, "csv or json (overrides the file)");
    solve->add_option("--grids", grids_flag, "comma-separated node counts (overrides the file)");
    solve->add_option("--solver", solver_flag, "solver name (overrides the file)");

    CLI11_PARSE(app, argc, argv);

    try {
        krein::ProblemSpec spec = krein::parse_problem(read_file(spec_path));

        if (!out_dir.empty()) spec.output_dir = out_dir;
        if (!format_flag.empty()) spec.format = krein::format_from_name(format_flag);
        if (!solver_flag.empty()) spec.solver = krein::solver_from_name(solver_flag);
        if (!grids_flag.empty()) {
            spec.grid_sizes.clear();
            std::stringstream ss(grids_flag);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) spec.grid_sizes.push_back(std::stoi(item));
        }
        krein::validate_problem(spec);

        const krein::RunReport report = krein::run(spec);
        krein::emit(report, spec.output_dir, spec.format);

        for (std::size_t r = 0; r < report.records.size(); ++r) {
            const krein::GridRecord& rec = report.records[r];
            if (rec.ok) {
                std::printf("n=%d ok residual=%.3e gap_vs_oracle=%.3e", rec.n_nodes,
                            rec.residual_full.value_or(0.0),
                            rec.sup_gap_vs_oracle.value_or(0.0));
                if (r > 0 && r - 1 < report.orders.size() && report.orders[r - 1])
                    std::printf(" order=%.2f", *report.orders[r - 1]);
                std::printf("\n");
            } else {
                std::printf("n=%d error: %s\n", rec.n_nodes, rec.error.c_str());
            }
        }
        std::printf("report written to %s\n", spec.output_dir.c_str());

        if (report.any_solver_inapplicable) return kExitSolver;
        return report.all_ok ? kExitOk : kExitSolver;
    } catch (const krein::SpecError& e) {
        std::fprintf(stderr, "problem description error");
        if (e.line() > 0) std::fprintf(stderr, " (line %d)", e.line());
        if (e.column() > 0) std::fprintf(stderr, " (column %d)", e.column());
        std::fprintf(stderr, ": %s\n", e.what());
        return kExitSpec;
    } catch (const krein::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "problem description error: %s\n", e.what());
        return kExitSpec;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSolver;
    }
}
