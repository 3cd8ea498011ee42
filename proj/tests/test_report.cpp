#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "krein/report.hpp"

using namespace krein;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ProblemSpec constant_problem(SolverKind solver, std::vector<int> grids) {
    ProblemSpec spec = parse_problem(R"(
interval = 0 1
solver = krein_34
grids = 9

[kernel]
name = constant_scalar
c = 0.5

[rhs]
f1 = 1
)");
    spec.solver = solver;
    spec.grid_sizes = std::move(grids);
    return spec;
}

}  // namespace

TEST_CASE("krein run against the oracle shrinks with refinement") {
    const RunReport report = run(constant_problem(SolverKind::Krein34, {9, 17, 33}));
    CHECK(report.all_ok);
    REQUIRE(report.records.size() == 3);
    for (const GridRecord& rec : report.records) {
        CHECK(rec.ok);
        REQUIRE(rec.condition_37_min.has_value());
        CHECK(*rec.condition_37_min > 0.9);
        REQUIRE(rec.sup_gap_vs_oracle.has_value());
    }
    CHECK(*report.records[0].sup_gap_vs_oracle > *report.records[2].sup_gap_vs_oracle);
    REQUIRE(report.orders.size() == 2);
    for (const auto& o : report.orders) {
        REQUIRE(o.has_value());
        CHECK(*o >= 1.5);
    }
}

TEST_CASE("zero kernel run has residuals at solver precision") {
    ProblemSpec spec = parse_problem(R"(
interval = 0 1
solver = resolvent_35
grids = 9 17

[kernel]
name = zero

[rhs]
f1 = exp(t)
)");
    const RunReport report = run(spec);
    CHECK(report.all_ok);
    for (const GridRecord& rec : report.records) {
        CHECK(*rec.residual_full <= 1e-10);
        CHECK(*rec.resolvent_defining_residual <= 1e-10);
        CHECK(*rec.resolvent_second_form_residual <= 1e-10);
    }
}

TEST_CASE("degenerate truncation surfaces as solver-inapplicable with partial output") {
    const RunReport report = run(constant_problem(SolverKind::Krein34, {9, 17}));
    CHECK(report.all_ok);

    ProblemSpec bad = constant_problem(SolverKind::Krein34, {9, 17});
    bad.c = Complex(2.0, 0.0);
    const RunReport failing = run(bad);
    CHECK_FALSE(failing.all_ok);
    CHECK(failing.any_solver_inapplicable);
    for (const GridRecord& rec : failing.records) {
        CHECK_FALSE(rec.ok);
        CHECK(rec.solver_inapplicable);
        CHECK(rec.error.find("0.5") != std::string::npos);
        // the oracle still ran: the full system is regular
        CHECK_FALSE(rec.phi_oracle.empty());
    }
}

TEST_CASE("emit csv writes solution rows and a summary") {
    const RunReport report = run(constant_problem(SolverKind::Krein34, {5, 9}));
    const std::string dir = "test_report_out_csv";
    emit(report, dir, OutputFormat::Csv);

    const std::string sol = slurp(std::filesystem::path(dir) / "solution.csv");
    CHECK(sol.rfind("grid_size,t,re_phi_1,im_phi_1\n", 0) == 0);
    // 5 + 9 data rows plus header
    CHECK(std::count(sol.begin(), sol.end(), '\n') == 15);

    const std::string sum = slurp(std::filesystem::path(dir) / "summary.csv");
    CHECK(sum.find("condition_37_min") != std::string::npos);
    CHECK(std::count(sum.begin(), sum.end(), '\n') == 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("emit json carries the frozen field names") {
    const RunReport report = run(constant_problem(SolverKind::Krein34, {5, 9}));
    const std::string dir = "test_report_out_json";
    emit(report, dir, OutputFormat::Json);

    const nlohmann::json doc =
        nlohmann::json::parse(slurp(std::filesystem::path(dir) / "report.json"));
    CHECK(doc["problem"]["solver"] == "krein_34");
    REQUIRE(doc["grids"].size() == 2);
    const auto& g0 = doc["grids"][0];
    CHECK(g0["n_nodes"] == 5);
    CHECK(g0.contains("condition_37_min"));
    CHECK(g0["condition_37_min"].is_number());
    CHECK(g0["solution"].size() == 5);
    CHECK(doc["orders"].size() == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("identical runs produce identical bytes") {
    const ProblemSpec spec = constant_problem(SolverKind::Krein34, {9, 17});
    const std::string d1 = "test_report_det1", d2 = "test_report_det2";
    emit(run(spec), d1, OutputFormat::Json);
    emit(run(spec), d2, OutputFormat::Json);
    CHECK(slurp(std::filesystem::path(d1) / "report.json") ==
          slurp(std::filesystem::path(d2) / "report.json"));
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
}

TEST_CASE("m = 2 csv column layout") {
    ProblemSpec spec = parse_problem(R"(
interval = 0 0.5
solver = theorem_4_1
grids = 9

[kernel]
name = antidiag_block
h1 = 0.5
h2 = 0.5

[rhs]
f1 = 1
f2 = 1
)");
    const RunReport report = run(spec);
    CHECK(report.all_ok);
    const std::string dir = "test_report_out_m2";
    emit(report, dir, OutputFormat::Csv);
    const std::string sol = slurp(std::filesystem::path(dir) / "solution.csv");
    CHECK(sol.rfind("grid_size,t,re_phi_1,im_phi_1,re_phi_2,im_phi_2\n", 0) == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("theorem_4_2 run reports centered diagnostics") {
    ProblemSpec spec = parse_problem(R"(
interval = -0.5 0.5
solver = theorem_4_2
grids = 9 17

[kernel]
name = difference_scalar
h = 0.5

[rhs]
f1 = 1
)");
    const RunReport report = run(spec);
    CHECK(report.all_ok);
    for (const GridRecord& rec : report.records) {
        REQUIRE(rec.det_m_prime_min.has_value());
        CHECK(*rec.det_m_prime_min > 0.0);
        REQUIRE(rec.evenness_gap.has_value());
        CHECK(*rec.evenness_gap < 1e-10);
    }
}
