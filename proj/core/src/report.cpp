#include "krein/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>

#include <json.hpp>

#include "krein/errors.hpp"
#include "krein/krein_method.hpp"
#include "krein/nystrom.hpp"
#include "krein/symmetric.hpp"

namespace krein {

namespace {

using nlohmann::json;

double residual_of_full_equation(const KernelTable& K, const VectorTable& f,
                                 const std::vector<ColVec>& phi) {
    const int n = K.grid.n();
    const QuadratureWeights qw = prefix_weights(K.grid, n - 1);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        ColVec r = phi[i] - f.samples[i];
        for (int j = 0; j < n; ++j)
            r -= qw.w[j] * (K.at(i, j) * phi[j]);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

double sup_gap(const std::vector<ColVec>& x, const std::vector<ColVec>& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, (x[i] - y[i]).cwiseAbs().maxCoeff());
    return worst;
}

double sup_norm(const std::vector<ColVec>& x) {
    double worst = 0.0;
    for (const ColVec& v : x)
        worst = std::max(worst, v.cwiseAbs().maxCoeff());
    return worst;
}

GridRecord run_one_grid(const ProblemSpec& spec, int n_nodes) {
    GridRecord rec;
    rec.n_nodes = n_nodes;

    const Grid grid = make_grid(spec.a, spec.b, n_nodes);
    rec.t = grid.nodes;
    const KernelSpec kspec = kernel_from_spec(spec);
    const KernelTable table = sample_kernel(kspec, grid);
    const VectorTable f = sample_rhs(grid, rhs_from_spec(spec));

    try {
        const DirectSolve oracle = solve_full(table, f);
        rec.phi_oracle = oracle.phi;
        rec.oracle_residual = oracle.relative_residual;
        rec.oracle_condition = oracle.condition_estimate;
    } catch (const NoUniqueSolutionError& e) {
        rec.solver_inapplicable = true;
        rec.error = e.what();
        return rec;
    }

    try {
        switch (spec.solver) {
            case SolverKind::Nystrom: {
                rec.phi = rec.phi_oracle;
                break;
            }
            case SolverKind::Resolvent35: {
                const DirectSolve sol = solve_via_resolvent(table, f);
                rec.phi = sol.phi;
                const std::vector<ResolventTable> family = resolvent_family(table);
                double d1 = 0.0, d2 = 0.0;
                for (const ResolventTable& rt : family) {
                    d1 = std::max(d1, rt.defining_residual);
                    d2 = std::max(d2, rt.second_form_residual);
                }
                rec.resolvent_defining_residual = d1;
                rec.resolvent_second_form_residual = d2;
                if (n_nodes >= 3)
                    rec.resolvent_evolution_residual =
                        resolvent_evolution_residual(family, grid.h);
                break;
            }
            case SolverKind::Krein34:
            case SolverKind::Theorem41: {
                const TruncatedFamily fam = build_family(table);
                const Accumulator acc = build_accumulator(fam);
                rec.condition_37_min = check_invertibility(acc).min_abs_det;
                rec.accumulator_route_gap = acc.route_gap;

                const std::vector<ResolventTable> resolvents = resolvent_family(table);
                double d1 = 0.0, d2 = 0.0;
                for (const ResolventTable& rt : resolvents) {
                    d1 = std::max(d1, rt.defining_residual);
                    d2 = std::max(d2, rt.second_form_residual);
                }
                rec.resolvent_defining_residual = d1;
                rec.resolvent_second_form_residual = d2;
                rec.resolvent_evolution_residual =
                    resolvent_evolution_residual(resolvents, grid.h);
                rec.representation_gap = representation_gap(fam, resolvents);
                rec.family_derivative_residual = family_derivative_residual(fam, resolvents);

                if (spec.solver == SolverKind::Theorem41) {
                    rec.symmetry_gap = symmetry_gap(fam, table);
                    rec.liouville_gap = liouville_check(fam, resolvents).max_rel_gap;
                }

                const KreinSolution sol = krein_solve(fam, acc, f);
                rec.phi = sol.phi.samples;
                break;
            }
            case SolverKind::Theorem42: {
                const double half = 0.5 * (spec.b - spec.a);
                const Grid centered = make_grid(-half, half, n_nodes);
                const CenteredFamily fam = build_centered_family(kspec, centered);
                rec.evenness_gap = fam.evenness_gap;
                double dmin = std::numeric_limits<double>::infinity();
                for (const Complex& d : fam.det_M_prime)
                    dmin = std::min(dmin, std::abs(d));
                rec.det_m_prime_min = dmin;

                VectorTable fc;
                fc.grid = centered;
                fc.samples = f.samples;
                std::vector<ColVec> fp;
                const std::vector<ColVec>* fp_ptr = nullptr;
                if (auto dfn = rhs_derivative_from_spec(spec)) {
                    const double shift = 0.5 * (spec.a + spec.b);
                    fp.reserve(n_nodes);
                    for (int i = 0; i < n_nodes; ++i)
                        fp.push_back(dfn(centered.nodes[i] + shift));
                    fp_ptr = &fp;
                }
                const VectorTable phi_c = solve_centered(fam, fc, fp_ptr);
                rec.phi = phi_c.samples;
                break;
            }
        }
    } catch (const NoUniqueSolutionError& e) {
        rec.solver_inapplicable = true;
        rec.error = e.what();
        return rec;
    } catch (const KreinInapplicableError& e) {
        rec.solver_inapplicable = true;
        rec.error = e.what();
        return rec;
    }

    rec.residual_full = residual_of_full_equation(table, f, rec.phi);
    rec.sup_gap_vs_oracle = sup_gap(rec.phi, rec.phi_oracle);
    const double denom = sup_norm(rec.phi_oracle);
    rec.rel_sup_gap_vs_oracle =
        denom > 0.0 ? *rec.sup_gap_vs_oracle / denom : *rec.sup_gap_vs_oracle;
    rec.ok = true;
    return rec;
}

}  // namespace

std::optional<double> estimated_order(double err_coarse, double err_fine,
                                      double h_coarse, double h_fine) {
    constexpr double kFloor = 1e-13;
    if (!(h_coarse > h_fine) || !(h_fine > 0.0)) return std::nullopt;
    if (err_coarse <= kFloor || err_fine <= kFloor) return std::nullopt;
    return std::log(err_coarse / err_fine) / std::log(h_coarse / h_fine);
}

RunReport run(const ProblemSpec& spec) {
    RunReport report;
    report.spec = spec;

    // grid sizes are independent studies; run them concurrently
    std::vector<std::future<GridRecord>> futures;
    futures.reserve(spec.grid_sizes.size());
    for (int n_nodes : spec.grid_sizes)
        futures.push_back(std::async(std::launch::async, run_one_grid, spec, n_nodes));
    for (auto& fu : futures)
        report.records.push_back(fu.get());

    report.all_ok = std::all_of(report.records.begin(), report.records.end(),
                                [](const GridRecord& r) { return r.ok; });
    report.any_solver_inapplicable =
        std::any_of(report.records.begin(), report.records.end(),
                    [](const GridRecord& r) { return r.solver_inapplicable; });

    // Richardson orders between successive grids
    for (std::size_t k = 0; k + 1 < report.records.size(); ++k) {
        const GridRecord& coarse = report.records[k];
        const GridRecord& fine = report.records[k + 1];
        std::optional<double> order;
        const double h_coarse = (spec.b - spec.a) / (coarse.n_nodes - 1);
        const double h_fine = (spec.b - spec.a) / (fine.n_nodes - 1);
        if (coarse.ok && fine.ok) {
            if (spec.solver == SolverKind::Nystrom) {
                // self-differences at shared nodes when the grids nest
                if (fine.n_nodes == 2 * coarse.n_nodes - 1 && report.records.size() > k + 2) {
                    const GridRecord& finest = report.records[k + 2];
                    if (finest.ok && finest.n_nodes == 2 * fine.n_nodes - 1) {
                        double e1 = 0.0, e2 = 0.0;
                        for (int i = 0; i < coarse.n_nodes; ++i)
                            e1 = std::max(e1, (coarse.phi[i] - fine.phi[2 * i])
                                                  .cwiseAbs()
                                                  .maxCoeff());
                        for (int i = 0; i < fine.n_nodes; ++i)
                            e2 = std::max(e2, (fine.phi[i] - finest.phi[2 * i])
                                                  .cwiseAbs()
                                                  .maxCoeff());
                        order = estimated_order(e1, e2, h_coarse, h_fine);
                    }
                }
            } else if (coarse.sup_gap_vs_oracle && fine.sup_gap_vs_oracle) {
                order = estimated_order(*coarse.sup_gap_vs_oracle, *fine.sup_gap_vs_oracle,
                                        h_coarse, h_fine);
            }
        }
        report.orders.push_back(order);
    }
    return report;
}

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_opt(const std::optional<double>& v) {
    return v ? fmt17(*v) : std::string();
}

json json_opt(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

json solution_json(const GridRecord& rec) {
    json rows = json::array();
    for (std::size_t i = 0; i < rec.phi.size(); ++i) {
        json comps = json::array();
        for (Eigen::Index k = 0; k < rec.phi[i].size(); ++k)
            comps.push_back({rec.phi[i](k).real(), rec.phi[i](k).imag()});
        rows.push_back({{"t", rec.t[i]}, {"phi", comps}});
    }
    return rows;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << contents;
    if (!out)
        throw IoError("write failed for " + path.string());
}

}  // namespace

void emit(const RunReport& report, const std::string& out_dir, OutputFormat format) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

    const int m = report.spec.block_dim;

    if (format == OutputFormat::Csv) {
        std::string sol = "grid_size,t";
        for (int k = 1; k <= m; ++k)
            sol += ",re_phi_" + std::to_string(k) + ",im_phi_" + std::to_string(k);
        sol += "\n";
        for (const GridRecord& rec : report.records) {
            for (std::size_t i = 0; i < rec.phi.size(); ++i) {
                sol += std::to_string(rec.n_nodes) + "," + fmt17(rec.t[i]);
                for (Eigen::Index k = 0; k < rec.phi[i].size(); ++k)
                    sol += "," + fmt17(rec.phi[i](k).real()) + "," +
                           fmt17(rec.phi[i](k).imag());
                sol += "\n";
            }
        }
        write_file(fs::path(out_dir) / "solution.csv", sol);

        std::string sum =
            "grid_size,status,residual_full,oracle_residual,sup_gap_vs_oracle,"
            "rel_sup_gap_vs_oracle,condition_37_min,resolvent_defining_residual,"
            "resolvent_second_form_residual,resolvent_evolution_residual,"
            "representation_gap,family_derivative_residual,accumulator_route_gap,"
            "symmetry_gap,liouville_gap,det_m_prime_min,evenness_gap,order_vs_prev,error\n";
        for (std::size_t r = 0; r < report.records.size(); ++r) {
            const GridRecord& rec = report.records[r];
            std::optional<double> order;
            if (r > 0 && r - 1 < report.orders.size()) order = report.orders[r - 1];
            sum += std::to_string(rec.n_nodes);
            sum += rec.ok ? ",ok" : ",error";
            sum += "," + csv_opt(rec.residual_full);
            sum += "," + csv_opt(rec.oracle_residual);
            sum += "," + csv_opt(rec.sup_gap_vs_oracle);
            sum += "," + csv_opt(rec.rel_sup_gap_vs_oracle);
            sum += "," + csv_opt(rec.condition_37_min);
            sum += "," + csv_opt(rec.resolvent_defining_residual);
            sum += "," + csv_opt(rec.resolvent_second_form_residual);
            sum += "," + csv_opt(rec.resolvent_evolution_residual);
            sum += "," + csv_opt(rec.representation_gap);
            sum += "," + csv_opt(rec.family_derivative_residual);
            sum += "," + csv_opt(rec.accumulator_route_gap);
            sum += "," + csv_opt(rec.symmetry_gap);
            sum += "," + csv_opt(rec.liouville_gap);
            sum += "," + csv_opt(rec.det_m_prime_min);
            sum += "," + csv_opt(rec.evenness_gap);
            sum += "," + (order ? fmt17(*order) : std::string());
            std::string err = rec.error;
            std::replace(err.begin(), err.end(), ',', ';');
            sum += "," + err + "\n";
        }
        write_file(fs::path(out_dir) / "summary.csv", sum);
        return;
    }

    json doc;
    doc["problem"] = {
        {"interval", {report.spec.a, report.spec.b}},
        {"kernel", report.spec.kernel_name},
        {"block_dim", report.spec.block_dim},
        {"solver", solver_name(report.spec.solver)},
        {"grids", report.spec.grid_sizes},
        {"output", report.spec.output_dir},
    };
    json grids = json::array();
    for (const GridRecord& rec : report.records) {
        json g;
        g["n_nodes"] = rec.n_nodes;
        g["status"] = rec.ok ? "ok" : "error";
        g["error"] = rec.error.empty() ? json(nullptr) : json(rec.error);
        g["residual_full"] = json_opt(rec.residual_full);
        g["oracle_residual"] = json_opt(rec.oracle_residual);
        g["oracle_condition"] = json_opt(rec.oracle_condition);
        g["sup_gap_vs_oracle"] = json_opt(rec.sup_gap_vs_oracle);
        g["rel_sup_gap_vs_oracle"] = json_opt(rec.rel_sup_gap_vs_oracle);
        g["condition_37_min"] = json_opt(rec.condition_37_min);
        g["resolvent_defining_residual"] = json_opt(rec.resolvent_defining_residual);
        g["resolvent_second_form_residual"] = json_opt(rec.resolvent_second_form_residual);
        g["resolvent_evolution_residual"] = json_opt(rec.resolvent_evolution_residual);
        g["representation_gap"] = json_opt(rec.representation_gap);
        g["family_derivative_residual"] = json_opt(rec.family_derivative_residual);
        g["accumulator_route_gap"] = json_opt(rec.accumulator_route_gap);
        g["symmetry_gap"] = json_opt(rec.symmetry_gap);
        g["liouville_gap"] = json_opt(rec.liouville_gap);
        g["det_m_prime_min"] = json_opt(rec.det_m_prime_min);
        g["evenness_gap"] = json_opt(rec.evenness_gap);
        g["solution"] = solution_json(rec);
        grids.push_back(std::move(g));
    }
    doc["grids"] = std::move(grids);
    json orders = json::array();
    for (const auto& o : report.orders)
        orders.push_back(json_opt(o));
    doc["orders"] = std::move(orders);

    write_file(std::filesystem::path(out_dir) / "report.json", doc.dump(2) + "\n");
}

}  // namespace krein
