#include "krein/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "krein/errors.hpp"

namespace krein {

std::string solver_name(SolverKind s) {
    switch (s) {
        case SolverKind::Nystrom: return "nystrom";
        case SolverKind::Resolvent35: return "resolvent_35";
        case SolverKind::Krein34: return "krein_34";
        case SolverKind::Theorem41: return "theorem_4_1";
        case SolverKind::Theorem42: return "theorem_4_2";
    }
    return "?";
}

SolverKind solver_from_name(const std::string& name) {
    if (name == "nystrom") return SolverKind::Nystrom;
    if (name == "resolvent_35") return SolverKind::Resolvent35;
    if (name == "krein_34") return SolverKind::Krein34;
    if (name == "theorem_4_1") return SolverKind::Theorem41;
    if (name == "theorem_4_2") return SolverKind::Theorem42;
    throw SpecError("unknown solver '" + name +
                    "' (expected nystrom, resolvent_35, krein_34, theorem_4_1 or theorem_4_2)");
}

std::string format_name(OutputFormat f) {
    return f == OutputFormat::Csv ? "csv" : "json";
}

OutputFormat format_from_name(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw SpecError("unknown format '" + name + "' (expected csv or json)");
}

bool ProblemSpec::operator==(const ProblemSpec& other) const {
    auto opt_eq = [](const std::optional<Expression>& x, const std::optional<Expression>& y) {
        if (x.has_value() != y.has_value()) return false;
        return !x.has_value() || *x == *y;
    };
    return a == other.a && b == other.b && kernel_name == other.kernel_name &&
           c == other.c && zero_dim == other.zero_dim && opt_eq(h1, other.h1) &&
           opt_eq(h2, other.h2) && opt_eq(h, other.h) && rhs == other.rhs &&
           rhs_derivative == other.rhs_derivative && grid_sizes == other.grid_sizes &&
           solver == other.solver && format == other.format &&
           output_dir == other.output_dir && block_dim == other.block_dim;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, int line, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || !std::isfinite(v))
        throw SpecError("value of '" + key + "' is not a finite number: '" + text + "'", line);
    return v;
}

int parse_int(const std::string& text, int line, const std::string& key) {
    char* end = nullptr;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0')
        throw SpecError("value of '" + key + "' is not an integer: '" + text + "'", line);
    return static_cast<int>(v);
}

std::vector<std::string> split_items(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == ' ' || ch == '\t' || ch == ',') {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

Expression parse_expr_or_rethrow(const std::string& text, int line, const std::string& key) {
    try {
        return Expression::parse(text);
    } catch (const SpecError& e) {
        throw SpecError("in '" + key + "': " + e.what(), line, e.column());
    }
}

struct RawEntry {
    std::string value;
    int line;
};

}  // namespace

ProblemSpec parse_problem(const std::string& text) {
    std::map<std::string, RawEntry> top, kernel, rhs;
    std::string section;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw SpecError("malformed section header", lineno);
            section = trim(line.substr(1, line.size() - 2));
            if (section != "kernel" && section != "rhs")
                throw SpecError("unknown section '[" + section + "]'", lineno);
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw SpecError("expected 'key = value'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw SpecError("empty key", lineno);

        auto& dest = section.empty() ? top : (section == "kernel" ? kernel : rhs);
        if (dest.count(key))
            throw SpecError("duplicate key '" + key + "'", lineno);
        dest[key] = {value, lineno};
    }

    ProblemSpec spec;

    // ---- top level ----
    for (const auto& [key, entry] : top) {
        if (key == "interval") {
            const auto items = split_items(entry.value);
            if (items.size() != 2)
                throw SpecError("'interval' needs two endpoints", entry.line);
            spec.a = parse_double(items[0], entry.line, "interval");
            spec.b = parse_double(items[1], entry.line, "interval");
        } else if (key == "solver") {
            try {
                spec.solver = solver_from_name(entry.value);
            } catch (const SpecError& e) {
                throw SpecError(e.what(), entry.line);
            }
        } else if (key == "grids") {
            for (const auto& item : split_items(entry.value))
                spec.grid_sizes.push_back(parse_int(item, entry.line, "grids"));
        } else if (key == "format") {
            try {
                spec.format = format_from_name(entry.value);
            } catch (const SpecError& e) {
                throw SpecError(e.what(), entry.line);
            }
        } else if (key == "output") {
            spec.output_dir = entry.value;
        } else {
            throw SpecError("unknown key '" + key + "'", entry.line);
        }
    }
    if (!top.count("interval"))
        throw SpecError("missing 'interval'");
    if (!top.count("solver"))
        throw SpecError("missing 'solver'");
    if (spec.grid_sizes.empty())
        throw SpecError("missing or empty 'grids'");

    // ---- kernel ----
    if (!kernel.count("name"))
        throw SpecError("missing 'name' in [kernel]");
    spec.kernel_name = kernel.at("name").value;

    auto reject_unknown_kernel_keys = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [key, entry] : kernel) {
            if (key == "name") continue;
            if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
                    return key == a;
                }) == allowed.end())
                throw SpecError("key '" + key + "' is not valid for kernel '" +
                                    spec.kernel_name + "'",
                                entry.line);
        }
    };

    if (spec.kernel_name == "zero") {
        reject_unknown_kernel_keys({"m"});
        if (kernel.count("m"))
            spec.zero_dim = parse_int(kernel.at("m").value, kernel.at("m").line, "m");
        if (spec.zero_dim < 1)
            throw SpecError("kernel 'zero' needs m >= 1");
        spec.block_dim = spec.zero_dim;
    } else if (spec.kernel_name == "constant_scalar") {
        reject_unknown_kernel_keys({"c", "c_im"});
        if (!kernel.count("c"))
            throw SpecError("kernel 'constant_scalar' needs 'c'");
        double re = parse_double(kernel.at("c").value, kernel.at("c").line, "c");
        double im = 0.0;
        if (kernel.count("c_im"))
            im = parse_double(kernel.at("c_im").value, kernel.at("c_im").line, "c_im");
        spec.c = Complex(re, im);
        spec.block_dim = 1;
    } else if (spec.kernel_name == "separable_scalar") {
        reject_unknown_kernel_keys({});
        spec.block_dim = 1;
    } else if (spec.kernel_name == "antidiag_block") {
        reject_unknown_kernel_keys({"h1", "h2"});
        if (!kernel.count("h1") || !kernel.count("h2"))
            throw SpecError("kernel 'antidiag_block' needs 'h1' and 'h2'");
        spec.h1 = parse_expr_or_rethrow(kernel.at("h1").value, kernel.at("h1").line, "h1");
        spec.h2 = parse_expr_or_rethrow(kernel.at("h2").value, kernel.at("h2").line, "h2");
        spec.block_dim = 2;
    } else if (spec.kernel_name == "difference_scalar") {
        reject_unknown_kernel_keys({"h"});
        if (!kernel.count("h"))
            throw SpecError("kernel 'difference_scalar' needs 'h'");
        spec.h = parse_expr_or_rethrow(kernel.at("h").value, kernel.at("h").line, "h");
        spec.block_dim = 1;
    } else {
        throw SpecError("unknown kernel '" + spec.kernel_name + "'",
                        kernel.at("name").line);
    }

    // ---- rhs ----
    spec.rhs.resize(spec.block_dim);
    std::vector<bool> have_f(spec.block_dim, false), have_df(spec.block_dim, false);
    std::vector<Expression> dfs(spec.block_dim);
    for (const auto& [key, entry] : rhs) {
        const bool is_df = key.size() > 2 && key.compare(0, 2, "df") == 0;
        const bool is_f = !is_df && key.size() > 1 && key.front() == 'f';
        const std::string idx_text = is_df ? key.substr(2) : (is_f ? key.substr(1) : "");
        if (idx_text.empty() ||
            !std::all_of(idx_text.begin(), idx_text.end(),
                         [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
            throw SpecError("unknown key '" + key + "' in [rhs]", entry.line);
        const int idx = parse_int(idx_text, entry.line, key);
        if (idx < 1 || idx > spec.block_dim)
            throw SpecError("component index out of range in '" + key + "' (block dimension " +
                                std::to_string(spec.block_dim) + ")",
                            entry.line);
        if (is_df) {
            dfs[idx - 1] = parse_expr_or_rethrow(entry.value, entry.line, key);
            have_df[idx - 1] = true;
        } else {
            spec.rhs[idx - 1] = parse_expr_or_rethrow(entry.value, entry.line, key);
            have_f[idx - 1] = true;
        }
    }
    for (int k = 0; k < spec.block_dim; ++k)
        if (!have_f[k])
            throw SpecError("missing 'f" + std::to_string(k + 1) + "' in [rhs]");
    const int n_df = static_cast<int>(std::count(have_df.begin(), have_df.end(), true));
    if (n_df != 0) {
        if (n_df != spec.block_dim)
            throw SpecError("either give df<k> for every component or for none");
        spec.rhs_derivative = std::move(dfs);
    }

    validate_problem(spec);
    return spec;
}

void validate_problem(const ProblemSpec& spec) {
    if (!(spec.b > spec.a))
        throw SpecError("interval requires b > a");
    if (spec.grid_sizes.empty())
        throw SpecError("missing or empty 'grids'");
    for (int gs : spec.grid_sizes) {
        if (gs < 3)
            throw SpecError("grid sizes must be at least 3");
        if (spec.solver == SolverKind::Theorem42 && gs % 2 == 0)
            throw SpecError("solver theorem_4_2 needs odd grid sizes so 0 is a node");
        if (spec.solver == SolverKind::Theorem42 && gs < 5)
            throw SpecError("solver theorem_4_2 needs grid sizes of at least 5");
    }
    const bool difference_kernel =
        spec.kernel_name == "antidiag_block" || spec.kernel_name == "difference_scalar";
    if ((spec.solver == SolverKind::Theorem41 || spec.solver == SolverKind::Theorem42) &&
        !difference_kernel)
        throw SpecError("solver " + solver_name(spec.solver) +
                        " needs an even difference kernel (antidiag_block or difference_scalar)");
}

std::string serialize_problem(const ProblemSpec& spec) {
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };

    std::ostringstream out;
    out << "interval = " << num(spec.a) << " " << num(spec.b) << "\n";
    out << "solver = " << solver_name(spec.solver) << "\n";
    out << "grids =";
    for (int gs : spec.grid_sizes) out << " " << gs;
    out << "\n";
    out << "format = " << format_name(spec.format) << "\n";
    out << "output = " << spec.output_dir << "\n\n";

    out << "[kernel]\n";
    out << "name = " << spec.kernel_name << "\n";
    if (spec.kernel_name == "zero" && spec.zero_dim != 1)
        out << "m = " << spec.zero_dim << "\n";
    if (spec.kernel_name == "constant_scalar") {
        out << "c = " << num(spec.c.real()) << "\n";
        if (spec.c.imag() != 0.0)
            out << "c_im = " << num(spec.c.imag()) << "\n";
    }
    if (spec.h1) out << "h1 = " << spec.h1->source() << "\n";
    if (spec.h2) out << "h2 = " << spec.h2->source() << "\n";
    if (spec.h) out << "h = " << spec.h->source() << "\n";

    out << "\n[rhs]\n";
    for (std::size_t k = 0; k < spec.rhs.size(); ++k)
        out << "f" << (k + 1) << " = " << spec.rhs[k].source() << "\n";
    for (std::size_t k = 0; k < spec.rhs_derivative.size(); ++k)
        out << "df" << (k + 1) << " = " << spec.rhs_derivative[k].source() << "\n";
    return out.str();
}

KernelSpec kernel_from_spec(const ProblemSpec& spec) {
    CatalogParams params;
    params.c = spec.c;
    params.block_dim = spec.zero_dim;
    if (spec.h1) params.h1 = [e = *spec.h1](double u) { return e(u); };
    if (spec.h2) params.h2 = [e = *spec.h2](double u) { return e(u); };
    if (spec.h) params.h = [e = *spec.h](double u) { return e(u); };
    return catalog(spec.kernel_name, params);
}

std::function<ColVec(double)> rhs_from_spec(const ProblemSpec& spec) {
    return [exprs = spec.rhs](double t) {
        ColVec v(exprs.size());
        for (std::size_t k = 0; k < exprs.size(); ++k)
            v(static_cast<Eigen::Index>(k)) = exprs[k](t);
        return v;
    };
}

std::function<ColVec(double)> rhs_derivative_from_spec(const ProblemSpec& spec) {
    if (spec.rhs_derivative.empty())
        return nullptr;
    return [exprs = spec.rhs_derivative](double t) {
        ColVec v(exprs.size());
        for (std::size_t k = 0; k < exprs.size(); ++k)
            v(static_cast<Eigen::Index>(k)) = exprs[k](t);
        return v;
    };
}

}  // namespace krein
