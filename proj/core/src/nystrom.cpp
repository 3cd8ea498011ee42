#include "krein/nystrom.hpp"

#include <cmath>
#include <limits>

#include "linalg_detail.hpp"

namespace krein {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_shared_grid(const KernelTable& K, const VectorTable& f) {
    if (K.grid.n() != f.grid.n() || K.grid.a != f.grid.a || K.grid.b != f.grid.b)
        throw std::invalid_argument("kernel and right-hand side must share a grid");
    if (f.block_dim() != K.block_dim)
        throw std::invalid_argument("kernel block dimension and rhs component count differ");
}

Eigen::VectorXcd stack(const std::vector<ColVec>& v, int upto) {
    const int m = static_cast<int>(v.front().size());
    Eigen::VectorXcd out(static_cast<Eigen::Index>(upto + 1) * m);
    for (int i = 0; i <= upto; ++i)
        out.segment(i * m, m) = v[i];
    return out;
}

DirectSolve solve_prefix(const KernelTable& K, const VectorTable& f, int j) {
    const int m = K.block_dim;
    const Grid& grid = K.grid;

    DirectSolve out;
    out.xi_index = j;

    if (j == 0) {
        // degenerate truncation: the integral is empty and phi(a) = f(a)
        out.phi = {f.samples[0]};
        return out;
    }

    const QuadratureWeights qw = prefix_weights(grid, j);
    const Eigen::MatrixXcd A = detail::assemble_truncated(K, j, qw);
    auto fac = detail::factor_or_throw(A, grid.nodes[j], j, "solve");
    out.condition_estimate = fac.condition;

    const Eigen::VectorXcd rhs = stack(f.samples, j);
    const Eigen::VectorXcd x = fac.lu.solve(rhs);

    out.phi.reserve(j + 1);
    for (int i = 0; i <= j; ++i)
        out.phi.push_back(x.segment(i * m, m));

    out.residual = (A * x - rhs).cwiseAbs().maxCoeff();
    const double phi_norm = x.cwiseAbs().maxCoeff();
    const double f_norm = rhs.cwiseAbs().maxCoeff();
    const double scale =
        f_norm + K.max_abs() * (grid.nodes[j] - grid.a) * phi_norm + phi_norm * kEps;
    out.relative_residual = scale > 0.0 ? out.residual / scale : out.residual;
    return out;
}

}  // namespace

DirectSolve solve_full(const KernelTable& K, const VectorTable& f) {
    check_shared_grid(K, f);
    return solve_prefix(K, f, K.grid.n() - 1);
}

DirectSolve solve_truncated(const KernelTable& K, const VectorTable& f, int xi_index) {
    check_shared_grid(K, f);
    if (xi_index < 0 || xi_index >= K.grid.n())
        throw std::invalid_argument("solve_truncated: xi_index out of range");
    return solve_prefix(K, f, xi_index);
}

ResolventTable resolvent(const KernelTable& K, int xi_index) {
    const int m = K.block_dim;
    const Grid& grid = K.grid;
    if (xi_index < 0 || xi_index >= grid.n())
        throw std::invalid_argument("resolvent: xi_index out of range");

    const int nb = xi_index + 1;
    ResolventTable table;
    table.xi_index = xi_index;
    table.block_dim = m;
    table.blocks.assign(static_cast<std::size_t>(nb) * nb, Block());

    const QuadratureWeights qw = prefix_weights(grid, xi_index);

    // K restricted to the prefix square, in scalar layout
    Eigen::MatrixXcd Kmat(nb * m, nb * m);
    for (int p = 0; p < nb; ++p)
        for (int q = 0; q < nb; ++q)
            Kmat.block(p * m, q * m, m, m) = K.at(p, q);

    Eigen::MatrixXcd G;
    if (xi_index == 0) {
        // empty integral: Gamma_a(a,a) = K(a,a)
        G = Kmat;
        table.defining_residual = 0.0;
        table.second_form_residual = 0.0;
    } else {
        const Eigen::MatrixXcd A = detail::assemble_truncated(K, xi_index, qw);
        auto fac = detail::factor_or_throw(A, grid.nodes[xi_index], xi_index, "resolvent");
        G = fac.lu.solve(Kmat);

        table.defining_residual = detail::max_abs(A * G - Kmat);
        // second form: Gamma - Gamma*W*K = K, verified not solved
        Eigen::MatrixXcd GW = G;
        for (int q = 0; q < nb; ++q)
            GW.middleCols(q * m, m) *= qw.w[q];
        table.second_form_residual = detail::max_abs(G - GW * Kmat - Kmat);
    }

    for (int p = 0; p < nb; ++p)
        for (int q = 0; q < nb; ++q)
            table.at(p, q) = G.block(p * m, q * m, m, m);

    const double scale = 1.0 + K.max_abs() + detail::max_abs(G);
    table.lu_tolerance = kEps * static_cast<double>(nb * m) * scale;
    return table;
}

std::vector<ResolventTable> resolvent_family(const KernelTable& K) {
    std::vector<ResolventTable> fam;
    fam.reserve(K.grid.n());
    for (int j = 0; j < K.grid.n(); ++j)
        fam.push_back(resolvent(K, j));
    return fam;
}

double resolvent_evolution_residual(const std::vector<ResolventTable>& family, double h) {
    const int n = static_cast<int>(family.size());
    if (n < 3)
        throw std::invalid_argument("resolvent_evolution_residual: need at least 3 xi nodes");

    double worst = 0.0;
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            const int j0 = std::max(p, q);
            if (n - j0 < 3) continue;  // not enough xi samples to differentiate
            std::vector<Block> vals;
            vals.reserve(n - j0);
            for (int j = j0; j < n; ++j)
                vals.push_back(family[j].at(p, q));
            const std::vector<Block> dv = grid_derivative(vals, h);
            for (int j = j0; j < n; ++j) {
                const Block rhs = family[j].at(p, j) * family[j].at(j, q);
                worst = std::max(worst, detail::max_abs(dv[j - j0] - rhs));
            }
        }
    }
    return worst;
}

double resolvent_evolution_residual(const KernelTable& K) {
    return resolvent_evolution_residual(resolvent_family(K), K.grid.h);
}

DirectSolve solve_via_resolvent(const KernelTable& K, const VectorTable& f) {
    check_shared_grid(K, f);
    const int n = K.grid.n();
    const int m = K.block_dim;
    const Grid& grid = K.grid;

    // Per-truncation slices: row xi of Gamma_xi (for the g step) and the
    // final column Gamma_xi(t, xi) (for the outer integral).  Tables are
    // dropped as soon as the slices are extracted.
    std::vector<std::vector<Block>> row_at_xi(n), col_at_xi(n);
    for (int j = 0; j < n; ++j) {
        const ResolventTable table = resolvent(K, j);
        row_at_xi[j].reserve(j + 1);
        col_at_xi[j].reserve(j + 1);
        for (int s = 0; s <= j; ++s) row_at_xi[j].push_back(table.at(j, s));
        for (int i = 0; i <= j; ++i) col_at_xi[j].push_back(table.at(i, j));
    }

    // g(t_i) = f(t_i) + int_a^{t_i} Gamma_{t_i}(t_i, s) f(s) ds
    std::vector<ColVec> g(n);
    for (int i = 0; i < n; ++i) {
        const QuadratureWeights pw = prefix_weights(grid, i);
        ColVec acc = f.samples[i];
        for (int s = 0; s <= i; ++s)
            acc += pw.w[s] * (row_at_xi[i][s] * f.samples[s]);
        g[i] = std::move(acc);
    }

    // phi(t_i) = g(t_i) + int_{t_i}^b Gamma_xi(t_i, xi) g(xi) dxi
    DirectSolve out;
    out.xi_index = n - 1;
    out.phi.resize(n);
    for (int i = 0; i < n; ++i) {
        const QuadratureWeights sw = suffix_weights(grid, i);
        ColVec acc = g[i];
        for (int j = i; j < n; ++j)
            acc += sw.w[j - i] * (col_at_xi[j][i] * g[j]);
        out.phi[i] = std::move(acc);
    }

    // residual and conditioning of the full system at the reconstructed phi
    const QuadratureWeights qw = prefix_weights(grid, n - 1);
    const Eigen::MatrixXcd A = detail::assemble_truncated(K, n - 1, qw);
    Eigen::VectorXcd x(static_cast<Eigen::Index>(n) * m), rhs(static_cast<Eigen::Index>(n) * m);
    for (int i = 0; i < n; ++i) {
        x.segment(i * m, m) = out.phi[i];
        rhs.segment(i * m, m) = f.samples[i];
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    out.condition_estimate = detail::condition_estimate(A, lu);
    out.residual = (A * x - rhs).cwiseAbs().maxCoeff();
    const double phi_norm = x.cwiseAbs().maxCoeff();
    const double f_norm = rhs.cwiseAbs().maxCoeff();
    const double scale = f_norm + K.max_abs() * (grid.b - grid.a) * phi_norm + phi_norm * kEps;
    out.relative_residual = scale > 0.0 ? out.residual / scale : out.residual;
    return out;
}

}  // namespace krein
