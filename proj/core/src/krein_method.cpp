#include "krein/krein_method.hpp"

#include <cmath>
#include <limits>

#include "linalg_detail.hpp"

namespace krein {

namespace {

constexpr double kDetTol = 1e-10;

Eigen::MatrixXcd identity_stack(int nb, int m) {
    Eigen::MatrixXcd rhs(nb * m, m);
    for (int i = 0; i < nb; ++i)
        rhs.middleRows(i * m, m) = Block::Identity(m, m);
    return rhs;
}

}  // namespace

TruncatedFamily::TruncatedFamily(Grid grid, int block_dim)
    : grid_(std::move(grid)), block_dim_(block_dim) {
    const std::size_t n = static_cast<std::size_t>(grid_.n());
    g_.assign(n * (n + 1) / 2, Block());
    g_star_.assign(n * (n + 1) / 2, Block());
}

std::size_t TruncatedFamily::index(int i, int j) const {
    return static_cast<std::size_t>(j) * (j + 1) / 2 + i;
}

TruncatedFamily build_family(const KernelTable& K) {
    const int n = K.grid.n();
    const int m = K.block_dim;
    TruncatedFamily fam(K.grid, m);

    for (int j = 0; j < n; ++j) {
        const QuadratureWeights qw = prefix_weights(K.grid, j);
        const int nb = j + 1;
        const Eigen::MatrixXcd rhs = identity_stack(nb, m);

        const Eigen::MatrixXcd A = detail::assemble_truncated(K, j, qw);
        auto fa = detail::factor_or_throw(A, K.grid.nodes[j], j, "build_family");
        const Eigen::MatrixXcd G = fa.lu.solve(rhs);
        fam.solve_residual = std::max(fam.solve_residual, detail::max_abs(A * G - rhs));

        const Eigen::MatrixXcd B = detail::assemble_truncated_star(K, j, qw);
        auto fb = detail::factor_or_throw(B, K.grid.nodes[j], j, "build_family");
        const Eigen::MatrixXcd S = fb.lu.solve(rhs);
        fam.solve_residual = std::max(fam.solve_residual, detail::max_abs(B * S - rhs));

        for (int i = 0; i <= j; ++i) {
            fam.g(i, j) = G.middleRows(i * m, m);
            fam.g_star(i, j) = S.middleRows(i * m, m).transpose();
        }
    }
    return fam;
}

double family_derivative_residual(const TruncatedFamily& fam,
                                  const std::vector<ResolventTable>& resolvents) {
    const int n = fam.grid().n();
    if (n < 3)
        throw std::invalid_argument("family_derivative_residual: need at least 3 xi nodes");
    if (static_cast<int>(resolvents.size()) != n)
        throw std::invalid_argument("family_derivative_residual: resolvent family size mismatch");

    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        if (n - i < 3) continue;
        std::vector<Block> gv, sv;
        gv.reserve(n - i);
        sv.reserve(n - i);
        for (int j = i; j < n; ++j) {
            gv.push_back(fam.g(i, j));
            sv.push_back(fam.g_star(i, j));
        }
        const std::vector<Block> dg = grid_derivative(gv, fam.grid().h);
        const std::vector<Block> ds = grid_derivative(sv, fam.grid().h);
        for (int j = i; j < n; ++j) {
            // d/dxi g(t,xi)     = Gamma_xi(t,xi) g(xi,xi)
            // d/dxi gstar(t,xi) = gstar(xi,xi) Gamma_xi(xi,t)
            // (the corner arguments follow from differentiating the integral
            // representations; they are mirrored between the two families)
            const Block rhs_g = resolvents[j].at(i, j) * fam.g(j, j);
            const Block rhs_s = fam.g_star(j, j) * resolvents[j].at(j, i);
            worst = std::max(worst, detail::max_abs(dg[j - i] - rhs_g));
            worst = std::max(worst, detail::max_abs(ds[j - i] - rhs_s));
        }
    }
    return worst;
}

double representation_gap(const TruncatedFamily& fam,
                          const std::vector<ResolventTable>& resolvents) {
    const int n = fam.grid().n();
    if (static_cast<int>(resolvents.size()) != n)
        throw std::invalid_argument("representation_gap: resolvent family size mismatch");
    const int m = fam.block_dim();
    const Block eye = Block::Identity(m, m);

    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        const QuadratureWeights pw = prefix_weights(fam.grid(), j);
        for (int i = 0; i <= j; ++i) {
            Block row_int = Block::Zero(m, m);
            Block col_int = Block::Zero(m, m);
            for (int s = 0; s <= j; ++s) {
                row_int += pw.w[s] * resolvents[j].at(i, s);
                col_int += pw.w[s] * resolvents[j].at(s, i);
            }
            worst = std::max(worst, detail::max_abs(fam.g(i, j) - eye - row_int));
            worst = std::max(worst, detail::max_abs(fam.g_star(i, j) - eye - col_int));
        }
    }
    return worst;
}

Accumulator build_accumulator(const TruncatedFamily& fam) {
    const int n = fam.grid().n();
    const int m = fam.block_dim();

    Accumulator acc;
    acc.M.reserve(n);
    acc.M_prime.reserve(n);
    acc.det_M_prime.reserve(n);

    for (int j = 0; j < n; ++j) {
        const QuadratureWeights pw = prefix_weights(fam.grid(), j);
        Block mj = Block::Zero(m, m);
        for (int i = 0; i <= j; ++i)
            mj += pw.w[i] * fam.g(i, j);
        acc.M.push_back(std::move(mj));

        Block mp = fam.g_star(j, j) * fam.g(j, j);
        acc.det_M_prime.push_back(mp.determinant());
        acc.M_prime.push_back(std::move(mp));
    }

    // alternate route: M as the running integral of M'
    double gap = 0.0;
    for (int j = 0; j < n; ++j) {
        const QuadratureWeights pw = prefix_weights(fam.grid(), j);
        Block alt = Block::Zero(m, m);
        for (int i = 0; i <= j; ++i)
            alt += pw.w[i] * acc.M_prime[i];
        gap = std::max(gap, detail::max_abs(acc.M[j] - alt));
    }
    acc.route_gap = gap;

    double scale = 0.0;
    for (const Block& mp : acc.M_prime)
        scale = std::max(scale, detail::max_abs(mp));
    acc.det_threshold = kDetTol * std::pow(std::max(scale, 1e-300), m);
    acc.invertible.reserve(n);
    for (const Complex& d : acc.det_M_prime)
        acc.invertible.push_back(std::abs(d) > acc.det_threshold);
    return acc;
}

InvertibilityReport check_invertibility(const Accumulator& acc) {
    InvertibilityReport rep;
    rep.threshold = acc.det_threshold;
    rep.pass = true;
    rep.min_abs_det = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < acc.det_M_prime.size(); ++j) {
        rep.min_abs_det = std::min(rep.min_abs_det, std::abs(acc.det_M_prime[j]));
        if (!acc.invertible[j] && rep.pass) {
            rep.pass = false;
            rep.first_bad_index = static_cast<int>(j);
        }
    }
    return rep;
}

namespace {

struct Chain {
    std::vector<ColVec> u;   // u(xi)  = int_a^xi gstar(s,xi) f(s) ds
    std::vector<ColVec> du;  // d/dxi u
    std::vector<ColVec> w;   // [M'(xi)]^{-1} du(xi)
    std::vector<ColVec> dw;  // d/dxi w
};

Chain build_chain(const TruncatedFamily& fam, const Accumulator& acc,
                  const VectorTable& f) {
    const int n = fam.grid().n();
    Chain ch;
    ch.u.reserve(n);
    for (int j = 0; j < n; ++j) {
        const QuadratureWeights pw = prefix_weights(fam.grid(), j);
        ColVec acc_u = ColVec::Zero(fam.block_dim());
        for (int s = 0; s <= j; ++s)
            acc_u += pw.w[s] * (fam.g_star(s, j) * f.samples[s]);
        ch.u.push_back(std::move(acc_u));
    }
    ch.du = grid_derivative(ch.u, fam.grid().h);
    ch.w.reserve(n);
    for (int j = 0; j < n; ++j)
        ch.w.push_back(acc.M_prime[j].partialPivLu().solve(ch.du[j]));
    ch.dw = grid_derivative(ch.w, fam.grid().h);
    return ch;
}

void require_invertibility(const TruncatedFamily& fam, const Accumulator& acc) {
    const InvertibilityReport rep = check_invertibility(acc);
    if (!rep.pass) {
        const int j = rep.first_bad_index;
        throw KreinInapplicableError(
            "Krein formula inapplicable: det M'(xi) = " +
                std::to_string(std::abs(acc.det_M_prime[j])) +
                " below threshold at xi = " + std::to_string(fam.grid().nodes[j]) +
                " (node " + std::to_string(j) + ")",
            fam.grid().nodes[j], j);
    }
}

}  // namespace

KreinSolution krein_solve(const TruncatedFamily& fam, const Accumulator& acc,
                          const VectorTable& f) {
    const int n = fam.grid().n();
    if (f.grid.n() != n)
        throw std::invalid_argument("krein_solve: rhs grid mismatch");
    if (f.block_dim() != fam.block_dim())
        throw std::invalid_argument("krein_solve: rhs component count mismatch");
    require_invertibility(fam, acc);

    const Chain ch = build_chain(fam, acc, f);
    const int last = n - 1;

    KreinSolution sol;
    sol.condition_ok = true;
    sol.min_abs_det_M_prime = check_invertibility(acc).min_abs_det;
    sol.phi.grid = sol.J1.grid = sol.J2.grid = fam.grid();
    sol.phi.samples.resize(n);
    sol.J1.samples.resize(n);
    sol.J2.samples.resize(n);

    for (int i = 0; i < n; ++i) {
        // boundary term: g(t,b) [M'(b)]^{-1} [d/dxi u]_{xi=b}
        sol.J1.samples[i] = fam.g(i, last) * ch.w[last];

        // outer integral: - int_t^b g(t,xi) d/dxi{[M'(xi)]^{-1} d/dxi u} dxi
        const QuadratureWeights sw = suffix_weights(fam.grid(), i);
        ColVec acc_j2 = ColVec::Zero(fam.block_dim());
        for (int j = i; j < n; ++j)
            acc_j2 -= sw.w[j - i] * (fam.g(i, j) * ch.dw[j]);
        sol.J2.samples[i] = std::move(acc_j2);

        sol.phi.samples[i] = sol.J1.samples[i] + sol.J2.samples[i];
    }
    return sol;
}

VectorTable krein_solve_scalar_order(const TruncatedFamily& fam, const Accumulator& acc,
                                     const VectorTable& f) {
    if (fam.block_dim() != 1)
        throw std::invalid_argument("krein_solve_scalar_order: scalar problems only");
    require_invertibility(fam, acc);

    const int n = fam.grid().n();
    const int last = n - 1;
    const Chain ch = build_chain(fam, acc, f);

    VectorTable phi;
    phi.grid = fam.grid();
    phi.samples.resize(n);
    for (int i = 0; i < n; ++i) {
        // same arithmetic with the boundary bracket written on the left
        ColVec j1 = ColVec::Zero(1);
        j1(0) = ch.w[last](0) * fam.g(i, last)(0, 0);

        const QuadratureWeights sw = suffix_weights(fam.grid(), i);
        Complex j2 = 0.0;
        for (int j = i; j < n; ++j)
            j2 -= sw.w[j - i] * (fam.g(i, j)(0, 0) * ch.dw[j](0));
        phi.samples[i] = j1;
        phi.samples[i](0) += j2;
    }
    return phi;
}

}  // namespace krein
