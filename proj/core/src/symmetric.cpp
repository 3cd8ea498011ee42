#include "krein/symmetric.hpp"

#include <cmath>

#include "linalg_detail.hpp"

namespace krein {

namespace {

constexpr double kDetTol = 1e-10;

void require_even_difference(const KernelTable& table) {
    if (table.kind != KernelSpec::Kind::Difference || !table.even)
        throw std::invalid_argument("operation requires an even difference kernel");
}

void require_even_difference(const KernelSpec& spec) {
    if (spec.kind != KernelSpec::Kind::Difference || !spec.even)
        throw std::invalid_argument("operation requires an even difference kernel");
}

Complex trace_of(const Block& b) {
    return b.trace();
}

}  // namespace

double symmetry_gap(const TruncatedFamily& fam, const KernelTable& table) {
    require_even_difference(table);
    const int n = fam.grid().n();
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            const int r = j - i;  // node index of a + xi_j - t_i
            worst = std::max(worst, detail::max_abs(fam.g(i, j) - fam.g(r, j)));
            worst = std::max(worst, detail::max_abs(fam.g_star(i, j) - fam.g_star(r, j)));
        }
    }
    return worst;
}

LiouvilleReport liouville_check(const TruncatedFamily& fam,
                                const std::vector<ResolventTable>& resolvents) {
    const int n = fam.grid().n();
    if (static_cast<int>(resolvents.size()) != n)
        throw std::invalid_argument("liouville_check: resolvent family size mismatch");

    LiouvilleReport rep;
    rep.det_g.reserve(n);
    rep.det_g_star.reserve(n);
    rep.exp_trace.reserve(n);
    rep.exp_trace_alt.reserve(n);

    std::vector<Complex> trace_corner(n), trace_corner_alt(n);
    for (int k = 0; k < n; ++k) {
        trace_corner[k] = trace_of(resolvents[k].at(k, 0));
        trace_corner_alt[k] = trace_of(resolvents[k].at(0, k));
    }

    rep.min_abs_det_g = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        rep.det_g.push_back(fam.g(j, j).determinant());
        rep.det_g_star.push_back(fam.g_star(j, j).determinant());
        rep.min_abs_det_g = std::min(rep.min_abs_det_g, std::abs(rep.det_g.back()));

        const QuadratureWeights pw = prefix_weights(fam.grid(), j);
        Complex acc = 0.0, acc_alt = 0.0;
        for (int k = 0; k <= j; ++k) {
            acc += pw.w[k] * trace_corner[k];
            acc_alt += pw.w[k] * trace_corner_alt[k];
        }
        rep.exp_trace.push_back(std::exp(acc));
        rep.exp_trace_alt.push_back(std::exp(acc_alt));

        const double scale = std::max(std::abs(rep.det_g.back()), 1e-300);
        rep.max_rel_gap = std::max(rep.max_rel_gap,
                                   std::abs(rep.det_g.back() - rep.exp_trace.back()) / scale);
        rep.max_rel_gap_alt =
            std::max(rep.max_rel_gap_alt,
                     std::abs(rep.det_g.back() - rep.exp_trace_alt.back()) / scale);
        rep.max_det_star_gap =
            std::max(rep.max_det_star_gap,
                     std::abs(rep.det_g.back() - rep.det_g_star.back()));
    }
    return rep;
}

KreinSolution solve_even_difference(const KernelSpec& H, const Grid& grid,
                                    const VectorTable& f) {
    require_even_difference(H);
    const KernelTable table = sample_kernel(H, grid);
    const TruncatedFamily fam = build_family(table);
    const Accumulator acc = build_accumulator(fam);
    return krein_solve(fam, acc, f);
}

CenteredFamily::CenteredFamily(Grid grid, int block_dim)
    : grid_(std::move(grid)), block_dim_(block_dim), center_((grid_.n() - 1) / 2) {
    const std::size_t cnt = static_cast<std::size_t>(center_ + 1) * (center_ + 1);
    q_.assign(cnt, Block());
}

std::size_t CenteredFamily::index(int k, int i) const {
    const int lo = center_ - k;
    return static_cast<std::size_t>(k) * k + (i - lo);
}

CenteredFamily build_centered_family(const KernelSpec& H, const Grid& centered_grid) {
    require_even_difference(H);
    const int n = centered_grid.n();
    if (n % 2 == 0)
        throw std::invalid_argument("build_centered_family: need an odd node count so 0 is a node");
    if (n < 5)
        throw std::invalid_argument("build_centered_family: need at least 5 nodes");
    if (std::abs(centered_grid.a + centered_grid.b) > 1e-12 * (centered_grid.b - centered_grid.a))
        throw std::invalid_argument("build_centered_family: grid must be centered at 0");

    const KernelTable K = sample_kernel(H, centered_grid);
    const int m = K.block_dim;
    CenteredFamily fam(centered_grid, m);
    const int c = fam.center();

    for (int k = 0; k <= c; ++k) {
        const int lo = c - k;
        const int nb = 2 * k + 1;

        QuadratureWeights ww;
        if (k == 0) {
            ww.w = {0.0};
        } else {
            ww.w.assign(nb, centered_grid.h);
            ww.w.front() = centered_grid.h / 2.0;
            ww.w.back() = centered_grid.h / 2.0;
        }

        Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(nb * m, nb * m);
        for (int p = 0; p < nb; ++p)
            for (int q = 0; q < nb; ++q)
                A.block(p * m, q * m, m, m) -= ww.w[q] * K.at(lo + p, lo + q);

        Eigen::MatrixXcd rhs(nb * m, m);
        for (int p = 0; p < nb; ++p)
            rhs.middleRows(p * m, m) = Block::Identity(m, m);

        const double xi = centered_grid.nodes[c + k];
        auto fac = detail::factor_or_throw(A, xi, k, "build_centered_family");
        const Eigen::MatrixXcd Q = fac.lu.solve(rhs);
        for (int p = 0; p < nb; ++p)
            fam.q(k, lo + p) = Q.middleRows(p * m, m);
    }

    // M(xi_k) = int_0^{xi_k} q(s, xi_k) ds over the non-negative half window
    const Grid xi_grid = make_grid(0.0, centered_grid.b, c + 1);
    fam.M.reserve(c + 1);
    for (int k = 0; k <= c; ++k) {
        const QuadratureWeights pw = prefix_weights(xi_grid, k);
        Block acc = Block::Zero(m, m);
        for (int i = 0; i <= k; ++i)
            acc += pw.w[i] * fam.q(k, c + i);
        fam.M.push_back(std::move(acc));
    }
    fam.M_prime = grid_derivative(fam.M, centered_grid.h);

    double scale = 0.0;
    for (const Block& mp : fam.M_prime)
        scale = std::max(scale, detail::max_abs(mp));
    fam.det_threshold = kDetTol * std::pow(std::max(scale, 1e-300), m);
    fam.det_M_prime.reserve(c + 1);
    fam.invertible.reserve(c + 1);
    for (const Block& mp : fam.M_prime) {
        fam.det_M_prime.push_back(mp.determinant());
        fam.invertible.push_back(std::abs(fam.det_M_prime.back()) > fam.det_threshold);
    }

    for (int k = 0; k <= c; ++k)
        for (int i = c - k; i <= c + k; ++i)
            fam.evenness_gap = std::max(
                fam.evenness_gap, detail::max_abs(fam.q(k, i) - fam.q(k, 2 * c - i)));
    return fam;
}

VectorTable solve_centered(const CenteredFamily& fam, const VectorTable& f,
                           const std::vector<ColVec>* f_prime) {
    const Grid& grid = fam.grid();
    const int n = grid.n();
    const int m = fam.block_dim();
    const int c = fam.center();
    if (f.grid.n() != n)
        throw std::invalid_argument("solve_centered: rhs grid mismatch");
    if (f.block_dim() != m)
        throw std::invalid_argument("solve_centered: rhs component count mismatch");
    if (f_prime && static_cast<int>(f_prime->size()) != n)
        throw std::invalid_argument("solve_centered: derivative sample count mismatch");

    for (int k = 0; k <= c; ++k) {
        if (!fam.invertible[k])
            throw KreinInapplicableError(
                "centered reconstruction inapplicable: det M'(xi) = " +
                    std::to_string(std::abs(fam.det_M_prime[k])) +
                    " below threshold at xi = " + std::to_string(grid.nodes[c + k]),
                grid.nodes[c + k], k);
    }

    // window quadrature over [-xi_k, xi_k]
    auto window_weights = [&](int k) {
        QuadratureWeights ww;
        if (k == 0) {
            ww.w = {0.0};
        } else {
            ww.w.assign(2 * k + 1, grid.h);
            ww.w.front() = grid.h / 2.0;
            ww.w.back() = grid.h / 2.0;
        }
        return ww;
    };

    // u(xi) = int_{-xi}^{xi} q(s,xi) f(s) ds and the derivative chain
    std::vector<ColVec> u(c + 1);
    for (int k = 0; k <= c; ++k) {
        const QuadratureWeights ww = window_weights(k);
        ColVec acc = ColVec::Zero(m);
        for (int i = c - k; i <= c + k; ++i)
            acc += ww.w[i - (c - k)] * (fam.q(k, i) * f.samples[i]);
        u[k] = std::move(acc);
    }
    const std::vector<ColVec> du = grid_derivative(u, grid.h);
    std::vector<ColVec> w(c + 1), dwchain;
    std::vector<Eigen::PartialPivLU<Block>> mp_lu;
    mp_lu.reserve(c + 1);
    for (int k = 0; k <= c; ++k) {
        mp_lu.emplace_back(fam.M_prime[k]);
        w[k] = mp_lu[k].solve(du[k]);
    }
    dwchain = grid_derivative(w, grid.h);

    // Stieltjes data: r(xi) = int_{-xi}^{xi} q(s,xi) df(s), df = f'(s) ds
    std::vector<ColVec> fp;
    if (f_prime)
        fp = *f_prime;
    else
        fp = grid_derivative(f.samples, grid.h);
    std::vector<ColVec> y(c + 1);
    for (int k = 0; k <= c; ++k) {
        const QuadratureWeights ww = window_weights(k);
        ColVec acc = ColVec::Zero(m);
        for (int i = c - k; i <= c + k; ++i)
            acc += ww.w[i - (c - k)] * (fam.q(k, i) * fp[i]);
        y[k] = mp_lu[k].solve(acc);
    }

    const Grid xi_grid = make_grid(0.0, grid.b, c + 1);

    VectorTable phi;
    phi.grid = grid;
    phi.samples.resize(n);
    std::vector<ColVec> stieltjes_integral(n);
    for (int i = 0; i < n; ++i) {
        const int k0 = std::abs(i - c);
        const QuadratureWeights sw = suffix_weights(xi_grid, k0);

        // boundary term: (1/2) q(t, L) [M'(L)]^{-1} [d/dxi u]_{xi=L}
        ColVec val = 0.5 * (fam.q(c, i) * w[c]);

        // outer integral: -(1/2) int_{|t|}^{L} q(t,xi) d/dxi{[M'(xi)]^{-1} d/dxi u} dxi
        for (int k = k0; k <= c; ++k)
            val -= 0.5 * sw.w[k - k0] * (fam.q(k, i) * dwchain[k]);
        phi.samples[i] = std::move(val);

        // Stieltjes term integrand, differentiated along t below
        ColVec acc = ColVec::Zero(m);
        for (int k = k0; k <= c; ++k)
            acc += sw.w[k - k0] * (fam.q(k, i) * y[k]);
        stieltjes_integral[i] = std::move(acc);
    }

    const std::vector<ColVec> dstieltjes = grid_derivative(stieltjes_integral, grid.h);
    for (int i = 0; i < n; ++i)
        phi.samples[i] -= 0.5 * dstieltjes[i];
    return phi;
}

VectorTable solve_even_difference_centered(
    const KernelSpec& H, const Grid& grid, const VectorTable& f,
    const std::function<ColVec(double)>& f_prime) {
    const int n = grid.n();
    const double half = 0.5 * (grid.b - grid.a);
    const double shift = 0.5 * (grid.a + grid.b);

    const Grid centered = make_grid(-half, half, n);
    VectorTable fc;
    fc.grid = centered;
    fc.samples = f.samples;

    const CenteredFamily fam = build_centered_family(H, centered);

    std::vector<ColVec> fp;
    const std::vector<ColVec>* fp_ptr = nullptr;
    if (f_prime) {
        fp.reserve(n);
        for (int i = 0; i < n; ++i)
            fp.push_back(f_prime(centered.nodes[i] + shift));
        fp_ptr = &fp;
    }

    VectorTable phi_c = solve_centered(fam, fc, fp_ptr);
    VectorTable phi;
    phi.grid = grid;
    phi.samples = std::move(phi_c.samples);
    return phi;
}

DecoupledReport example_reduction(const std::function<double(double)>& h1,
                                  const std::function<double(double)>& h2,
                                  const Grid& centered_grid) {
    const KernelSpec H = antidiag_block(h1, h2);
    const CenteredFamily direct = build_centered_family(H, centered_grid);
    const int c = direct.center();
    const Grid& grid = direct.grid();

    DecoupledReport rep;
    rep.min_abs_det_q = std::numeric_limits<double>::infinity();

    for (int k = 0; k <= c; ++k) {
        const int lo = c - k;
        const int nb = 2 * k + 1;
        std::vector<double> ww(nb, grid.h);
        if (k == 0) {
            ww = {0.0};
        } else {
            ww.front() = grid.h / 2.0;
            ww.back() = grid.h / 2.0;
        }

        // iterated kernels R1 = h1 o h2 and R2 = h2 o h1 on the window
        Eigen::MatrixXd R1(nb, nb), R2(nb, nb);
        for (int i = 0; i < nb; ++i) {
            for (int u = 0; u < nb; ++u) {
                double acc1 = 0.0, acc2 = 0.0;
                for (int s = 0; s < nb; ++s) {
                    const double ts = grid.nodes[lo + s];
                    acc1 += ww[s] * h1(grid.nodes[lo + i] - ts) * h2(ts - grid.nodes[lo + u]);
                    acc2 += ww[s] * h2(grid.nodes[lo + i] - ts) * h1(ts - grid.nodes[lo + u]);
                }
                R1(i, u) = acc1;
                R2(i, u) = acc2;
            }
        }

        Eigen::MatrixXd A1 = Eigen::MatrixXd::Identity(nb, nb);
        Eigen::MatrixXd A2 = Eigen::MatrixXd::Identity(nb, nb);
        for (int i = 0; i < nb; ++i)
            for (int u = 0; u < nb; ++u) {
                A1(i, u) -= ww[u] * R1(i, u);
                A2(i, u) -= ww[u] * R2(i, u);
            }
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(nb);
        const Eigen::VectorXd q11 = A1.partialPivLu().solve(ones);
        const Eigen::VectorXd q22 = A2.partialPivLu().solve(ones);

        // off-diagonal entries by explicit quadrature
        Eigen::VectorXd q12(nb), q21(nb);
        for (int i = 0; i < nb; ++i) {
            double a12 = 0.0, a21 = 0.0;
            for (int s = 0; s < nb; ++s) {
                const double d = grid.nodes[lo + i] - grid.nodes[lo + s];
                a12 -= ww[s] * h1(d) * q22(s);
                a21 -= ww[s] * h2(d) * q11(s);
            }
            q12(i) = a12;
            q21(i) = a21;
        }

        for (int i = 0; i < nb; ++i) {
            Block b(2, 2);
            b(0, 0) = q11(i);
            b(0, 1) = q12(i);
            b(1, 0) = q21(i);
            b(1, 1) = q22(i);
            rep.max_gap = std::max(rep.max_gap, detail::max_abs(direct.q(k, lo + i) - b));
        }
        rep.min_abs_det_q =
            std::min(rep.min_abs_det_q, std::abs(direct.q(k, c + k).determinant()));
    }

    // L1 norms of h1, h2 over the domain the sampled differences cover
    const double span = 2.0 * grid.b;
    const int fine = 2049;
    const Grid fine_grid = make_grid(-span, span, fine);
    const QuadratureWeights fw = prefix_weights(fine_grid, fine - 1);
    double l1 = 0.0, l2 = 0.0;
    for (int i = 0; i < fine; ++i) {
        l1 += fw.w[i] * std::abs(h1(fine_grid.nodes[i]));
        l2 += fw.w[i] * std::abs(h2(fine_grid.nodes[i]));
    }
    rep.l1_h1 = l1;
    rep.l1_h2 = l2;
    rep.uniqueness_criterion = l1 < 1.0 && l2 < 1.0;
    return rep;
}

}  // namespace krein
