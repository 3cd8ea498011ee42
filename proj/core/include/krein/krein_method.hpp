#pragma once

#include <vector>

#include "krein/kernels.hpp"
#include "krein/nystrom.hpp"

namespace krein {

/*
 * Reconstruction of the full solution from the truncated families.
 *
 * g(t,xi) and gstar(t,xi) solve the truncated equations with identity right
 * side, the kernel composed on the left and on the right respectively:
 *
 *     g(t,xi)     - int_a^xi K(t,s) g(s,xi)     ds = I
 *     gstar(t,xi) - int_a^xi gstar(s,xi) K(s,t) ds = I
 *
 * The accumulator
 *
 *     M(xi)  = int_a^xi g(t,xi) dt,      M'(xi) = gstar(xi,xi) g(xi,xi)
 *
 * gates the reconstruction: whenever det M'(xi) != 0 on the whole interval,
 *
 *     phi(t) = g(t,b) [M'(b)]^{-1} [ d/dxi int_a^xi gstar(s,xi) f(s) ds ]_{xi=b}
 *              - int_t^b g(t,xi) d/dxi{ [M'(xi)]^{-1} d/dxi int_a^xi gstar(s,xi) f(s) ds } dxi.
 *
 * Products keep this exact order; the factors do not commute for block
 * dimension >= 2.
 */

// Triangular tables g(t_i, xi_j) and gstar(t_i, xi_j) for i <= j.
class TruncatedFamily {
public:
    TruncatedFamily(Grid grid, int block_dim);

    const Grid& grid() const { return grid_; }
    int block_dim() const { return block_dim_; }

    const Block& g(int i, int j) const { return g_[index(i, j)]; }
    const Block& g_star(int i, int j) const { return g_star_[index(i, j)]; }
    Block& g(int i, int j) { return g_[index(i, j)]; }
    Block& g_star(int i, int j) { return g_star_[index(i, j)]; }

    // Largest collocation residual seen while filling either table.
    double solve_residual = 0.0;

private:
    std::size_t index(int i, int j) const;

    Grid grid_;
    int block_dim_;
    std::vector<Block> g_, g_star_;
};

TruncatedFamily build_family(const KernelTable& K);

// Max residual of the derivative identities
//   d/dxi g(t,xi)     = Gamma_xi(t,xi) g(xi,xi)
//   d/dxi gstar(t,xi) = gstar(xi,xi) Gamma_xi(xi,t)
// over the triangular domain; second order for smooth kernels.
double family_derivative_residual(const TruncatedFamily& fam,
                                  const std::vector<ResolventTable>& resolvents);

// Max gap of the integral representations
//   g(t,xi)     = I + int_a^xi Gamma_xi(t,s) ds
//   gstar(t,xi) = I + int_a^xi Gamma_xi(s,t) ds.
double representation_gap(const TruncatedFamily& fam,
                          const std::vector<ResolventTable>& resolvents);

struct Accumulator {
    std::vector<Block> M;        // prefix integral of g(.,xi)
    std::vector<Block> M_prime;  // gstar(xi,xi) g(xi,xi)
    std::vector<Complex> det_M_prime;
    std::vector<bool> invertible;
    double det_threshold = 0.0;  // |det| cutoff used for the flags
    // Gap between M from the g-rows and M from integrating M_prime.
    double route_gap = 0.0;
};

Accumulator build_accumulator(const TruncatedFamily& fam);

struct InvertibilityReport {
    double min_abs_det = 0.0;
    bool pass = false;
    int first_bad_index = -1;  // -1 when pass
    double threshold = 0.0;
};

// Pass iff |det M'(xi)| clears the threshold at every truncation node.
InvertibilityReport check_invertibility(const Accumulator& acc);

struct KreinSolution {
    VectorTable phi;
    VectorTable J1;  // boundary term
    VectorTable J2;  // outer-integral term; phi = J1 + J2 by construction
    bool condition_ok = false;
    double min_abs_det_M_prime = 0.0;
};

KreinSolution krein_solve(const TruncatedFamily& fam, const Accumulator& acc,
                          const VectorTable& f);

// Scalar (block_dim == 1) reconstruction with the multiplications written in
// the scalar formula's order (boundary bracket on the left of g(t,b)).
// Algebraically identical to krein_solve when block_dim == 1.
VectorTable krein_solve_scalar_order(const TruncatedFamily& fam, const Accumulator& acc,
                                     const VectorTable& f);

}  // namespace krein
