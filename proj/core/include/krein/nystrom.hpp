#pragma once

#include <vector>

#include "krein/kernels.hpp"

namespace krein {

/*
 * Dense collocation oracle for
 *
 *     phi(t) - int_a^xi K(t,s) phi(s) ds = f(t),      a <= t <= xi <= b,
 *
 * kept deliberately naive (LU with partial pivoting on the full block
 * system, no structure exploitation) so it can arbitrate every other
 * solution path in the library.
 *
 * The resolvent kernel Gamma_xi of the truncated equation is defined by the
 * equivalent pair
 *
 *     Gamma(t,s) - int_a^xi K(t,u) Gamma(u,s) du = K(t,s)
 *     Gamma(t,s) - int_a^xi Gamma(t,u) K(u,s) du = K(t,s);
 *
 * the first is solved, the second verified, and both residuals recorded.
 */

struct DirectSolve {
    // Solution samples on nodes 0..xi_index.
    std::vector<ColVec> phi;
    int xi_index = 0;
    double residual = 0.0;           // max-norm residual of the collocation system
    double relative_residual = 0.0;  // residual / (|f| + |K|*(xi-a)*|phi|)
    double condition_estimate = 1.0;
};

struct ResolventTable {
    int xi_index = 0;
    int block_dim = 1;
    std::vector<Block> blocks;  // (xi_index+1)^2, row-major on [a, xi]^2

    const Block& at(int p, int q) const {
        return blocks[static_cast<std::size_t>(p) * (xi_index + 1) + q];
    }
    Block& at(int p, int q) {
        return blocks[static_cast<std::size_t>(p) * (xi_index + 1) + q];
    }

    double defining_residual = 0.0;    // first equation of the pair (solved)
    double second_form_residual = 0.0; // second equation (verified only)
    double lu_tolerance = 0.0;         // machine-level scale for both residuals
};

DirectSolve solve_full(const KernelTable& K, const VectorTable& f);
DirectSolve solve_truncated(const KernelTable& K, const VectorTable& f, int xi_index);

ResolventTable resolvent(const KernelTable& K, int xi_index);
// Resolvents at every truncation node.  Desk-scale only: keeps all tables.
std::vector<ResolventTable> resolvent_family(const KernelTable& K);

// Max residual of  d/dxi Gamma_xi(t,s) = Gamma_xi(t,xi) Gamma_xi(xi,s)
// over every sampled (t, s, xi); second order for smooth kernels.
double resolvent_evolution_residual(const KernelTable& K);
double resolvent_evolution_residual(const std::vector<ResolventTable>& family, double h);

// Two-step solution through the resolvent representation:
//   g(t)   = f(t) + int_a^t Gamma_t(t,s) f(s) ds
//   phi(t) = g(t) + int_t^b Gamma_xi(t,xi) g(xi) dxi.
DirectSolve solve_via_resolvent(const KernelTable& K, const VectorTable& f);

}  // namespace krein
