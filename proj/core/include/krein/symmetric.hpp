#pragma once

#include <functional>
#include <vector>

#include "krein/kernels.hpp"
#include "krein/krein_method.hpp"
#include "krein/nystrom.hpp"

namespace krein {

/*
 * Specialization to even difference kernels K(t,s) = -H(t-s), H(-u) = H(u).
 * Evenness forces the truncated solutions to be reflection-symmetric, keeps
 * det g(xi,xi) away from zero (a Liouville-formula argument), and therefore
 * guarantees the invertibility condition the reconstruction formula needs.
 *
 * Two solve paths:
 *   - on [a,b]: delegate to the general reconstruction (the condition is
 *     still checked, it just cannot fail for these kernels);
 *   - centered: work on [-L, L] with the symmetric-window family
 *       q(t,xi) + int_{-xi}^{xi} H(t-s) q(s,xi) ds = I,   |t| <= xi,
 *     and reconstruct from half-line data with the factor-1/2 formula.
 */

// Max reflection gap  max |g(t, xi) - g(a + xi - t, xi)|  over both tables.
// The reflected point is always a grid node, so no interpolation enters.
double symmetry_gap(const TruncatedFamily& fam, const KernelTable& table);

struct LiouvilleReport {
    std::vector<Complex> det_g;       // det g(xi,xi) per truncation node
    std::vector<Complex> det_g_star;  // det gstar(xi,xi)
    // exp of the integrated resolvent-corner trace, both argument orders
    std::vector<Complex> exp_trace;      // tr Gamma_tau(tau, a)
    std::vector<Complex> exp_trace_alt;  // tr Gamma_tau(a, tau)
    double max_rel_gap = 0.0;      // det_g vs exp_trace
    double max_rel_gap_alt = 0.0;  // det_g vs exp_trace_alt
    double max_det_star_gap = 0.0; // |det_g - det_g_star|
    double min_abs_det_g = 0.0;
};

LiouvilleReport liouville_check(const TruncatedFamily& fam,
                                const std::vector<ResolventTable>& resolvents);

// Solve  phi(t) + int_a^b H(t-s) phi(s) ds = f(t)  for an even difference
// kernel through the general reconstruction.
KreinSolution solve_even_difference(const KernelSpec& H, const Grid& grid,
                                    const VectorTable& f);

// Symmetric-window family on a centered grid [-L, L] (odd node count so 0 is
// a node and every window is node-aligned).
class CenteredFamily {
public:
    CenteredFamily(Grid grid, int block_dim);

    const Grid& grid() const { return grid_; }
    int block_dim() const { return block_dim_; }
    int center() const { return center_; }
    int xi_count() const { return center_ + 1; }

    // q(t_i, xi_k), valid for |i - center| <= k.
    const Block& q(int k, int i) const { return q_[index(k, i)]; }
    Block& q(int k, int i) { return q_[index(k, i)]; }

    std::vector<Block> M;        // int_0^xi q(s,xi) ds
    std::vector<Block> M_prime;  // numerical d/dxi of M
    std::vector<Complex> det_M_prime;
    std::vector<bool> invertible;
    double det_threshold = 0.0;
    double evenness_gap = 0.0;  // max |q(t,xi) - q(-t,xi)|

private:
    std::size_t index(int k, int i) const;

    Grid grid_;
    int block_dim_;
    int center_;
    std::vector<Block> q_;
};

CenteredFamily build_centered_family(const KernelSpec& H, const Grid& centered_grid);

// Centered reconstruction (the three-term, factor-1/2 formula).  f_prime
// supplies the analytic derivative samples for the Stieltjes term; when
// absent the derivative is taken numerically from the f samples.
VectorTable solve_centered(const CenteredFamily& fam, const VectorTable& f,
                           const std::vector<ColVec>* f_prime = nullptr);

// Convenience wrapper: translate [a,b] to the centered interval, solve, and
// translate back.
VectorTable solve_even_difference_centered(
    const KernelSpec& H, const Grid& grid, const VectorTable& f,
    const std::function<ColVec(double)>& f_prime = nullptr);

// The 2x2 antidiagonal kernel decouples into two scalar equations with
// iterated kernels plus explicit quadratures for the off-diagonal entries.
struct DecoupledReport {
    double max_gap = 0.0;        // direct window solve vs decoupled route
    double min_abs_det_q = 0.0;  // min |det q(xi,xi)| over truncation nodes
    double l1_h1 = 0.0;          // int |h1| over the kernel's domain
    double l1_h2 = 0.0;
    bool uniqueness_criterion = false;  // both L1 norms < 1
};

DecoupledReport example_reduction(const std::function<double(double)>& h1,
                                  const std::function<double(double)>& h2,
                                  const Grid& centered_grid);

}  // namespace krein
