#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "krein/grid.hpp"

namespace krein {

using Complex = std::complex<double>;
using Block = Eigen::MatrixXcd;    // one m x m kernel/solution block
using ColVec = Eigen::VectorXcd;   // one m-component sample

// A matrix kernel, either general K(t,s) or a difference kernel given by
// H(u) with the convention K(t,s) = -H(t-s).  Internally every table stores
// the K form:
//
//     phi(t) - int_a^b K(t,s) phi(s) ds = f(t)
//
// so a single sign convention flows through all solvers; the H form only
// exists at this boundary.
struct KernelSpec {
    enum class Kind { General, Difference };

    Kind kind = Kind::General;
    int block_dim = 1;
    std::function<Block(double, double)> eval;  // Kind::General: K(t,s)
    std::function<Block(double)> eval_diff;     // Kind::Difference: H(u)
    bool even = false;                          // Difference only: H(-u) = H(u)
    std::string name;                           // catalog name, empty for ad hoc

    Block evaluate(double t, double s) const;
};

// Dense sampled kernel K(t_i, t_j) on a grid.  Difference kernels keep their
// kind/evenness flags so the symmetry machinery can insist on them.
struct KernelTable {
    Grid grid;
    int block_dim = 1;
    KernelSpec::Kind kind = KernelSpec::Kind::General;
    bool even = false;
    std::vector<Block> blocks;  // row-major N x N

    const Block& at(int i, int j) const { return blocks[static_cast<std::size_t>(i) * grid.n() + j]; }
    Block& at(int i, int j) { return blocks[static_cast<std::size_t>(i) * grid.n() + j]; }

    // Largest absolute entry over the whole table.
    double max_abs() const;
};

struct VectorTable {
    Grid grid;
    std::vector<ColVec> samples;

    int block_dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().size()); }
};

// Exact evaluation of the kernel on every node pair.  For difference kernels
// the evenness declaration is checked against the sampled values and the
// block-Toeplitz structure is verified.
KernelTable sample_kernel(const KernelSpec& spec, const Grid& grid);

VectorTable sample_rhs(const Grid& grid, const std::function<ColVec(double)>& f);
VectorTable sample_rhs_scalar(const Grid& grid, const std::function<Complex(double)>& f);

// --- catalog of analytically tractable kernels ----------------------------

KernelSpec zero_kernel(int block_dim = 1);
KernelSpec constant_scalar(Complex c);
KernelSpec separable_scalar();  // K(t,s) = t*s
// 2x2 difference kernel with zero diagonal and h1, h2 on the antidiagonal;
// h1, h2 must be even.
KernelSpec antidiag_block(std::function<double(double)> h1,
                          std::function<double(double)> h2);
// Scalar even difference kernel H(u) = h(u).
KernelSpec difference_scalar(std::function<double(double)> h);

// Named dispatch used by the problem-file front end.
struct CatalogParams {
    Complex c = 0.0;
    int block_dim = 1;
    std::function<double(double)> h1;
    std::function<double(double)> h2;
    std::function<double(double)> h;
};
KernelSpec catalog(const std::string& name, const CatalogParams& params);

}  // namespace krein
