#pragma once

#include <Eigen/Dense>

#include "krein/errors.hpp"
#include "krein/grid.hpp"
#include "krein/kernels.hpp"

// Shared assembly and conditioning helpers for the dense collocation solvers.
// Everything here operates on the scalar expansion of block systems: an
// (n*m) x (n*m) complex matrix laid out in m x m blocks.

namespace krein::detail {

inline constexpr double kSingularConditionCutoff = 1e12;

// A = I - [w_q * K(t_p, t_q)]_{p,q<=j}: the collocation matrix of the
// truncated equation on nodes 0..j with quadrature weights w.
inline Eigen::MatrixXcd assemble_truncated(const KernelTable& K, int j,
                                           const QuadratureWeights& qw) {
    const int m = K.block_dim;
    const int nb = j + 1;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(nb * m, nb * m);
    for (int p = 0; p < nb; ++p)
        for (int q = 0; q < nb; ++q)
            A.block(p * m, q * m, m, m) -= qw.w[q] * K.at(p, q);
    return A;
}

// Same truncated system with the kernel composed on the other side,
// assembled directly in transposed scalar form:
//   Bt(p,q) = delta_pq*I - w_q * K(t_q, t_p)^T.
// Solving Bt * X = [I;...;I] gives X whose block p is gstar(t_p, xi)^T.
inline Eigen::MatrixXcd assemble_truncated_star(const KernelTable& K, int j,
                                                const QuadratureWeights& qw) {
    const int m = K.block_dim;
    const int nb = j + 1;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(nb * m, nb * m);
    for (int p = 0; p < nb; ++p)
        for (int q = 0; q < nb; ++q)
            A.block(p * m, q * m, m, m) -= qw.w[q] * K.at(q, p).transpose();
    return A;
}

// Hager/Higham 1-norm condition estimate from an existing factorization: a
// handful of solves with A and A^H, no second factorization.
inline double condition_estimate(const Eigen::MatrixXcd& A,
                                 const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu) {
    const Eigen::Index n = A.rows();
    if (n == 0) return 1.0;

    const double norm_a = A.cwiseAbs().colwise().sum().maxCoeff();

    Eigen::VectorXcd x = Eigen::VectorXcd::Constant(n, Complex(1.0 / static_cast<double>(n), 0.0));
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        Eigen::VectorXcd y = lu.solve(x);
        est = y.cwiseAbs().sum();
        if (!std::isfinite(est))
            return std::numeric_limits<double>::infinity();
        Eigen::VectorXcd sgn(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = std::abs(y(i));
            sgn(i) = (a == 0.0) ? Complex(1.0, 0.0) : y(i) / a;
        }
        Eigen::VectorXcd z = lu.adjoint().solve(sgn);
        Eigen::Index jmax;
        const double zmax = z.cwiseAbs().maxCoeff(&jmax);
        if (zmax <= std::abs(z.dot(x))) break;
        x.setZero();
        x(jmax) = 1.0;
    }
    return norm_a * est;
}

struct Factored {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
    double condition;
};

// Factor A; throw NoUniqueSolutionError when the condition estimate says the
// discretized operator is numerically singular.
inline Factored factor_or_throw(const Eigen::MatrixXcd& A, double xi, int xi_index,
                                const char* context) {
    Factored f{Eigen::PartialPivLU<Eigen::MatrixXcd>(A), 0.0};
    f.condition = condition_estimate(A, f.lu);
    if (!(f.condition < kSingularConditionCutoff)) {
        throw NoUniqueSolutionError(
            std::string(context) +
                ": no unique solution at this resolution (condition estimate " +
                std::to_string(f.condition) + ") at xi = " + std::to_string(xi),
            xi, xi_index);
    }
    return f;
}

inline double max_abs(const Eigen::MatrixXcd& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace krein::detail
