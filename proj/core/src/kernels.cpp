#include "krein/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace krein {

namespace {

bool finite(const Block& b) {
    return b.allFinite();
}

}  // namespace

Block KernelSpec::evaluate(double t, double s) const {
    if (kind == Kind::General)
        return eval(t, s);
    return -eval_diff(t - s);
}

double KernelTable::max_abs() const {
    double m = 0.0;
    for (const Block& b : blocks)
        m = std::max(m, b.cwiseAbs().maxCoeff());
    return m;
}

KernelTable sample_kernel(const KernelSpec& spec, const Grid& grid) {
    const int n = grid.n();
    KernelTable table;
    table.grid = grid;
    table.block_dim = spec.block_dim;
    table.kind = spec.kind;
    table.even = spec.even;
    table.blocks.reserve(static_cast<std::size_t>(n) * n);

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Block b = spec.evaluate(grid.nodes[i], grid.nodes[j]);
            if (b.rows() != spec.block_dim || b.cols() != spec.block_dim)
                throw std::invalid_argument("sample_kernel: evaluator block has wrong dimension");
            if (!finite(b))
                throw std::invalid_argument("sample_kernel: evaluator returned a non-finite block");
            table.blocks.push_back(std::move(b));
        }
    }

    if (spec.kind == KernelSpec::Kind::Difference) {
        const double scale = table.max_abs();
        // block-Toeplitz structure: entries depend on i - j only
        for (int i = 0; i + 1 < n; ++i)
            for (int j = 0; j + 1 < n; ++j)
                if ((table.at(i, j) - table.at(i + 1, j + 1)).cwiseAbs().maxCoeff() >
                    1e-12 * std::max(1.0, scale))
                    throw std::logic_error("sample_kernel: difference kernel sampled non-Toeplitz");
        if (spec.even) {
            // H(u) = H(-u) translates to K(t,s) = K(s,t) blockwise
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < i; ++j)
                    if ((table.at(i, j) - table.at(j, i)).cwiseAbs().maxCoeff() >
                        1e-10 * std::max(1e-300, scale))
                        throw std::invalid_argument(
                            "sample_kernel: kernel declared even fails the evenness check");
        }
    }
    return table;
}

VectorTable sample_rhs(const Grid& grid, const std::function<ColVec(double)>& f) {
    VectorTable vt;
    vt.grid = grid;
    vt.samples.reserve(grid.n());
    for (double t : grid.nodes) {
        ColVec v = f(t);
        if (!v.allFinite())
            throw std::invalid_argument("sample_rhs: non-finite right-hand side sample");
        vt.samples.push_back(std::move(v));
    }
    return vt;
}

VectorTable sample_rhs_scalar(const Grid& grid, const std::function<Complex(double)>& f) {
    return sample_rhs(grid, [&f](double t) {
        ColVec v(1);
        v(0) = f(t);
        return v;
    });
}

KernelSpec zero_kernel(int block_dim) {
    KernelSpec s;
    s.kind = KernelSpec::Kind::General;
    s.block_dim = block_dim;
    s.name = "zero";
    s.eval = [block_dim](double, double) { return Block::Zero(block_dim, block_dim); };
    return s;
}

KernelSpec constant_scalar(Complex c) {
    KernelSpec s;
    s.kind = KernelSpec::Kind::General;
    s.block_dim = 1;
    s.name = "constant_scalar";
    s.eval = [c](double, double) {
        Block b(1, 1);
        b(0, 0) = c;
        return b;
    };
    return s;
}

KernelSpec separable_scalar() {
    KernelSpec s;
    s.kind = KernelSpec::Kind::General;
    s.block_dim = 1;
    s.name = "separable_scalar";
    s.eval = [](double t, double u) {
        Block b(1, 1);
        b(0, 0) = t * u;
        return b;
    };
    return s;
}

KernelSpec antidiag_block(std::function<double(double)> h1,
                          std::function<double(double)> h2) {
    KernelSpec s;
    s.kind = KernelSpec::Kind::Difference;
    s.block_dim = 2;
    s.even = true;
    s.name = "antidiag_block";
    s.eval_diff = [h1 = std::move(h1), h2 = std::move(h2)](double u) {
        Block b = Block::Zero(2, 2);
        b(0, 1) = h1(u);
        b(1, 0) = h2(u);
        return b;
    };
    return s;
}

KernelSpec difference_scalar(std::function<double(double)> h) {
    KernelSpec s;
    s.kind = KernelSpec::Kind::Difference;
    s.block_dim = 1;
    s.even = true;
    s.name = "difference_scalar";
    s.eval_diff = [h = std::move(h)](double u) {
        Block b(1, 1);
        b(0, 0) = h(u);
        return b;
    };
    return s;
}

KernelSpec catalog(const std::string& name, const CatalogParams& params) {
    if (name == "zero")
        return zero_kernel(params.block_dim);
    if (name == "constant_scalar")
        return constant_scalar(params.c);
    if (name == "separable_scalar")
        return separable_scalar();
    if (name == "antidiag_block") {
        if (!params.h1 || !params.h2)
            throw std::invalid_argument("catalog: antidiag_block requires h1 and h2");
        return antidiag_block(params.h1, params.h2);
    }
    if (name == "difference_scalar") {
        if (!params.h)
            throw std::invalid_argument("catalog: difference_scalar requires h");
        return difference_scalar(params.h);
    }
    throw std::invalid_argument("catalog: unknown kernel name '" + name + "'");
}

}  // namespace krein
