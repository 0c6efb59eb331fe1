#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fracquad/errors.hpp"
#include "fracquad/kernel.hpp"
#include "fracquad/mesh.hpp"
#include "fracquad/quadrature.hpp"
#include "fracquad/special.hpp"
#include "fracquad/weights.hpp"

namespace fracquad {

/// Second-kind Volterra equation u(t) = f(t) + int_0^t K(t-s) u(s) ds with
/// u(0) = 0, discretized by the collapsed-weight quadrature.
struct VolterraProblem {
    std::function<double(double)> forcing;
    Kernel kernel;
    Mesh mesh;
    SchemeOrder order;
    StartupPolicy policy = StartupPolicy::reduced_order;
};

/// Forward sweep u(t_n) = (1 - w_n)^{-1} (f(t_n) + sum_{k<n} w_k u(t_k)).
/// Weights are rebuilt per target node since K(t_n - s) changes with n.
inline std::vector<double> step_solve(const VolterraProblem& p) {
    if (!p.order.solvable())
        throw UnsupportedOrderError("step_solve: orders above 5 are unstable and not solvable");
    const std::size_t N = p.mesh.size();
    std::vector<double> u(N + 1, 0.0);
    std::vector<double> f(N + 1);
    for (std::size_t k = 0; k <= N; ++k) f[k] = p.forcing(p.mesh.node(k));

    WeightAssembler assembler(p.order, p.policy);
    std::vector<double> w;
    for (std::size_t n = 1; n <= N; ++n) {
        assembler.collapsed(p.mesh, p.kernel, n, w);
        double acc = f[n];
        for (std::size_t k = 1; k < n; ++k) acc += w[k] * u[k];
        double denom = 1.0 - w[n];
        if (std::abs(denom) < 1e-12)
            throw NonInvertibleStepError("step_solve: 1 - w_n vanished at step " +
                                             std::to_string(n),
                                         n);
        u[n] = acc / denom;
    }
    return u;
}

/// Node-wise residual u(t_n) - sum_k w_k u(t_k) - f(t_n) of a computed
/// solution; zero up to roundoff independent of discretization error.
inline std::vector<double> recurrence_residual(const VolterraProblem& p,
                                               std::span<const double> u) {
    const std::size_t N = p.mesh.size();
    if (u.size() != N + 1) throw std::invalid_argument("recurrence_residual: size mismatch");
    std::vector<double> r(N + 1, 0.0);
    WeightAssembler assembler(p.order, p.policy);
    std::vector<double> w;
    for (std::size_t n = 1; n <= N; ++n) {
        assembler.collapsed(p.mesh, p.kernel, n, w);
        double conv = 0.0;
        for (std::size_t k = 0; k <= n; ++k) conv += w[k] * u[k];
        r[n] = u[n] - conv - p.forcing(p.mesh.node(n));
    }
    return r;
}

/// Forcing that makes u(t) = t^m the exact solution: f = u - K * u, with the
/// convolution evaluated by the Beta identity for the built-in power
/// kernels.
inline std::function<double(double)> manufacture_forcing(double m, const Kernel& kernel) {
    if (!(m >= 0.0)) throw std::invalid_argument("manufacture_forcing: exponent must be >= 0");
    if (!kernel.has_closed_form())
        throw std::invalid_argument(
            "manufacture_forcing: user kernels need a supplied convolution");
    // K * t^m = scale * B(m+1, beta+1) t^{m+beta+1} for K = scale * t^beta
    const double beta = kernel.exponent();
    const double scale = kernel.scale();
    const double coeff = scale * beta_function(m + 1.0, beta + 1.0);
    const double expo = m + beta + 1.0;
    return [m, coeff, expo](double t) {
        return std::pow(t, m) - coeff * std::pow(t, expo);
    };
}

} // namespace fracquad
