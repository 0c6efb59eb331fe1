#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fracquad/banded.hpp"
#include "fracquad/errors.hpp"
#include "fracquad/kernel.hpp"
#include "fracquad/mesh.hpp"
#include "fracquad/special.hpp"
#include "fracquad/weights.hpp"

namespace fracquad {

/// M interior points of [0,1] with homogeneous Dirichlet boundaries,
/// spacing h = 1/(M+1).
struct Grid1D {
    std::size_t M;
    double h;
    std::vector<double> x;

    static Grid1D interior(std::size_t M) {
        if (M < 5) throw std::invalid_argument("Grid1D: need at least 5 interior points");
        Grid1D g;
        g.M = M;
        g.h = 1.0 / static_cast<double>(M + 1);
        g.x.resize(M);
        for (std::size_t i = 0; i < M; ++i) g.x[i] = g.h * static_cast<double>(i + 1);
        return g;
    }
};

/// Fourth-order Laplacian on the interior grid: 5-point central stencil
/// inside, one-sided fourth-order closures at the two rows nearest each
/// boundary, zero boundary values folded in.  Band width 4 from the
/// closure rows.
inline BandedMatrix laplacian4_matrix(std::size_t M, double h) {
    if (M < 5) throw std::invalid_argument("laplacian4_matrix: need M >= 5");
    BandedMatrix A(M, 4, 4);
    const double s = 1.0 / (12.0 * h * h);
    const double central[5] = {-1.0 * s, 16.0 * s, -30.0 * s, 16.0 * s, -1.0 * s};
    // one-sided closure at x_1 over nodes x_0..x_5 (x_0 = boundary = 0 dropped):
    // u''(x_1) ~ (10 u_0 - 15 u_1 - 4 u_2 + 14 u_3 - 6 u_4 + u_5) / (12 h^2)
    const double onesided[5] = {-15.0 * s, -4.0 * s, 14.0 * s, -6.0 * s, 1.0 * s};
    for (std::size_t i = 0; i < M; ++i) {
        if (i == 0) {
            for (std::size_t j = 0; j < 5; ++j) A.set(0, j, onesided[j]);
        } else if (i == 1) {
            for (std::size_t j = 0; j < 4; ++j) A.set(1, j, central[j + 1]);
        } else if (i == M - 2) {
            for (std::size_t j = 0; j < 4; ++j) A.set(M - 2, M - 4 + j, central[j]);
        } else if (i == M - 1) {
            for (std::size_t j = 0; j < 5; ++j) A.set(M - 1, M - 5 + j, onesided[4 - j]);
        } else {
            for (std::size_t j = 0; j < 5; ++j) A.set(i, i - 2 + j, central[j]);
        }
    }
    return A;
}

/// Applies the fourth-order Laplacian to an interior field.
inline std::vector<double> laplacian4(std::span<const double> field, double h) {
    return laplacian4_matrix(field.size(), h).apply(field);
}

/// Source for the manufactured solution u(x,t) = sin(pi x) t^rho of the
/// integrated diffusion equation u = phi + I^alpha(f + u_xx):
///   f(x,t)      = sin(pi x) (Gamma(rho+1)/Gamma(rho-alpha+1) t^{rho-alpha} + pi^2 t^rho)
///   I^alpha f   = sin(pi x) (t^rho + pi^2 Gamma(rho+1)/Gamma(rho+alpha+1) t^{rho+alpha})
struct ManufacturedSource {
    double alpha;
    double rho;
    double deriv_coeff;    // Gamma(rho+1)/Gamma(rho-alpha+1)
    double integral_coeff; // Gamma(rho+1)/Gamma(rho+alpha+1)

    double f(double x, double t) const {
        const double pi = std::numbers::pi;
        return std::sin(pi * x) *
               (deriv_coeff * std::pow(t, rho - alpha) + pi * pi * std::pow(t, rho));
    }

    double forcing_integral(double x, double t) const {
        const double pi = std::numbers::pi;
        return std::sin(pi * x) *
               (std::pow(t, rho) + pi * pi * integral_coeff * std::pow(t, rho + alpha));
    }

    double exact(double x, double t) const {
        return std::sin(std::numbers::pi * x) * std::pow(t, rho);
    }
};

inline ManufacturedSource manufacture_source(double rho, double alpha) {
    if (!(rho > 0.0)) throw std::invalid_argument("manufacture_source: need rho > 0");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("manufacture_source: need 0 < alpha < 1");
    if (rho - alpha <= -1.0)
        throw std::invalid_argument("manufacture_source: source t^{rho-alpha} not integrable");
    return {alpha, rho, gamma_ratio(rho + 1.0, rho - alpha + 1.0),
            gamma_ratio(rho + 1.0, rho + alpha + 1.0)};
}

/// How the source convolution I^alpha f is handled:
///  - quadrature: f sampled at mesh nodes and folded into the same
///    collapsed-weight quadrature as the diffusion term.
///  - analytic_integral: a closed form of I^alpha f is supplied and only the
///    diffusion term is quadratured; isolates the time error of the scheme.
enum class SourceTreatment { quadrature, analytic_integral };

struct FracDiffProblem {
    Grid1D grid;
    Mesh mesh;
    double alpha;
    SourceTreatment treatment = SourceTreatment::quadrature;
    std::function<double(double, double)> source;            // f(x,t)
    std::function<double(double, double)> forcing_integral;  // I^alpha f (x,t)
    std::function<double(double)> initial;                   // phi(x)
};

struct FracDiffSolution {
    std::vector<std::vector<double>> u; // u[n][i], n = 0..N
};

/// Forward sweep of the alpha-order scheme: at each t_n solve
/// (I - w_n L) u^n = phi + sum_{k<n} w_k (f^k + L u^k) + w_n f^n
/// (quadrature mode), or with the source terms replaced by the analytic
/// I^alpha f.  Banded LU per step; factorization reused on uniform meshes
/// since w_n is then constant.
inline FracDiffSolution solve_fracdiff(const FracDiffProblem& p) {
    const std::size_t M = p.grid.M;
    const std::size_t N = p.mesh.size();
    if ((p.treatment == SourceTreatment::quadrature && !p.source) ||
        (p.treatment == SourceTreatment::analytic_integral && !p.forcing_integral))
        throw std::invalid_argument("solve_fracdiff: missing source for chosen treatment");

    const BandedMatrix L = laplacian4_matrix(M, p.grid.h);
    const Kernel kernel = Kernel::caputo(p.alpha);
    WeightAssembler assembler(SchemeOrder::fractional(p.alpha));

    FracDiffSolution sol;
    sol.u.assign(N + 1, std::vector<double>(M, 0.0));
    std::vector<double> phi(M, 0.0);
    if (p.initial)
        for (std::size_t i = 0; i < M; ++i) phi[i] = p.initial(p.grid.x[i]);
    sol.u[0] = phi;

    // G[k] = L u^k (+ f^k in quadrature mode), filled as steps complete.
    // G[0] is never read: the collapsed weight at node 0 is identically zero.
    std::vector<std::vector<double>> G(N + 1, std::vector<double>(M, 0.0));
    auto fill_G = [&](std::size_t k) {
        L.apply(sol.u[k], G[k]);
        if (p.treatment == SourceTreatment::quadrature) {
            const double t = p.mesh.node(k);
            for (std::size_t i = 0; i < M; ++i) G[k][i] += p.source(p.grid.x[i], t);
        }
    };

    std::vector<double> w, rhs(M);
    double cached_wn = -1.0;
    std::unique_ptr<BandedLU> lu;
    for (std::size_t n = 1; n <= N; ++n) {
        assembler.collapsed(p.mesh, kernel, n, w);
        const double t_n = p.mesh.node(n);
        for (std::size_t i = 0; i < M; ++i) {
            double acc = phi[i];
            if (p.treatment == SourceTreatment::analytic_integral)
                acc += p.forcing_integral(p.grid.x[i], t_n);
            else
                acc += w[n] * p.source(p.grid.x[i], t_n);
            rhs[i] = acc;
        }
        for (std::size_t k = 1; k < n; ++k) {
            const double wk = w[k];
            if (wk == 0.0) continue;
            const std::vector<double>& g = G[k];
            for (std::size_t i = 0; i < M; ++i) rhs[i] += wk * g[i];
        }
        if (!lu || std::abs(w[n] - cached_wn) > 1e-15 * std::abs(w[n])) {
            try {
                lu = std::make_unique<BandedLU>(L.identity_minus(w[n]));
            } catch (const std::runtime_error&) {
                throw NonInvertibleStepError(
                    "solve_fracdiff: singular step matrix at step " + std::to_string(n), n);
            }
            cached_wn = w[n];
        }
        sol.u[n] = lu->solve(rhs);
        fill_G(n);
    }
    return sol;
}

/// Maximum nodal error against an exact solution over the space-time grid.
template <class Exact>
inline double max_error(const FracDiffSolution& sol, const Grid1D& grid, const Mesh& mesh,
                        const Exact& exact) {
    double e = 0.0;
    for (std::size_t n = 0; n < sol.u.size(); ++n)
        for (std::size_t i = 0; i < grid.M; ++i)
            e = std::max(e, std::abs(sol.u[n][i] - exact(grid.x[i], mesh.node(n))));
    return e;
}

} // namespace fracquad
