#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fracquad/polynomial.hpp"
#include "fracquad/stencil.hpp"
#include "fracquad/weights.hpp"

namespace fracquad {

/// Minimum of the even-index coefficient sum over one local subinterval;
/// the scheme's positivity argument requires this to stay >= -1.
struct StabilityMargin {
    int gamma;
    double sigma_star;   ///< argmin in [-1, 0]
    double min_value;
    bool stable;         ///< min_value >= -1
};

/// Sum of the even-index coefficients c_j, j = 2, 4, ... of the order-gamma
/// stencil, as a polynomial in sigma.
inline Polynomial even_index_coefficient_sum(int gamma) {
    if (gamma < 3 || gamma > 7)
        throw std::invalid_argument("even_index_coefficient_sum: gamma must be in 3..7");
    StencilSet st = build_stencil(SchemeOrder::analysis_only(gamma), 1.0);
    Polynomial sum{0.0};
    for (int j = 2; j < gamma; j += 2) sum += st.polys[static_cast<std::size_t>(j)];
    return sum.trimmed(1e-14);
}

/// Minimizes the even-index coefficient sum over sigma in [-1, 0] by
/// Sturm-bracketed bisection on the derivative polynomial.
inline StabilityMargin negative_sum_min(int gamma) {
    Polynomial sum = even_index_coefficient_sum(gamma);
    PolyMinimum m = minimize_on(sum, -1.0, 0.0, 1e-12);
    return {gamma, m.location, m.value, m.value >= -1.0};
}

/// Sigma(mu; lambda*tau) = (1 - lambda*tau*w_0 K(0)) mu^N
///                         - lambda*tau * sum_{k>=1} w_k K(k tau) mu^{N-k}.
/// `terms[k]` holds w_k * K(k*tau).
struct StabilityPolynomial {
    double lambda;
    double tau;
    std::vector<double> terms;

    std::size_t degree() const { return terms.size() - 1; }

    /// Coefficients in ascending powers of mu.
    std::vector<double> coefficients() const {
        const std::size_t N = degree();
        std::vector<double> c(N + 1);
        for (std::size_t k = 1; k <= N; ++k) c[N - k] = -lambda * tau * terms[k];
        c[N] = 1.0 - lambda * tau * terms[0];
        return c;
    }
};

struct SchurReport {
    double sufficient_bound;              ///< |lambda*tau| * sum |w_k K(k tau)|
    bool schur_by_bound;                  ///< bound < 1
    std::optional<double> max_root_modulus; ///< companion roots, N <= 64 only
};

namespace detail {

// Durand-Kerner simultaneous root iteration; coeffs ascending, leading != 0.
inline std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
    std::size_t deg = coeffs.size() - 1;
    while (deg > 0 && coeffs[deg] == 0.0) --deg;
    if (deg == 0) return {};
    std::vector<std::complex<double>> c(deg + 1);
    for (std::size_t i = 0; i <= deg; ++i) c[i] = coeffs[i] / coeffs[deg];
    auto eval = [&](std::complex<double> x) {
        std::complex<double> r = 0.0;
        for (std::size_t i = deg + 1; i-- > 0;) r = r * x + c[i];
        return r;
    };
    std::vector<std::complex<double>> roots(deg);
    std::complex<double> seed(0.4, 0.9);
    std::complex<double> p(1.0, 0.0);
    for (std::size_t k = 0; k < deg; ++k) {
        p *= seed;
        roots[k] = p;
    }
    for (int iter = 0; iter < 500; ++iter) {
        double worst = 0.0;
        for (std::size_t k = 0; k < deg; ++k) {
            std::complex<double> denom(1.0, 0.0);
            for (std::size_t j = 0; j < deg; ++j)
                if (j != k) denom *= roots[k] - roots[j];
            if (denom == std::complex<double>(0.0, 0.0)) {
                roots[k] += std::complex<double>(1e-8, 1e-8);
                continue;
            }
            std::complex<double> delta = eval(roots[k]) / denom;
            roots[k] -= delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst < 1e-13) break;
    }
    return roots;
}

} // namespace detail

/// Evaluates the sufficient Schur bound and, for N <= 64, the actual
/// companion-polynomial root moduli.  A bound >= 1 is inconclusive, not a
/// proof of instability.
inline SchurReport schur_test(const StabilityPolynomial& p) {
    if (p.terms.empty()) throw std::invalid_argument("schur_test: empty polynomial");
    double s = 0.0;
    for (double t : p.terms) s += std::abs(t);
    double bound = std::abs(p.lambda * p.tau) * s;
    SchurReport rep{bound, bound < 1.0, std::nullopt};
    if (p.degree() <= 64) {
        auto coeffs = p.coefficients();
        if (coeffs.back() != 0.0) {
            double mx = 0.0;
            for (const auto& r : detail::polynomial_roots(coeffs)) mx = std::max(mx, std::abs(r));
            rep.max_root_modulus = mx;
        }
    }
    return rep;
}

struct PositivityViolation {
    std::size_t k;
    double value;
};

struct PositivityAudit {
    std::vector<PositivityViolation> violations;
    double worst_margin;  ///< smallest collapsed weight encountered
    std::size_t checked;

    bool clean() const { return violations.empty(); }
};

/// Scans the collapsed weights for target n and reports every entry below
/// -1e-12, plus the worst margin either way.
inline PositivityAudit weight_positivity_audit(const Mesh& mesh, const Kernel& kernel,
                                               SchemeOrder order, std::size_t n,
                                               StartupPolicy policy = StartupPolicy::reduced_order) {
    WeightAssembler assembler(order, policy);
    std::vector<double> w = assembler.collapsed(mesh, kernel, n);
    PositivityAudit audit{{}, w.empty() ? 0.0 : w[0], w.size()};
    for (std::size_t k = 0; k < w.size(); ++k) {
        audit.worst_margin = std::min(audit.worst_margin, w[k]);
        if (w[k] < -1e-12) audit.violations.push_back({k, w[k]});
    }
    return audit;
}

} // namespace fracquad
