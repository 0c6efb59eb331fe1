#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracquad/errors.hpp"
#include "fracquad/polynomial.hpp"

namespace fracquad {

/// Order of an interpolation scheme: integer 1..5 for Taylor-based stencils,
/// or fractional alpha in (0,1) for the single-point scheme.  Orders 6 and 7
/// exist only for stability analysis and are rejected by the solving paths.
class SchemeOrder {
public:
    static SchemeOrder integer(int gamma) {
        if (gamma < 1 || gamma > 5)
            throw UnsupportedOrderError("SchemeOrder: integer order must be in 1..5");
        return SchemeOrder(gamma, static_cast<double>(gamma), false);
    }

    /// Unrestricted constructor for the stability module's demonstration path.
    static SchemeOrder analysis_only(int gamma) {
        if (gamma < 1 || gamma > 7)
            throw UnsupportedOrderError("SchemeOrder: analysis orders must be in 1..7");
        return SchemeOrder(gamma, static_cast<double>(gamma), false);
    }

    static SchemeOrder fractional(double alpha) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("SchemeOrder: fractional order must satisfy 0 < alpha < 1");
        return SchemeOrder(1, alpha, true);
    }

    bool is_fractional() const { return fractional_; }
    /// Number of backward points the stencil uses.
    int span() const { return span_; }
    /// The real order gamma (equals span for integer orders, alpha otherwise).
    double value() const { return value_; }

    bool solvable() const { return fractional_ || span_ <= 5; }

private:
    SchemeOrder(int span, double value, bool fractional)
        : span_(span), value_(value), fractional_(fractional) {}

    int span_;
    double value_;
    bool fractional_;
};

/// How stencil abscissae are laid out on nonuniform meshes.  The matrix
/// construction spaces them as -m * tau_k regardless of the true node gaps;
/// `true_nodes` uses the actual backward nodes instead.  Identical on
/// uniform meshes.
enum class AbscissaeMode { equispaced, true_nodes };

/// Coefficient functions c_j(sigma) of an order-q backward stencil in the
/// local variable sigma = (s - t_anchor)/tau.  c_j multiplies the sample at
/// the j-th backward node.  Satisfies sum_j c_j(sigma) = 1 identically.
struct StencilSet {
    SchemeOrder order;
    std::vector<Polynomial> polys;        // size = span

    int span() const { return static_cast<int>(polys.size()); }

    /// Values (c_0(sigma), ..., c_{q-1}(sigma)).
    std::vector<double> evaluate(double sigma) const {
        std::vector<double> v(polys.size());
        for (std::size_t j = 0; j < polys.size(); ++j) v[j] = polys[j].eval(sigma);
        return v;
    }
};

namespace detail {

// Solve A x = b in place by partial-pivot Gaussian elimination; A is n x n
// row-major.  Sizes never exceed 7.
inline void solve_dense(std::vector<double>& A, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        if (A[piv * n + col] == 0.0)
            throw std::runtime_error("stencil: singular Vandermonde system");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(A[col * n + c], A[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = A[r * n + col] / A[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= A[r * n + c] * b[c];
        b[r] = s / A[r * n + r];
    }
}

// Transposed-Vandermonde solve with abscissae x_j (in sigma units): one
// column per right-hand-side power sigma^p, yielding the coefficient
// polynomials directly.
inline std::vector<Polynomial> solve_stencil_system(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> cols(n);
    for (std::size_t p = 0; p < n; ++p) {
        std::vector<double> A(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                A[i * n + j] = std::pow(x[j], static_cast<double>(i));
        std::vector<double> b(n, 0.0);
        b[p] = 1.0;
        solve_dense(A, b, n);
        cols[p] = b;
    }
    std::vector<Polynomial> polys(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> cj(n);
        for (std::size_t p = 0; p < n; ++p) cj[p] = cols[p][j];
        polys[j] = Polynomial(std::move(cj)).trimmed(1e-14);
    }
    return polys;
}

} // namespace detail

/// Builds the order-q stencil for a subinterval with step tau.  On uniform
/// abscissae the coefficient polynomials depend only on q, so those are
/// cached.  Fractional orders yield the single polynomial c_0 = 1.
inline StencilSet build_stencil(SchemeOrder order, double tau,
                                AbscissaeMode mode = AbscissaeMode::equispaced,
                                std::span<const double> backward_nodes = {}) {
    if (!(tau > 0.0)) throw std::invalid_argument("build_stencil: step must be positive");
    if (order.is_fractional())
        return StencilSet{order, {Polynomial{1.0}}};

    const int q = order.span();
    if (mode == AbscissaeMode::equispaced || backward_nodes.empty()) {
        static std::map<int, std::vector<Polynomial>> cache;
        static std::mutex mtx;
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(q);
        if (it == cache.end()) {
            std::vector<double> x(static_cast<std::size_t>(q));
            for (int m = 0; m < q; ++m) x[static_cast<std::size_t>(m)] = -static_cast<double>(m);
            it = cache.emplace(q, detail::solve_stencil_system(x)).first;
        }
        return StencilSet{order, it->second};
    }

    // true-node abscissae: backward_nodes = (t_anchor, t_anchor-1, ...) scaled by tau
    if (backward_nodes.size() != static_cast<std::size_t>(q))
        throw std::invalid_argument("build_stencil: need one backward node per stencil point");
    std::vector<double> x(backward_nodes.size());
    for (std::size_t m = 0; m < x.size(); ++m)
        x[m] = (backward_nodes[m] - backward_nodes[0]) / tau;
    return StencilSet{order, detail::solve_stencil_system(x)};
}

/// Entries of the inverse of the transposed Vandermonde matrix with
/// abscissae x_j = -(j-1)*tau, via the elementary-symmetric-function
/// expansion of the Lagrange numerator products.  inv[j][i] is the
/// coefficient of (s - t_k)^i in c_j.
inline std::vector<std::vector<double>> vandermonde_inverse_entries(std::size_t n, double tau) {
    if (n < 1) throw std::invalid_argument("vandermonde_inverse_entries: n must be >= 1");
    if (!(tau > 0.0)) throw std::invalid_argument("vandermonde_inverse_entries: step must be positive");
    std::vector<double> x(n);
    for (std::size_t m = 0; m < n; ++m) x[m] = -static_cast<double>(m) * tau;
    std::vector<std::vector<double>> inv(n);
    for (std::size_t j = 0; j < n; ++j) {
        Polynomial num{1.0};
        double den = 1.0;
        for (std::size_t m = 0; m < n; ++m) {
            if (m == j) continue;
            num = num * Polynomial{-x[m], 1.0};
            den *= x[j] - x[m];
        }
        std::vector<double> row(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i] = num[i] / den;
        inv[j] = std::move(row);
    }
    return inv;
}

/// The transposed Vandermonde matrix itself (row i = i-th powers of the
/// abscissae); used to check the explicit inverse against a residual.
inline std::vector<std::vector<double>> vandermonde_transpose(std::size_t n, double tau) {
    std::vector<std::vector<double>> vt(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            vt[i][j] = std::pow(-static_cast<double>(j) * tau, static_cast<double>(i));
    return vt;
}

/// Stencil values at time s for the subinterval anchored at t_k with step
/// tau_k.  Values sum to 1 up to roundoff for any s.
inline std::vector<double> evaluate_stencil(const StencilSet& st, double s, double t_k,
                                            double tau_k) {
    if (!(tau_k > 0.0)) throw std::invalid_argument("evaluate_stencil: step must be positive");
    return st.evaluate((s - t_k) / tau_k);
}

/// Stencil-weighted combination of the backward samples
/// (f(t_k), f(t_{k-1}), ..., f(t_{k-q+1})); exact for polynomials of
/// degree <= q-1.
inline double interpolate(const StencilSet& st, std::span<const double> backward_samples,
                          double s, double t_k, double tau_k) {
    if (backward_samples.size() < static_cast<std::size_t>(st.span()))
        throw std::invalid_argument("interpolate: insufficient backward history for this order");
    double sigma = (s - t_k) / tau_k;
    double r = 0.0;
    for (int j = 0; j < st.span(); ++j)
        r += st.polys[static_cast<std::size_t>(j)].eval(sigma) *
             backward_samples[static_cast<std::size_t>(j)];
    return r;
}

} // namespace fracquad
