#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace fracquad {

/// Dense univariate polynomial, coefficients in ascending powers.
/// Small degrees only (the stencil machinery never exceeds degree 6),
/// so everything is computed eagerly in double precision.
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}
    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_.push_back(0.0);
    }
    Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) {
        if (coeffs_.empty()) coeffs_.push_back(0.0);
    }

    const std::vector<double>& coeffs() const { return coeffs_; }
    std::size_t degree() const { return coeffs_.size() - 1; }

    double operator[](std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : 0.0; }

    double eval(double x) const {
        double r = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) r = r * x + coeffs_[i];
        return r;
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return Polynomial{0.0};
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i)
            d[i - 1] = coeffs_[i] * static_cast<double>(i);
        return Polynomial(std::move(d));
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(c));
    }

    Polynomial& operator*=(double s) {
        for (double& c : coeffs_) c *= s;
        return *this;
    }

    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }

    /// Drops trailing coefficients below `tol` relative to the largest one.
    Polynomial trimmed(double tol = 1e-13) const {
        double big = 0.0;
        for (double c : coeffs_) big = std::max(big, std::abs(c));
        std::vector<double> c = coeffs_;
        while (c.size() > 1 && std::abs(c.back()) <= tol * big) c.pop_back();
        return Polynomial(std::move(c));
    }

private:
    std::vector<double> coeffs_;
};

namespace detail {

// Remainder of a/b, degrees tiny so naive synthetic division is fine.
inline Polynomial poly_remainder(Polynomial a, const Polynomial& b) {
    a = a.trimmed();
    Polynomial bt = b.trimmed();
    std::vector<double> r = a.coeffs();
    const std::vector<double>& d = bt.coeffs();
    while (r.size() >= d.size() && !(r.size() == 1 && r[0] == 0.0)) {
        double q = r.back() / d.back();
        std::size_t shift = r.size() - d.size();
        for (std::size_t i = 0; i < d.size(); ++i) r[shift + i] -= q * d[i];
        r.pop_back();
        Polynomial tmp(r);
        r = tmp.trimmed().coeffs();
        if (r.size() < d.size()) break;
    }
    return Polynomial(r).trimmed();
}

} // namespace detail

/// Sturm chain of p on the real line; count_sign_changes(a) - count_sign_changes(b)
/// gives the number of distinct real roots in (a, b].
class SturmSequence {
public:
    explicit SturmSequence(const Polynomial& p) {
        chain_.push_back(p.trimmed());
        chain_.push_back(p.derivative().trimmed());
        while (chain_.back().degree() > 0) {
            Polynomial r = detail::poly_remainder(chain_[chain_.size() - 2], chain_.back());
            if (r.degree() == 0 && r[0] == 0.0) break;
            r *= -1.0;
            chain_.push_back(r);
        }
    }

    int sign_changes(double x) const {
        int changes = 0;
        int prev = 0;
        for (const Polynomial& q : chain_) {
            double v = q.eval(x);
            int s = (v > 0.0) - (v < 0.0);
            if (s != 0) {
                if (prev != 0 && s != prev) ++changes;
                prev = s;
            }
        }
        return changes;
    }

    int roots_in(double a, double b) const { return sign_changes(a) - sign_changes(b); }

private:
    std::vector<Polynomial> chain_;
};

/// Isolates the real roots of p inside [a, b] by Sturm bracketing and refines
/// each by bisection to |interval| <= tol.
inline std::vector<double> isolate_roots(const Polynomial& p, double a, double b,
                                         double tol = 1e-12) {
    Polynomial q = p.trimmed();
    SturmSequence sturm(q);
    std::vector<double> roots;
    std::vector<std::pair<double, double>> stack{{a, b}};
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        int n = sturm.roots_in(lo, hi);
        if (n == 0) continue;
        if (n == 1 || hi - lo <= tol) {
            // refine by bisection on the sign of p where possible
            double flo = q.eval(lo), fhi = q.eval(hi);
            double x0 = lo, x1 = hi;
            if (flo == 0.0) { roots.push_back(lo); continue; }
            if (fhi == 0.0) { roots.push_back(hi); continue; }
            if ((flo > 0) == (fhi > 0)) {
                // even multiplicity or Sturm edge case: fall back to midpoint
                roots.push_back(0.5 * (lo + hi));
                continue;
            }
            while (x1 - x0 > tol) {
                double m = 0.5 * (x0 + x1);
                double fm = q.eval(m);
                if (fm == 0.0) { x0 = x1 = m; break; }
                if ((fm > 0) == (flo > 0)) { x0 = m; flo = fm; }
                else x1 = m;
            }
            roots.push_back(0.5 * (x0 + x1));
        } else {
            double mid = 0.5 * (lo + hi);
            stack.push_back({lo, mid});
            stack.push_back({mid, hi});
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

/// Global minimum of p over [a, b]: compares endpoints and the stationary
/// points found from p' by Sturm bracketing + bisection.
struct PolyMinimum {
    double location;
    double value;
};

inline PolyMinimum minimize_on(const Polynomial& p, double a, double b,
                               double tol = 1e-12) {
    PolyMinimum best{a, p.eval(a)};
    double vb = p.eval(b);
    if (vb < best.value) best = {b, vb};
    for (double r : isolate_roots(p.derivative(), a, b, tol)) {
        double v = p.eval(r);
        if (v < best.value) best = {r, v};
    }
    return best;
}

} // namespace fracquad
