#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fracquad {

/// General banded matrix with kl subdiagonals and ku superdiagonals,
/// LAPACK-style band storage (extra kl rows reserved for pivot fill-in).
class BandedMatrix {
public:
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
        : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(ldab_ * n, 0.0) {}

    std::size_t size() const { return n_; }
    std::size_t lower_bandwidth() const { return kl_; }
    std::size_t upper_bandwidth() const { return ku_; }

    bool in_band(std::size_t i, std::size_t j) const {
        return (j >= i ? j - i <= ku_ : i - j <= kl_);
    }

    double operator()(std::size_t i, std::size_t j) const {
        return in_band(i, j) ? entry(i, j) : 0.0;
    }

    void set(std::size_t i, std::size_t j, double v) {
        if (!in_band(i, j)) throw std::out_of_range("BandedMatrix::set: outside band");
        entry(i, j) = v;
    }

    void add(std::size_t i, std::size_t j, double v) {
        if (!in_band(i, j)) throw std::out_of_range("BandedMatrix::add: outside band");
        entry(i, j) += v;
    }

    std::vector<double> apply(std::span<const double> x) const {
        if (x.size() != n_) throw std::invalid_argument("BandedMatrix::apply: size mismatch");
        std::vector<double> y(n_, 0.0);
        apply(x, y);
        return y;
    }

    void apply(std::span<const double> x, std::span<double> y) const {
        for (std::size_t i = 0; i < n_; ++i) {
            double s = 0.0;
            std::size_t j0 = (i > kl_) ? i - kl_ : 0;
            std::size_t j1 = std::min(n_ - 1, i + ku_);
            for (std::size_t j = j0; j <= j1; ++j) s += entry(i, j) * x[j];
            y[i] = s;
        }
    }

    /// B = I - c * A, same band profile.
    BandedMatrix identity_minus(double c) const {
        BandedMatrix b(n_, kl_, ku_);
        for (std::size_t i = 0; i < n_; ++i) {
            std::size_t j0 = (i > kl_) ? i - kl_ : 0;
            std::size_t j1 = std::min(n_ - 1, i + ku_);
            for (std::size_t j = j0; j <= j1; ++j)
                b.entry(i, j) = (i == j ? 1.0 : 0.0) - c * entry(i, j);
        }
        return b;
    }

private:
    friend class BandedLU;

    double& entry(std::size_t i, std::size_t j) { return ab_[j * ldab_ + (kl_ + ku_ + i - j)]; }
    const double& entry(std::size_t i, std::size_t j) const {
        return ab_[j * ldab_ + (kl_ + ku_ + i - j)];
    }

    std::size_t n_, kl_, ku_, ldab_;
    std::vector<double> ab_;
};

/// LU factorization of a banded matrix with partial pivoting
/// (unblocked gbtrf/gbtrs).
class BandedLU {
public:
    explicit BandedLU(const BandedMatrix& a)
        : n_(a.n_), kl_(a.kl_), ku_(a.ku_), ldab_(a.ldab_), ab_(a.ab_), piv_(a.n_) {
        std::size_t ju = 0;
        for (std::size_t j = 0; j < n_; ++j) {
            std::size_t km = std::min(kl_, n_ - 1 - j);
            std::size_t jp = j;
            for (std::size_t i = j + 1; i <= j + km; ++i)
                if (std::abs(at(i, j)) > std::abs(at(jp, j))) jp = i;
            piv_[j] = jp;
            if (at(jp, j) == 0.0)
                throw std::runtime_error("BandedLU: matrix is numerically singular");
            ju = std::max(ju, std::min(j + ku_ + (jp - j), n_ - 1));
            if (jp != j)
                for (std::size_t c = j; c <= ju; ++c) std::swap(at(j, c), at(jp, c));
            for (std::size_t i = j + 1; i <= j + km; ++i) at(i, j) /= at(j, j);
            for (std::size_t c = j + 1; c <= ju; ++c) {
                double f = at(j, c);
                if (f == 0.0) continue;
                for (std::size_t i = j + 1; i <= j + km; ++i) at(i, c) -= at(i, j) * f;
            }
        }
    }

    std::vector<double> solve(std::span<const double> rhs) const {
        if (rhs.size() != n_) throw std::invalid_argument("BandedLU::solve: size mismatch");
        std::vector<double> b(rhs.begin(), rhs.end());
        for (std::size_t j = 0; j < n_; ++j) {
            if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
            std::size_t km = std::min(kl_, n_ - 1 - j);
            for (std::size_t i = j + 1; i <= j + km; ++i) b[i] -= at(i, j) * b[j];
        }
        const std::size_t kw = kl_ + ku_;
        for (std::size_t j = n_; j-- > 0;) {
            b[j] /= at(j, j);
            std::size_t i0 = (j > kw) ? j - kw : 0;
            for (std::size_t i = i0; i < j; ++i) b[i] -= at(i, j) * b[j];
        }
        return b;
    }

private:
    double& at(std::size_t i, std::size_t j) { return ab_[j * ldab_ + (kl_ + ku_ + i - j)]; }
    const double& at(std::size_t i, std::size_t j) const {
        return ab_[j * ldab_ + (kl_ + ku_ + i - j)];
    }

    std::size_t n_, kl_, ku_, ldab_;
    std::vector<double> ab_;
    std::vector<std::size_t> piv_;
};

} // namespace fracquad
