#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fracquad/banded.hpp"

using namespace fracquad;

namespace {

// reference dense solver for cross-checking
std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t r = n; r-- > 0;) {
        for (std::size_t k = r + 1; k < n; ++k) b[r] -= A[r][k] * b[k];
        b[r] /= A[r][r];
    }
    return b;
}

} // namespace

TEST_SUITE("banded") {

TEST_CASE("matvec agrees with a dense reference") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const std::size_t n = 17, kl = 3, ku = 2;
    BandedMatrix A(n, kl, ku);
    std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (A.in_band(i, j)) {
                double v = unit(rng);
                A.set(i, j, v);
                D[i][j] = v;
            }
    std::vector<double> x(n);
    for (double& v : x) v = unit(rng);
    auto y = A.apply(x);
    for (std::size_t i = 0; i < n; ++i) {
        double want = 0.0;
        for (std::size_t j = 0; j < n; ++j) want += D[i][j] * x[j];
        CHECK(y[i] == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("banded LU solves random systems") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 5 + static_cast<std::size_t>(trial) % 20;
        std::size_t kl = 1 + trial % 4, ku = 1 + (trial / 2) % 4;
        BandedMatrix A(n, kl, ku);
        std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (A.in_band(i, j)) {
                    double v = unit(rng) + (i == j ? 3.0 : 0.0);
                    A.set(i, j, v);
                    D[i][j] = v;
                }
        std::vector<double> b(n);
        for (double& v : b) v = unit(rng);
        auto x = BandedLU(A).solve(b);
        auto want = dense_solve(D, b);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(x[i] == doctest::Approx(want[i]).epsilon(1e-10));
    }
}

TEST_CASE("pivoting handles a zero leading diagonal") {
    BandedMatrix A(4, 1, 1);
    A.set(0, 0, 0.0);
    A.set(0, 1, 1.0);
    A.set(1, 0, 2.0);
    A.set(1, 1, 1.0);
    A.set(1, 2, -1.0);
    A.set(2, 1, 1.0);
    A.set(2, 2, 3.0);
    A.set(2, 3, 1.0);
    A.set(3, 2, 1.0);
    A.set(3, 3, 2.0);
    std::vector<double> b{1.0, 2.0, 3.0, 4.0};
    auto x = BandedLU(A).solve(b);
    auto y = A.apply(x);
    for (std::size_t i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("singular matrix is reported") {
    BandedMatrix A(3, 1, 1);
    // column of zeros
    A.set(0, 0, 1.0);
    A.set(2, 2, 1.0);
    CHECK_THROWS_AS(BandedLU{A}, std::runtime_error);
}

TEST_CASE("identity_minus builds I - cA") {
    BandedMatrix A(5, 2, 2);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = (i > 2 ? i - 2 : 0); j <= std::min<std::size_t>(4, i + 2); ++j)
            A.set(i, j, static_cast<double>(i + j));
    BandedMatrix B = A.identity_minus(0.5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            CHECK(B(i, j) == doctest::Approx((i == j ? 1.0 : 0.0) - 0.5 * A(i, j)));
}

} // TEST_SUITE
