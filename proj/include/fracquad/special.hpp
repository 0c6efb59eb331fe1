#pragma once

#include <cmath>

namespace fracquad {

/// B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b), computed in log space for a,b > 0.
inline double beta_function(double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

/// Gamma(a)/Gamma(b) for a,b > 0 without overflow for moderate arguments.
inline double gamma_ratio(double a, double b) {
    return std::exp(std::lgamma(a) - std::lgamma(b));
}

/// Neumaier-compensated accumulator.  Used where binomial expansions of
/// kernel moments cancel (t_k close to t_n).
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace fracquad
