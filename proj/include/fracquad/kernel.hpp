#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracquad/adaptive.hpp"
#include "fracquad/errors.hpp"
#include "fracquad/special.hpp"

namespace fracquad {

enum class KernelForm { constant, power, power_singular, caputo, user };

struct KernelFlags {
    bool positive = true;
    bool nonincreasing = false;
    bool integrable = true;
    bool singular_at_zero = false;
};

/// Moment integral request: m_p = int_a^b (s - t_k)^p K(t_n - s) ds for
/// p = 0..max_power.  The interval may touch the singular endpoint b = t_n.
struct MomentRequest {
    double a;
    double b;
    double t_k;
    double t_n;
    int max_power;

    void validate() const {
        if (!(a < b)) throw std::invalid_argument("MomentRequest: need a < b");
        if (!(b <= t_n + 1e-15 * std::abs(t_n)))
            throw std::invalid_argument("MomentRequest: interval must lie left of the target");
        if (max_power < 0 || max_power > 5)
            throw std::invalid_argument("MomentRequest: power must be in 0..5");
    }
};

/// Convolution kernel K.  Built-in power-law forms carry closed-form
/// moments; user kernels fall back to singularity-aware adaptive
/// quadrature.  Immutable; all operations are pure.
class Kernel {
public:
    static Kernel constant() {
        Kernel k(KernelForm::constant, 0.0);
        k.flags_ = {true, true, true, false};
        return k;
    }

    /// K(t) = t^alpha, 0 < alpha <= 1 (bounded, nondecreasing).
    static Kernel power(double alpha) {
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw std::invalid_argument("Kernel::power: need 0 < alpha <= 1");
        Kernel k(KernelForm::power, alpha);
        k.flags_ = {true, false, true, false};
        return k;
    }

    /// K(t) = t^{alpha-1}, 0 < alpha < 1 (weakly singular, nonincreasing).
    static Kernel power_singular(double alpha) {
        if (!(alpha > 0.0))
            throw std::invalid_argument("Kernel::power_singular: alpha <= 0 is not integrable");
        if (!(alpha < 1.0))
            throw std::invalid_argument("Kernel::power_singular: need alpha < 1");
        Kernel k(KernelForm::power_singular, alpha);
        k.flags_ = {true, true, true, true};
        return k;
    }

    /// K(t) = t^{alpha-1} / Gamma(alpha), the Caputo-integral kernel.
    static Kernel caputo(double alpha) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("Kernel::caputo: need 0 < alpha < 1");
        Kernel k(KernelForm::caputo, alpha);
        k.flags_ = {true, true, true, true};
        k.scale_ = 1.0 / std::tgamma(alpha);
        return k;
    }

    static Kernel user(std::function<double(double)> eval, KernelFlags flags) {
        if (!eval) throw std::invalid_argument("Kernel::user: evaluator required");
        if (!flags.integrable)
            throw std::invalid_argument("Kernel::user: kernel must be integrable on [0,T]");
        Kernel k(KernelForm::user, 0.0);
        k.flags_ = flags;
        k.user_eval_ = std::move(eval);
        return k;
    }

    static Kernel parse(const std::string& name, double alpha) {
        if (name == "const") return constant();
        if (name == "power") return power(alpha);
        if (name == "power-singular") return power_singular(alpha);
        if (name == "caputo") return caputo(alpha);
        throw std::invalid_argument("Kernel::parse: unknown kernel '" + name + "'");
    }

    KernelForm form() const { return form_; }
    double alpha() const { return alpha_; }
    const KernelFlags& flags() const { return flags_; }

    /// Power-law exponent beta with K(t) = scale * t^beta; only meaningful
    /// for the built-in forms.
    double exponent() const {
        switch (form_) {
            case KernelForm::constant: return 0.0;
            case KernelForm::power: return alpha_;
            case KernelForm::power_singular:
            case KernelForm::caputo: return alpha_ - 1.0;
            case KernelForm::user: break;
        }
        throw std::logic_error("Kernel::exponent: user kernels have no closed form");
    }

    double scale() const { return scale_; }
    bool has_closed_form() const { return form_ != KernelForm::user; }

    double eval(double t) const {
        if (t < 0.0) throw std::invalid_argument("Kernel::eval: negative argument");
        switch (form_) {
            case KernelForm::constant: return 1.0;
            case KernelForm::power: return std::pow(t, alpha_);
            case KernelForm::power_singular:
            case KernelForm::caputo:
                if (t == 0.0)
                    throw SingularEvaluationError(
                        "Kernel::eval: singular kernel at t = 0; use moments instead");
                return scale_ * std::pow(t, alpha_ - 1.0);
            case KernelForm::user:
                if (t == 0.0 && flags_.singular_at_zero)
                    throw SingularEvaluationError(
                        "Kernel::eval: kernel declared singular at t = 0");
                return user_eval_(t);
        }
        return 0.0;
    }

    /// Moment vector (m_0, ..., m_p): closed form for power-law kernels via
    /// the substitution u = t_n - s and binomial expansion, compensated
    /// summation against cancellation when t_k is close to t_n.
    std::vector<double> moments(const MomentRequest& req) const {
        req.validate();
        std::vector<double> out(static_cast<std::size_t>(req.max_power) + 1);
        if (has_closed_form()) {
            power_moments(exponent(), scale_, req.a, req.b, req.t_k, req.t_n, req.max_power,
                          out.data());
            return out;
        }
        // user kernels: integrate in the distance u = t_n - s so the kernel
        // is evaluated at the exact distance from its singular point
        const double lo = req.t_n - req.b;
        const double hi = req.t_n - req.a;
        bool touches = req.b >= req.t_n - 1e-15 * std::max(1.0, std::abs(req.t_n));
        for (int p = 0; p <= req.max_power; ++p) {
            auto integrand_u = [&](double u) {
                return std::pow(req.t_n - u - req.t_k, static_cast<double>(p)) * user_eval_(u);
            };
            if (flags_.singular_at_zero && touches)
                out[static_cast<std::size_t>(p)] =
                    integrate_from_singularity(integrand_u, hi, 1e-13, 1e-11, 60).value;
            else
                out[static_cast<std::size_t>(p)] =
                    adaptive_integrate(integrand_u, lo, hi, 1e-13, 1e-11, 60, false).value;
        }
        return out;
    }

    /// int_0^{t_n} K(t_n - s) ds.
    double kernel_mass(double t_n) const {
        if (!(t_n > 0.0)) throw std::invalid_argument("kernel_mass: target must be positive");
        switch (form_) {
            case KernelForm::constant: return t_n;
            case KernelForm::power: return std::pow(t_n, alpha_ + 1.0) / (alpha_ + 1.0);
            case KernelForm::power_singular: return std::pow(t_n, alpha_) / alpha_;
            case KernelForm::caputo: return scale_ * std::pow(t_n, alpha_) / alpha_;
            case KernelForm::user: {
                if (flags_.singular_at_zero)
                    return integrate_from_singularity(user_eval_, t_n).value;
                return adaptive_integrate(user_eval_, 0.0, t_n, 1e-13, 1e-11, 60, false).value;
            }
        }
        return 0.0;
    }

    std::string describe() const {
        switch (form_) {
            case KernelForm::constant: return "const";
            case KernelForm::power: return "t^alpha";
            case KernelForm::power_singular: return "t^(alpha-1)";
            case KernelForm::caputo: return "t^(alpha-1)/Gamma(alpha)";
            case KernelForm::user: return "user";
        }
        return "?";
    }

    /// Closed-form power moments for K(u) = scale * u^beta, beta > -1:
    /// m_p = scale * sum_q C(p,q) d^{p-q} (-1)^q (U^{beta+1+q} - L^{beta+1+q})/(beta+1+q)
    /// with d = t_n - t_k, U = t_n - a, L = t_n - b.
    static void power_moments(double beta, double scale, double a, double b, double t_k,
                              double t_n, int max_power, double* out) {
        const double d = t_n - t_k;
        const double U = t_n - a;
        const double L = t_n - b;
        const double e0 = beta + 1.0;
        double upow = std::pow(U, e0);
        double lpow = (L > 0.0) ? std::pow(L, e0) : 0.0;
        // ladders of U^{e0+q}, L^{e0+q}
        double binom[6][6];
        for (int p = 0; p <= max_power; ++p) {
            binom[p][0] = 1.0;
            for (int q = 1; q <= p; ++q)
                binom[p][q] = binom[p - 1][q - 1] + ((q <= p - 1) ? binom[p - 1][q] : 0.0);
        }
        std::vector<double> term(static_cast<std::size_t>(max_power) + 1);
        for (int q = 0; q <= max_power; ++q) {
            term[static_cast<std::size_t>(q)] = (upow - lpow) / (e0 + q);
            upow *= U;
            lpow *= L;
        }
        for (int p = 0; p <= max_power; ++p) {
            CompensatedSum acc;
            if (d == 0.0) {
                // only the q = p term has d^0 = 1
                acc.add(((p % 2 == 0) ? 1.0 : -1.0) * term[static_cast<std::size_t>(p)]);
            } else {
                double dpow = std::pow(d, static_cast<double>(p)); // d^{p-q} descending
                double sign = 1.0;
                for (int q = 0; q <= p; ++q) {
                    acc.add(sign * binom[p][q] * dpow * term[static_cast<std::size_t>(q)]);
                    sign = -sign;
                    dpow /= d;
                }
            }
            out[p] = scale * acc.value();
        }
    }

private:
    Kernel(KernelForm form, double alpha) : form_(form), alpha_(alpha) {}

    KernelForm form_;
    double alpha_;
    double scale_ = 1.0;
    KernelFlags flags_;
    std::function<double(double)> user_eval_;
};

} // namespace fracquad
