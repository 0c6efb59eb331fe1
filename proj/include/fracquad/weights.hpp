#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracquad/kernel.hpp"
#include "fracquad/mesh.hpp"
#include "fracquad/stencil.hpp"

namespace fracquad {

/// How subintervals without full backward history (k < gamma-1) are handled:
///  - reduced_order: use the order-(k+1) backward stencil on subinterval k.
///    Matches the construction behind the reference convergence tables.
///  - shifted_full_order: keep order gamma by anchoring the stencil at the
///    first gamma mesh nodes.  Preserves polynomial exactness up to degree
///    gamma-1 on every subinterval.
enum class StartupPolicy { reduced_order, shifted_full_order };

/// Stencil placement for one subinterval of a target-n weight table.
struct SubintervalPlan {
    std::size_t anchor; ///< index of the stencil's leading node t_anchor
    int order;          ///< number of backward points used
};

inline SubintervalPlan plan_subinterval(std::size_t k, std::size_t n, int span, bool fractional,
                                        StartupPolicy policy) {
    if (fractional || span == 1) return {k, 1};
    if (k + 1 >= static_cast<std::size_t>(span)) return {k, span};
    if (policy == StartupPolicy::reduced_order)
        return {k, static_cast<int>(k) + 1};
    std::size_t base = std::min<std::size_t>(static_cast<std::size_t>(span) - 1, n);
    return {base, static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(span),
                                                         base + 1))};
}

/// Raw and collapsed quadrature weights for one target node t_n:
///   w_j^k = int_{t_{k-1}}^{t_k} c_j^k(s) K(t_n - s) ds,
///   collapsed[m] = sum of w_j^k over (k, j) with anchor_k - j = m.
/// collapsed has n+1 entries indexed by mesh node; collapsed[0] collects
/// only cross-subinterval terms (w_0^0 = 0).
struct WeightTable {
    std::size_t n = 0;
    std::vector<double> collapsed;
    std::vector<std::vector<double>> raw;   // raw[k-1][j]; empty unless requested
    std::vector<SubintervalPlan> plans;     // plans[k-1]
    double mass = 0.0;
};

struct ConsistencyReport {
    double sum;
    double mass;
    double defect;
    bool consistent;
};

/// Assembles weight tables for a fixed scheme (order, startup policy,
/// abscissae mode).  Stateless apart from precomputed stencil coefficient
/// polynomials; safe for concurrent use.
class WeightAssembler {
public:
    explicit WeightAssembler(SchemeOrder order,
                             StartupPolicy policy = StartupPolicy::reduced_order,
                             AbscissaeMode mode = AbscissaeMode::equispaced)
        : order_(order), policy_(policy), mode_(mode) {
        stencils_.reserve(static_cast<std::size_t>(order.span()));
        for (int q = 1; q <= order.span(); ++q) {
            SchemeOrder sub = order.is_fractional()
                                  ? order
                                  : (q <= 5 ? SchemeOrder::integer(q)
                                            : SchemeOrder::analysis_only(q));
            stencils_.push_back(build_stencil(sub, 1.0));
        }
    }

    SchemeOrder order() const { return order_; }
    StartupPolicy policy() const { return policy_; }

    /// Collapsed weights for target n, written into `out` (resized to n+1).
    void collapsed(const Mesh& mesh, const Kernel& kernel, std::size_t n,
                   std::vector<double>& out) const {
        assemble(mesh, kernel, n, out, nullptr, nullptr);
    }

    std::vector<double> collapsed(const Mesh& mesh, const Kernel& kernel, std::size_t n) const {
        std::vector<double> out;
        collapsed(mesh, kernel, n, out);
        return out;
    }

    WeightTable table(const Mesh& mesh, const Kernel& kernel, std::size_t n,
                      bool keep_raw = false) const {
        WeightTable t;
        t.n = n;
        std::vector<std::vector<double>> raw;
        std::vector<SubintervalPlan> plans;
        assemble(mesh, kernel, n, t.collapsed, keep_raw ? &raw : nullptr, &plans);
        t.raw = std::move(raw);
        t.plans = std::move(plans);
        t.mass = kernel.kernel_mass(mesh.node(n));
        return t;
    }

private:
    void assemble(const Mesh& mesh, const Kernel& kernel, std::size_t n,
                  std::vector<double>& out, std::vector<std::vector<double>>* raw,
                  std::vector<SubintervalPlan>* plans) const {
        if (n < 1 || n > mesh.size())
            throw std::invalid_argument("WeightAssembler: target index out of range");
        out.assign(n + 1, 0.0);
        if (raw) raw->assign(n, {});
        if (plans) plans->assign(n, SubintervalPlan{0, 0});

        const double t_n = mesh.node(n);
        const bool closed = kernel.has_closed_form();
        const double beta = closed ? kernel.exponent() : 0.0;
        const double scale = closed ? kernel.scale() : 1.0;
        double m[6];
        double inv_tau_pow[6];

        for (std::size_t k = 1; k <= n; ++k) {
            SubintervalPlan plan =
                plan_subinterval(k, n, order_.span(), order_.is_fractional(), policy_);
            const int q = plan.order;
            const StencilSet& st = stencil_for(mesh, plan);
            const double tau = mesh.step(plan.anchor);
            const double t_anchor = mesh.node(plan.anchor);

            if (closed) {
                Kernel::power_moments(beta, scale, mesh.node(k - 1), mesh.node(k), t_anchor,
                                      t_n, q - 1, m);
            } else {
                MomentRequest req{mesh.node(k - 1), mesh.node(k), t_anchor, t_n, q - 1};
                auto mv = kernel.moments(req);
                std::copy(mv.begin(), mv.end(), m);
            }

            inv_tau_pow[0] = 1.0;
            for (int p = 1; p < q; ++p) inv_tau_pow[p] = inv_tau_pow[p - 1] / tau;

            for (int j = 0; j < q; ++j) {
                const Polynomial& c = st.polys[static_cast<std::size_t>(j)];
                double w = 0.0;
                for (std::size_t p = 0; p < c.coeffs().size(); ++p)
                    w += c.coeffs()[p] * inv_tau_pow[p] * m[p];
                out[plan.anchor - static_cast<std::size_t>(j)] += w;
                if (raw) (*raw)[k - 1].push_back(w);
            }
            if (plans) (*plans)[k - 1] = plan;
        }
    }

    const StencilSet& stencil_for(const Mesh& mesh, const SubintervalPlan& plan) const {
        if (mode_ == AbscissaeMode::equispaced)
            return stencils_[static_cast<std::size_t>(plan.order - 1)];
        // true-node abscissae rebuild per subinterval (non-hot path)
        thread_local StencilSet local{SchemeOrder::integer(1), {}};
        std::vector<double> back(static_cast<std::size_t>(plan.order));
        for (int j = 0; j < plan.order; ++j)
            back[static_cast<std::size_t>(j)] = mesh.node(plan.anchor - static_cast<std::size_t>(j));
        SchemeOrder sub = order_.is_fractional()
                              ? order_
                              : (plan.order <= 5 ? SchemeOrder::integer(plan.order)
                                                 : SchemeOrder::analysis_only(plan.order));
        local = build_stencil(sub, mesh.step(plan.anchor), AbscissaeMode::true_nodes, back);
        return local;
    }

    SchemeOrder order_;
    StartupPolicy policy_;
    AbscissaeMode mode_;
    std::vector<StencilSet> stencils_;
};

/// Raw weight matrix for target n (spec operation); keeps the per-
/// subinterval rows.
inline WeightTable raw_weights(const Mesh& mesh, const Kernel& kernel, SchemeOrder order,
                               std::size_t n,
                               StartupPolicy policy = StartupPolicy::reduced_order,
                               AbscissaeMode mode = AbscissaeMode::equispaced) {
    return WeightAssembler(order, policy, mode).table(mesh, kernel, n, /*keep_raw=*/true);
}

/// Regroups raw weights into the collapsed node weights, dropping
/// out-of-range terms.  Equivalent to the collapse performed during
/// assembly; exposed for the linearity checks.
inline std::vector<double> collapse(const std::vector<std::vector<double>>& raw,
                                    const std::vector<SubintervalPlan>& plans, std::size_t n) {
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t k = 1; k <= raw.size(); ++k) {
        for (std::size_t j = 0; j < raw[k - 1].size(); ++j)
            out[plans[k - 1].anchor - j] += raw[k - 1][j];
    }
    return out;
}

inline ConsistencyReport consistency_report(const WeightTable& table) {
    double sum = 0.0;
    for (double w : table.collapsed) sum += w;
    double defect = std::abs(sum - table.mass);
    return {sum, table.mass, defect, defect <= 1e-10 * (1.0 + std::abs(table.mass))};
}

} // namespace fracquad
