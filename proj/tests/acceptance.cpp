// Acceptance suite: one check per shipped guarantee, one PASS/FAIL line
// each, nonzero exit if any selected check fails.  Criterion 8 is the
// long-running blowup ladder and only runs with --long.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fracquad/fracdiff.hpp"
#include "fracquad/harness.hpp"
#include "fracquad/quadrature.hpp"
#include "fracquad/stability.hpp"
#include "fracquad/volterra.hpp"

using namespace fracquad;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& msg) {
        if (!ok) {
            pass = false;
            detail << (detail.str().empty() ? "" : "; ") << msg;
        }
    }
};

std::string experiments_dir() {
#ifdef FRACQUAD_EXPERIMENTS_DIR
    return FRACQUAD_EXPERIMENTS_DIR;
#else
    return "experiments";
#endif
}

Outcome golden_criterion(const std::string& spec_file) {
    Outcome out;
    StudyResult result = run_study(ExperimentSpec::load(experiments_dir() + "/" + spec_file));
    CheckOutcome check = check_golden(result);
    for (const std::string& m : check.messages) out.require(false, m);
    for (const ConvergenceReport& rep : result.reports) {
        const ReportRow& last = rep.rows.back();
        out.detail << " [a=" << rep.alpha << " E=" << last.E_inf << " rate="
                   << (last.rate ? std::to_string(*last.rate) : std::string("-")) << "]";
    }
    return out;
}

// ---- criterion 1: general Vandermonde solve vs printed coefficient forms

Outcome criterion1() {
    Outcome out;
    // printed closed forms, written as the factored products in sigma
    auto lin = [](double c) { return Polynomial{c, 1.0}; };
    std::vector<std::vector<Polynomial>> printed(5);
    printed[1] = {Polynomial{1.0}};
    printed[2] = {Polynomial{1.0, 1.0}, Polynomial{0.0, -1.0}};
    printed[3] = {lin(1) * lin(2) * 0.5, Polynomial{0.0, -1.0} * lin(2),
                  Polynomial{0.0, 1.0} * lin(1) * 0.5};
    printed[4] = {lin(1) * lin(2) * lin(3) * (1.0 / 6.0),
                  Polynomial{0.0, -1.0} * lin(2) * lin(3) * 0.5,
                  Polynomial{0.0, 1.0} * lin(1) * lin(3) * 0.5,
                  Polynomial{0.0, -1.0} * lin(1) * lin(2) * (1.0 / 6.0)};
    for (int g = 1; g <= 4; ++g) {
        StencilSet st = build_stencil(SchemeOrder::integer(g), 0.37);
        for (int j = 0; j < g; ++j) {
            const Polynomial& a = st.polys[static_cast<std::size_t>(j)];
            const Polynomial& b = printed[static_cast<std::size_t>(g)][static_cast<std::size_t>(j)];
            for (std::size_t p = 0; p < static_cast<std::size_t>(g); ++p) {
                if (std::abs(a[p] - b[p]) > 1e-12) {
                    std::ostringstream m;
                    m << "gamma=" << g << " c_" << j << " sigma^" << p << ": " << a[p]
                      << " vs " << b[p];
                    out.require(false, m.str());
                }
            }
        }
    }
    return out;
}

// ---- criterion 2: stability constants of the even-coefficient minima

Outcome criterion2() {
    Outcome out;
    StabilityMargin m4 = negative_sum_min(4);
    double c4 = (20.0 - 14.0 * std::sqrt(7.0)) / 54.0;
    out.require(std::abs(m4.min_value - c4) <= 1e-12, "gamma=4 min not exact");
    out.require(m4.stable, "gamma=4 verdict");

    StabilityMargin m5 = negative_sum_min(5);
    out.require(std::abs(m5.min_value - (-0.603912)) <= 1e-4, "gamma=5 min");
    out.require(std::abs(m5.sigma_star - (-0.416)) <= 1e-2, "gamma=5 argmin");
    out.require(m5.stable, "gamma=5 verdict");

    StabilityMargin m6 = negative_sum_min(6);
    out.require(std::abs(m6.min_value - (-1.05315)) <= 1e-4, "gamma=6 min");
    out.require(std::abs(m6.sigma_star - (-0.38843)) <= 1e-3, "gamma=6 argmin");
    out.require(!m6.stable, "gamma=6 must be unstable");

    out.detail << " min4=" << m4.min_value << " min5=" << m5.min_value
               << " min6=" << m6.min_value;
    return out;
}

// ---- criteria 3 and 4: consistency identity and weight positivity sweep

template <class PerTable>
void sweep(const PerTable& visit) {
    const double alphas[] = {0.1, 0.25, 0.5, 0.75, 0.9};
    const std::size_t Ns[] = {8, 32, 128};
    for (int kind = 0; kind < 4; ++kind) {
        for (double alpha : alphas) {
            Kernel kernel = (kind == 0)   ? Kernel::constant()
                            : (kind == 1) ? Kernel::power(alpha)
                            : (kind == 2) ? Kernel::power_singular(alpha)
                                          : Kernel::caputo(alpha);
            for (int g = 1; g <= 5; ++g)
                for (std::size_t N : Ns) visit(kernel, alpha, g, N);
        }
    }
}

Outcome criterion3() {
    Outcome out;
    double worst = 0.0;
    sweep([&](const Kernel& kernel, double alpha, int g, std::size_t N) {
        Mesh mesh = Mesh::uniform(1.0, N);
        WeightTable t = WeightAssembler(SchemeOrder::integer(g)).table(mesh, kernel, N);
        ConsistencyReport rep = consistency_report(t);
        worst = std::max(worst, rep.defect / (1.0 + rep.mass));
        if (!rep.consistent) {
            std::ostringstream m;
            m << kernel.describe() << " a=" << alpha << " g=" << g << " N=" << N
              << " defect=" << rep.defect;
            out.require(false, m.str());
        }
    });
    out.detail << " worst relative defect " << worst;
    return out;
}

Outcome criterion4() {
    Outcome out;
    double worst = 0.0;
    int cells = 0, dirty = 0;
    sweep([&](const Kernel& kernel, double alpha, int g, std::size_t N) {
        Mesh mesh = Mesh::uniform(1.0, N);
        PositivityAudit audit =
            weight_positivity_audit(mesh, kernel, SchemeOrder::integer(g), N);
        ++cells;
        worst = std::min(worst, audit.worst_margin);
        if (!audit.clean()) {
            ++dirty;
            std::ostringstream m;
            m << kernel.describe() << " a=" << alpha << " g=" << g << " N=" << N << ": "
              << audit.violations.size() << " negative weight(s), worst "
              << audit.worst_margin << " at k=" << audit.violations.front().k;
            out.require(false, m.str());
        }
    });
    out.detail << " cells=" << cells << " dirty=" << dirty << " worst margin=" << worst;
    return out;
}

// ---- criterion 10: convolution against the Beta-function oracle

Outcome criterion10() {
    Outcome out;
    Mesh mesh = Mesh::uniform(1.0, 160);
    double worst = 0.0;
    int pairs = 0;
    for (int m = 0; m <= 3; ++m) {
        std::vector<double> samples(161);
        for (std::size_t k = 0; k <= 160; ++k) samples[k] = std::pow(mesh.node(k), m);
        for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            ++pairs;
            auto w = WeightAssembler(SchemeOrder::integer(4), StartupPolicy::shifted_full_order)
                         .collapsed(mesh, Kernel::power_singular(alpha), 160);
            double got = convolve(samples, w);
            double want = beta_function(static_cast<double>(m) + 1.0, alpha);
            double err = std::abs(got - want);
            worst = std::max(worst, err);
            if (err > 1e-8) {
                std::ostringstream msg;
                msg << "m=" << m << " a=" << alpha << " err=" << err;
                out.require(false, msg.str());
            }
        }
    }
    out.detail << " pairs=" << pairs << " worst=" << worst
               << " (full-order shifted startup)";
    return out;
}

// ---- criterion 11: property suite

Outcome criterion11() {
    Outcome out;

    // partition of unity, all solvable orders, dense sigma sampling
    for (int g = 1; g <= 5; ++g) {
        StencilSet st = build_stencil(SchemeOrder::integer(g), 1.0);
        for (int i = 0; i <= 1000; ++i) {
            double sig = -1.0 + i / 1000.0;
            double s = 0.0;
            for (const Polynomial& c : st.polys) s += c.eval(sig);
            if (std::abs(s - 1.0) > 1e-13) {
                out.require(false, "partition of unity violated");
                break;
            }
        }
    }

    // polynomial exactness up to degree gamma-1 on random uniform meshes
    unsigned seed = 12345;
    auto next = [&seed]() {
        seed = seed * 1664525u + 1013904223u;
        return (seed >> 8) / 16777216.0;
    };
    for (int g = 1; g <= 5; ++g) {
        StencilSet st = build_stencil(SchemeOrder::integer(g), 1.0);
        for (int trial = 0; trial < 25; ++trial) {
            double tau = 0.02 + 0.3 * next();
            double t_k = 0.5 + next();
            for (int p = 0; p < g; ++p) {
                std::vector<double> samples(static_cast<std::size_t>(g));
                for (int j = 0; j < g; ++j)
                    samples[static_cast<std::size_t>(j)] = std::pow(t_k - j * tau, p);
                double s = t_k - next() * tau;
                double got = interpolate(st, samples, s, t_k, tau);
                double want = std::pow(s, p);
                if (std::abs(got - want) > 1e-11 * std::max(1.0, std::abs(want))) {
                    std::ostringstream m;
                    m << "exactness g=" << g << " p=" << p;
                    out.require(false, m.str());
                }
            }
        }
    }

    // linearity in f and homogeneity in the kernel
    {
        Mesh mesh = Mesh::uniform(1.0, 24);
        WeightAssembler assembler(SchemeOrder::integer(3));
        auto ws = assembler.collapsed(mesh, Kernel::power_singular(0.5), 24);
        auto wc = assembler.collapsed(mesh, Kernel::caputo(0.5), 24);
        double gam = std::tgamma(0.5);
        for (std::size_t k = 0; k <= 24; ++k)
            if (std::abs(wc[k] * gam - ws[k]) > 1e-13 * (1.0 + std::abs(ws[k])))
                out.require(false, "kernel homogeneity");
        std::vector<double> f(25), g2(25), combo(25);
        for (std::size_t k = 0; k <= 24; ++k) {
            double x = mesh.node(k);
            f[k] = std::sin(x);
            g2[k] = std::exp(x);
            combo[k] = 0.3 * f[k] + 1.7 * g2[k];
        }
        double lhs = convolve(combo, ws);
        double rhs = 0.3 * convolve(f, ws) + 1.7 * convolve(g2, ws);
        out.require(std::abs(lhs - rhs) <= 1e-13 * (1.0 + std::abs(rhs)), "linearity in f");
    }

    // residual exactness of the Volterra recurrence
    {
        Kernel kernel = Kernel::power_singular(0.5);
        VolterraProblem p{manufacture_forcing(6.0, kernel), kernel, Mesh::uniform(1.0, 64),
                          SchemeOrder::integer(4)};
        auto u = step_solve(p);
        for (double r : recurrence_residual(p, u))
            if (std::abs(r) > 1e-12) {
                out.require(false, "volterra residual");
                break;
            }
    }
    return out;
}

// ---- criterion 8: blowup recovery (long)

Outcome criterion8() {
    Outcome out;
    StudyResult result = blowup_study();
    const ConvergenceReport& rep = result.reports.front();
    double rate80 = 0.0, rate_last = 0.0;
    for (const ReportRow& row : rep.rows) {
        if (row.N == 80 && row.rate) rate80 = *row.rate;
        if (row.N == 10240 && row.rate) rate_last = *row.rate;
    }
    out.require(rate80 < -10.0, "rate at N=80 should be strongly negative");
    out.require(rate_last >= 3.8 && rate_last <= 4.05, "rate at N=10240 outside [3.8, 4.05]");
    out.detail << " rate(80)=" << rate80 << " rate(10240)=" << rate_last;
    return out;
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    bool with_long = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
        else if (std::strcmp(argv[i], "--long") == 0) with_long = true;
    }

    std::vector<Criterion> criteria = {
        {1, "stencil closed-form equivalence", 1.0, criterion1},
        {2, "stability constants", 1.0, criterion2},
        {3, "consistency identity sweep", 10.0, criterion3},
        {4, "weight positivity sweep", 10.0, criterion4},
        {5, "volterra golden: power kernel, cubic, order 3", 60.0,
         [] { return golden_criterion("ex1_gamma3.json"); }},
        {6, "volterra golden: power kernel, cubic, order 4", 60.0,
         [] { return golden_criterion("ex1_gamma4.json"); }},
        {7, "volterra golden: singular kernel, sextic, orders 3+4", 120.0,
         [] {
             Outcome a = golden_criterion("ex2_gamma3.json");
             Outcome b = golden_criterion("ex2_gamma4.json");
             Outcome out;
             out.pass = a.pass && b.pass;
             out.detail << a.detail.str() << b.detail.str();
             return out;
         }},
        {8, "blowup recovery (long)", 1800.0, criterion8},
        {9, "fracdiff golden: both exponent families", 300.0,
         [] {
             Outcome a = golden_criterion("ex3_alpha.json");
             Outcome b = golden_criterion("ex3_one_minus_alpha.json");
             Outcome out;
             out.pass = a.pass && b.pass;
             out.detail << a.detail.str() << b.detail.str();
             return out;
         }},
        {10, "convolution vs Beta-function oracle", 30.0, criterion10},
        {11, "property suite", 60.0, criterion11},
    };

    int failures = 0, ran = 0;
    for (const Criterion& c : criteria) {
        if (only != 0 && c.id != only) continue;
        if (c.id == 8 && !with_long) {
            if (only == 8) {
                std::printf("[SKIP] criterion 8: %s (pass --long to run)\n", c.name);
                return 0;
            }
            continue;
        }
        ++ran;
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << "exception: " << e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_seconds) {
            out.pass = false;
            out.detail << "; exceeded " << c.budget_seconds << "s budget";
        }
        std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", out.pass ? "PASS" : "FAIL", c.id,
                    c.name, secs, out.detail.str().empty() ? "" : " --",
                    out.detail.str().c_str());
        if (!out.pass) ++failures;
    }
    if (ran == 0) {
        std::printf("no criteria selected\n");
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
