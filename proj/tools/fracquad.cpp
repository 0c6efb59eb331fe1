// Command-line front end: weight tables, convolution quadrature, Volterra
// and fractional-diffusion solves, stability reports, convergence studies.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracquad/fracdiff.hpp"
#include "fracquad/harness.hpp"
#include "fracquad/quadrature.hpp"
#include "fracquad/stability.hpp"
#include "fracquad/volterra.hpp"

using nlohmann::json;
using namespace fracquad;

namespace {

SchemeOrder parse_order(const std::string& order, double alpha) {
    if (order == "alpha") return SchemeOrder::fractional(alpha);
    return SchemeOrder::integer(std::stoi(order));
}

StartupPolicy parse_policy(const std::string& s) {
    if (s == "shifted") return StartupPolicy::shifted_full_order;
    if (s == "reduced") return StartupPolicy::reduced_order;
    throw CLI::ValidationError("--startup must be 'reduced' or 'shifted'");
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file " + out_path);
    out << text;
}

// Built-in integrands: "1" or "t^<m>".
struct Integrand {
    double m = 0.0;
    bool constant = false;

    static Integrand parse(const std::string& name) {
        if (name == "1" || name == "one") return {0.0, true};
        if (name.rfind("t^", 0) == 0) return {std::stod(name.substr(2)), false};
        throw CLI::ValidationError("--f must be '1' or 't^<m>'");
    }

    double operator()(double t) const { return constant ? 1.0 : std::pow(t, m); }
};

int cmd_weights(const std::string& kernel_name, double alpha, const std::string& order_s,
                std::size_t N, double T, std::size_t target, const std::string& startup,
                bool with_raw, const std::string& out_path) {
    Kernel kernel = Kernel::parse(kernel_name, alpha);
    Mesh mesh = Mesh::uniform(T, N);
    if (target == 0) target = N;
    WeightTable table = WeightAssembler(parse_order(order_s, alpha), parse_policy(startup))
                            .table(mesh, kernel, target, with_raw);
    std::ostringstream csv;
    csv.precision(17);
    csv << "k,w\n";
    for (std::size_t k = 0; k < table.collapsed.size(); ++k)
        csv << k << "," << table.collapsed[k] << "\n";
    if (with_raw) {
        csv << "k,j,w_raw\n";
        for (std::size_t k = 1; k <= table.raw.size(); ++k)
            for (std::size_t j = 0; j < table.raw[k - 1].size(); ++j)
                csv << k << "," << j << "," << table.raw[k - 1][j] << "\n";
    }
    emit(out_path, csv.str());
    return 0;
}

int cmd_integrate(const std::string& kernel_name, double alpha, const std::string& order_s,
                  std::size_t N, double T, const std::string& f_name,
                  const std::string& startup, const std::string& out_path) {
    Kernel kernel = Kernel::parse(kernel_name, alpha);
    Mesh mesh = Mesh::uniform(T, N);
    Integrand f = Integrand::parse(f_name);
    WeightAssembler assembler(parse_order(order_s, alpha), parse_policy(startup));
    std::vector<double> values = convolve_series(f, mesh, kernel, assembler);

    json out;
    out["nodes"] = std::vector<double>(mesh.nodes().begin(), mesh.nodes().end());
    out["values"] = values;
    if (kernel.has_closed_form()) {
        // K * t^m = scale * B(m+1, beta+1) t^{m+beta+1}
        double beta = kernel.exponent();
        double coeff = kernel.scale() * beta_function(f.m + 1.0, beta + 1.0);
        std::vector<double> exact(N + 1), err(N + 1);
        for (std::size_t n = 0; n <= N; ++n) {
            exact[n] = coeff * std::pow(mesh.node(n), f.m + beta + 1.0);
            err[n] = std::abs(values[n] - exact[n]);
        }
        out["exact"] = exact;
        out["error"] = err;
    }
    emit(out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_solve(const std::string& example, double alpha, const std::string& order_s,
              std::size_t N, double T, const std::string& kernel_name, double m,
              const std::string& startup, const std::string& out_path) {
    std::string kname = kernel_name;
    double expo = m;
    if (example == "1") { kname = "power"; expo = 3.0; }
    else if (example == "2") { kname = "power-singular"; expo = 6.0; }
    else if (example != "custom")
        throw CLI::ValidationError("--example must be 1, 2 or custom");
    Kernel kernel = Kernel::parse(kname, alpha);
    VolterraProblem prob{manufacture_forcing(expo, kernel), kernel, Mesh::uniform(T, N),
                         parse_order(order_s, alpha), parse_policy(startup)};
    std::vector<double> u = step_solve(prob);

    json out;
    out["nodes"] = std::vector<double>(prob.mesh.nodes().begin(), prob.mesh.nodes().end());
    out["u"] = u;
    std::vector<double> exact(N + 1);
    double e_inf = 0.0;
    for (std::size_t n = 0; n <= N; ++n) {
        exact[n] = std::pow(prob.mesh.node(n), expo);
        e_inf = std::max(e_inf, std::abs(u[n] - exact[n]));
    }
    out["exact"] = exact;
    out["E_inf"] = e_inf;
    emit(out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_stability(int order, std::optional<double> alpha, std::size_t N) {
    std::printf("order  sigma*          min-sum         verdict\n");
    if (order >= 3 && order <= 7) {
        StabilityMargin m = negative_sum_min(order);
        std::printf("%-6d %-15.10f %-15.10f %s\n", m.gamma, m.sigma_star, m.min_value,
                    m.stable ? "stable (>= -1)" : "UNSTABLE (< -1)");
    } else {
        std::printf("%-6d %-15s %-15s %s\n", order, "-", "-",
                    "stable (coefficient sums trivially bounded)");
    }
    if (alpha) {
        Kernel kernel = Kernel::power_singular(*alpha);
        Mesh mesh = Mesh::uniform(1.0, N);
        SchemeOrder so = (order <= 5) ? SchemeOrder::integer(order)
                                      : SchemeOrder::analysis_only(order);
        PositivityAudit audit = weight_positivity_audit(mesh, kernel, so, N);
        std::printf("\npositivity audit: K = t^(alpha-1), alpha=%g, N=%zu\n", *alpha, N);
        std::printf("  weights checked: %zu, worst margin: %.6e\n", audit.checked,
                    audit.worst_margin);
        if (audit.clean()) {
            std::printf("  no violations\n");
        } else {
            for (const auto& v : audit.violations)
                std::printf("  w[%zu] = %.6e < 0\n", v.k, v.value);
        }
    }
    return 0;
}

int cmd_fracdiff(double alpha, const std::string& rho_mode, std::size_t M,
                 std::vector<std::size_t> Ns, double T, const std::string& out_path) {
    ExperimentSpec spec;
    spec.experiment = "fracdiff-cli";
    spec.problem = "fracdiff";
    spec.alphas = {alpha};
    spec.gamma_is_alpha = true;
    spec.rho_mode = rho_mode;
    spec.T = T;
    spec.M = M;
    spec.ladder = std::move(Ns);
    StudyResult result = run_study(spec);
    emit(out_path, study_to_json(result).dump(2) + "\n");
    for (const auto& rep : result.reports)
        for (const auto& row : rep.rows)
            if (!row.error.empty()) return 1;
    return 0;
}

int cmd_converge(const std::string& spec_path, const std::string& out_path, bool allow_long,
                 bool check) {
    ExperimentSpec spec = ExperimentSpec::load(spec_path);
    if (spec.long_run && !allow_long) {
        std::cerr << "spec " << spec.experiment
                  << " is a long-running study; pass --long to run it\n";
        return 2;
    }
    StudyResult result = run_study(spec);
    std::string text;
    if (out_path.size() >= 4 && out_path.substr(out_path.size() - 4) == ".csv")
        text = study_to_csv(result);
    else
        text = study_to_json(result).dump(2) + "\n";
    emit(out_path, text);
    if (check) {
        CheckOutcome outcome = check_golden(result);
        for (const std::string& msg : outcome.messages) std::cerr << "check: " << msg << "\n";
        if (!outcome.pass) return 1;
        std::cerr << "check: all golden tolerances met\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"composite quadrature for weakly singular convolution integrals"};
    app.require_subcommand(1);

    std::string kernel_name = "power-singular", order_s = "2", startup = "reduced";
    std::string out_path, f_name = "t^3", example = "custom", rho_mode = "alpha", spec_path;
    double alpha = 0.5, T = 1.0, m = 3.0;
    std::size_t N = 160, target = 0, M = 25;
    std::vector<std::size_t> Ns;
    int order_i = 4;
    std::optional<double> audit_alpha;
    bool with_raw = false, allow_long = false, check = false;

    auto* w = app.add_subcommand("weights", "emit a collapsed weight table as CSV");
    w->add_option("--kernel", kernel_name, "const|power|power-singular|caputo");
    w->add_option("--alpha", alpha, "kernel exponent parameter");
    w->add_option("--order", order_s, "scheme order 1..5 or 'alpha'");
    w->add_option("--N", N, "number of mesh steps");
    w->add_option("--T", T, "horizon");
    w->add_option("--target", target, "target node index (default N)");
    w->add_option("--startup", startup, "reduced|shifted");
    w->add_flag("--raw", with_raw, "also emit raw per-subinterval weights");
    w->add_option("--out", out_path, "output file (default stdout)");

    auto* q = app.add_subcommand("integrate", "running convolution integral along the mesh");
    q->add_option("--kernel", kernel_name, "const|power|power-singular|caputo");
    q->add_option("--alpha", alpha, "kernel exponent parameter");
    q->add_option("--order", order_s, "scheme order 1..5 or 'alpha'");
    q->add_option("--N", N, "number of mesh steps");
    q->add_option("--T", T, "horizon");
    q->add_option("--f", f_name, "built-in integrand: '1' or 't^<m>'");
    q->add_option("--startup", startup, "reduced|shifted");
    q->add_option("--out", out_path, "output file (default stdout)");

    auto* s = app.add_subcommand("solve", "second-kind Volterra solve");
    s->add_option("--example", example, "1|2|custom");
    s->add_option("--alpha", alpha, "kernel exponent parameter");
    s->add_option("--order", order_s, "scheme order 1..5 or 'alpha'");
    s->add_option("--N", N, "number of mesh steps");
    s->add_option("--T", T, "horizon");
    s->add_option("--kernel", kernel_name, "kernel for --example custom");
    s->add_option("--m", m, "exact-solution exponent for --example custom");
    s->add_option("--startup", startup, "reduced|shifted");
    s->add_option("--out", out_path, "output file (default stdout)");

    auto* st = app.add_subcommand("stability", "coefficient-sum margins and weight audit");
    st->add_option("--order", order_i, "scheme order (3..7 for margin table)")->required();
    st->add_option("--alpha", audit_alpha, "run the positivity audit at this alpha");
    st->add_option("--N", N, "audit mesh size");

    auto* fd = app.add_subcommand("fracdiff", "integrated time-fractional diffusion study");
    fd->add_option("--alpha", alpha, "fractional order")->required();
    fd->add_option("--rho", rho_mode, "exact-solution exponent: alpha|one-minus-alpha");
    fd->add_option("--M", M, "interior space points");
    fd->add_option("--N", Ns, "time steps (repeatable for a ladder)")->required();
    fd->add_option("--T", T, "horizon");
    fd->add_option("--out", out_path, "output file (default stdout)");

    auto* cv = app.add_subcommand("converge", "run a declarative convergence study");
    cv->add_option("--spec", spec_path, "experiment spec JSON")->required();
    cv->add_option("--out", out_path, "report file (.json or .csv; default stdout JSON)");
    cv->add_flag("--long", allow_long, "allow long-running specs");
    cv->add_flag("--check", check, "exit nonzero if golden tolerances fail");

    CLI11_PARSE(app, argc, argv);

    try {
        if (w->parsed())
            return cmd_weights(kernel_name, alpha, order_s, N, T, target, startup, with_raw,
                               out_path);
        if (q->parsed())
            return cmd_integrate(kernel_name, alpha, order_s, N, T, f_name, startup, out_path);
        if (s->parsed())
            return cmd_solve(example, alpha, order_s, N, T, kernel_name, m, startup, out_path);
        if (st->parsed()) return cmd_stability(order_i, audit_alpha, N);
        if (fd->parsed()) return cmd_fracdiff(alpha, rho_mode, M, Ns, T, out_path);
        if (cv->parsed()) return cmd_converge(spec_path, out_path, allow_long, check);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
