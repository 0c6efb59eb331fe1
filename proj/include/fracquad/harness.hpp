#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracquad/fracdiff.hpp"
#include "fracquad/kernel.hpp"
#include "fracquad/volterra.hpp"

namespace fracquad {

using nlohmann::json;

/// log2 refinement rate for a mesh-doubling pair; undefined unless both
/// errors are strictly positive.
inline std::optional<double> refinement_rate(double e_coarse, double e_fine) {
    if (!(e_coarse > 0.0) || !(e_fine > 0.0)) return std::nullopt;
    return std::log2(e_coarse / e_fine);
}

struct ReportRow {
    std::size_t N = 0;
    double E_inf = 0.0;
    std::optional<double> rate;
    std::string error; // non-empty if the solve failed; remaining rows still run
};

struct ConvergenceReport {
    std::string experiment;
    std::string kernel;
    double alpha = 0.0;
    double gamma = 0.0;
    std::vector<ReportRow> rows;
    std::string exact_name;
    double T = 1.0;
    double wall_seconds = 0.0;
};

struct GoldenTargets {
    double rate_tol = 0.05;
    std::vector<double> final_rates;          // one per alpha, at the last ladder entry
    std::optional<double> error_factor;       // E within this factor of printed values
    std::vector<double> final_errors;
    std::optional<std::size_t> negative_rate_at; // N where the transient blowup shows
    double negative_rate_max = -10.0;
};

struct ExperimentSpec {
    std::string experiment;
    std::string problem;      // "volterra" | "fracdiff"
    std::string kernel_form;  // volterra only
    std::vector<double> alphas;
    double gamma = 0.0;       // ignored when gamma_is_alpha
    bool gamma_is_alpha = false;
    double monomial_m = 0.0;  // volterra exact u = t^m
    std::string rho_mode;     // fracdiff: "alpha" | "one-minus-alpha"
    double T = 1.0;
    std::size_t M = 25;
    std::vector<std::size_t> ladder;
    StartupPolicy policy = StartupPolicy::reduced_order;
    bool long_run = false;
    std::optional<GoldenTargets> golden;

    static ExperimentSpec from_json(const json& j) {
        ExperimentSpec s;
        s.experiment = j.at("experiment").get<std::string>();
        s.problem = j.at("problem").get<std::string>();
        if (j.contains("kernel")) s.kernel_form = j["kernel"].at("form").get<std::string>();
        s.alphas = j.at("alphas").get<std::vector<double>>();
        if (j.at("gamma").is_string()) {
            if (j["gamma"].get<std::string>() != "alpha")
                throw std::invalid_argument("ExperimentSpec: gamma must be a number or \"alpha\"");
            s.gamma_is_alpha = true;
        } else {
            s.gamma = j["gamma"].get<double>();
        }
        const json& ex = j.at("exact");
        if (ex.at("type") == "monomial") s.monomial_m = ex.at("m").get<double>();
        else if (ex.at("type") == "sin-pi-x") s.rho_mode = ex.at("rho").get<std::string>();
        else throw std::invalid_argument("ExperimentSpec: unknown exact-solution type");
        s.T = j.value("T", 1.0);
        s.M = j.value("M", std::size_t{25});
        s.ladder = j.at("ladder").get<std::vector<std::size_t>>();
        if (j.value("startup", std::string("reduced")) == "shifted")
            s.policy = StartupPolicy::shifted_full_order;
        s.long_run = j.value("long", false);
        if (j.contains("golden")) {
            GoldenTargets g;
            const json& gj = j["golden"];
            g.rate_tol = gj.value("rate_tol", 0.05);
            if (gj.contains("rates")) g.final_rates = gj["rates"].get<std::vector<double>>();
            if (gj.contains("error_factor")) g.error_factor = gj["error_factor"].get<double>();
            if (gj.contains("errors")) g.final_errors = gj["errors"].get<std::vector<double>>();
            if (gj.contains("negative_rate_at")) {
                g.negative_rate_at = gj["negative_rate_at"].at("N").get<std::size_t>();
                g.negative_rate_max = gj["negative_rate_at"].value("max", -10.0);
            }
            s.golden = g;
        }
        return s;
    }

    static ExperimentSpec load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("ExperimentSpec: cannot open " + path);
        json j;
        in >> j;
        return from_json(j);
    }
};

struct StudyResult {
    ExperimentSpec spec;
    std::vector<ConvergenceReport> reports; // one per alpha
};

namespace detail {

inline double volterra_max_error(const std::vector<double>& u, const Mesh& mesh, double m) {
    double e = 0.0;
    for (std::size_t k = 0; k <= mesh.size(); ++k)
        e = std::max(e, std::abs(u[k] - std::pow(mesh.node(k), m)));
    return e;
}

} // namespace detail

/// Runs one convergence ladder per alpha; solver failures are recorded on
/// the affected row and the remaining rows still run.
inline StudyResult run_study(const ExperimentSpec& spec) {
    StudyResult result;
    result.spec = spec;
    for (double alpha : spec.alphas) {
        ConvergenceReport rep;
        rep.experiment = spec.experiment;
        rep.alpha = alpha;
        rep.T = spec.T;
        auto t0 = std::chrono::steady_clock::now();

        double prev_err = -1.0;
        std::size_t prev_N = 0;
        for (std::size_t N : spec.ladder) {
            ReportRow row;
            row.N = N;
            try {
                double err = 0.0;
                if (spec.problem == "volterra") {
                    Kernel kernel = Kernel::parse(spec.kernel_form, alpha);
                    rep.kernel = kernel.describe();
                    rep.gamma = spec.gamma_is_alpha ? alpha : spec.gamma;
                    std::ostringstream nm;
                    nm << "t^" << spec.monomial_m;
                    rep.exact_name = nm.str();
                    SchemeOrder order = spec.gamma_is_alpha
                                            ? SchemeOrder::fractional(alpha)
                                            : SchemeOrder::integer(static_cast<int>(spec.gamma));
                    VolterraProblem prob{manufacture_forcing(spec.monomial_m, kernel), kernel,
                                         Mesh::uniform(spec.T, N), order, spec.policy};
                    err = detail::volterra_max_error(step_solve(prob), prob.mesh,
                                                     spec.monomial_m);
                } else if (spec.problem == "fracdiff") {
                    double rho = (spec.rho_mode == "one-minus-alpha") ? 1.0 - alpha : alpha;
                    rep.kernel = Kernel::caputo(alpha).describe();
                    rep.gamma = alpha;
                    rep.exact_name = "sin(pi x) t^rho";
                    ManufacturedSource src = manufacture_source(rho, alpha);
                    FracDiffProblem prob{
                        Grid1D::interior(spec.M),
                        Mesh::uniform(spec.T, N),
                        alpha,
                        SourceTreatment::analytic_integral,
                        [src](double x, double t) { return src.f(x, t); },
                        [src](double x, double t) { return src.forcing_integral(x, t); },
                        nullptr};
                    FracDiffSolution sol = solve_fracdiff(prob);
                    err = max_error(sol, prob.grid, prob.mesh,
                                    [&](double x, double t) { return src.exact(x, t); });
                } else {
                    throw std::invalid_argument("run_study: unknown problem '" + spec.problem +
                                                "'");
                }
                row.E_inf = err;
                if (prev_err >= 0.0 && N == 2 * prev_N)
                    row.rate = refinement_rate(prev_err, err);
                prev_err = err;
                prev_N = N;
            } catch (const std::exception& e) {
                row.error = e.what();
                prev_err = -1.0;
            }
            rep.rows.push_back(row);
        }
        rep.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.reports.push_back(std::move(rep));
    }
    return result;
}

/// The long-run transient-blowup ladder: second-kind equation with the
/// weakly singular kernel, gamma = 4, alpha = 0.25, N up to 10240.
inline ExperimentSpec blowup_spec() {
    ExperimentSpec s;
    s.experiment = "volterra-singular-order4-blowup";
    s.problem = "volterra";
    s.kernel_form = "power-singular";
    s.alphas = {0.25};
    s.gamma = 4;
    s.monomial_m = 6;
    s.ladder = {10, 20, 40, 80, 160, 320, 640, 1280, 2560, 5120, 10240};
    s.long_run = true;
    GoldenTargets g;
    g.rate_tol = 0.125;
    g.final_rates = {3.925}; // accepted band [3.8, 4.05]
    g.negative_rate_at = 80;
    g.negative_rate_max = -10.0;
    s.golden = g;
    return s;
}

inline StudyResult blowup_study() { return run_study(blowup_spec()); }

struct CheckOutcome {
    bool pass = true;
    std::vector<std::string> messages;

    void fail(std::string msg) {
        pass = false;
        messages.push_back(std::move(msg));
    }
};

/// Compares the final-ladder rates (and optionally errors) of a study
/// against the golden targets in its spec.
inline CheckOutcome check_golden(const StudyResult& result) {
    CheckOutcome out;
    if (!result.spec.golden) return out;
    const GoldenTargets& g = *result.spec.golden;
    for (std::size_t i = 0; i < result.reports.size(); ++i) {
        const ConvergenceReport& rep = result.reports[i];
        std::ostringstream tag;
        tag << rep.experiment << " alpha=" << rep.alpha;
        if (rep.rows.empty()) {
            out.fail(tag.str() + ": no rows");
            continue;
        }
        const ReportRow& last = rep.rows.back();
        if (!last.error.empty()) {
            out.fail(tag.str() + ": solver error: " + last.error);
            continue;
        }
        if (i < g.final_rates.size()) {
            if (!last.rate) {
                out.fail(tag.str() + ": final rate undefined");
            } else if (std::abs(*last.rate - g.final_rates[i]) > g.rate_tol) {
                std::ostringstream m;
                m << tag.str() << ": rate " << *last.rate << " vs target " << g.final_rates[i]
                  << " +/- " << g.rate_tol;
                out.fail(m.str());
            }
        }
        if (g.error_factor && i < g.final_errors.size()) {
            double f = *g.error_factor;
            if (!(last.E_inf <= f * g.final_errors[i] && last.E_inf >= g.final_errors[i] / f)) {
                std::ostringstream m;
                m << tag.str() << ": E_inf " << last.E_inf << " outside " << f << "x of "
                  << g.final_errors[i];
                out.fail(m.str());
            }
        }
        if (g.negative_rate_at) {
            bool found = false;
            for (const ReportRow& row : rep.rows) {
                if (row.N == *g.negative_rate_at && row.rate) {
                    found = true;
                    if (!(*row.rate < g.negative_rate_max)) {
                        std::ostringstream m;
                        m << tag.str() << ": rate at N=" << row.N << " is " << *row.rate
                          << ", expected < " << g.negative_rate_max;
                        out.fail(m.str());
                    }
                }
            }
            if (!found) out.fail(tag.str() + ": blowup row missing");
        }
    }
    return out;
}

inline json report_to_json(const ConvergenceReport& rep) {
    json rows = json::array();
    for (const ReportRow& r : rep.rows) {
        json row{{"N", r.N}, {"E_inf", r.E_inf}};
        row["rate"] = r.rate ? json(*r.rate) : json(nullptr);
        if (!r.error.empty()) row["error"] = r.error;
        rows.push_back(row);
    }
    return json{{"experiment", rep.experiment},
                {"kernel", rep.kernel},
                {"alpha", rep.alpha},
                {"gamma", rep.gamma},
                {"rows", rows}};
}

inline ConvergenceReport report_from_json(const json& j) {
    ConvergenceReport rep;
    rep.experiment = j.at("experiment").get<std::string>();
    rep.kernel = j.at("kernel").get<std::string>();
    rep.alpha = j.at("alpha").get<double>();
    rep.gamma = j.at("gamma").get<double>();
    for (const json& row : j.at("rows")) {
        ReportRow r;
        r.N = row.at("N").get<std::size_t>();
        r.E_inf = row.at("E_inf").get<double>();
        if (row.contains("rate") && !row["rate"].is_null()) r.rate = row["rate"].get<double>();
        if (row.contains("error")) r.error = row["error"].get<std::string>();
        rep.rows.push_back(r);
    }
    return rep;
}

inline json study_to_json(const StudyResult& result) {
    json arr = json::array();
    for (const ConvergenceReport& rep : result.reports) arr.push_back(report_to_json(rep));
    return arr;
}

/// CSV with a metadata comment line followed by the alpha,N,E_inf,rate rows.
inline std::string study_to_csv(const StudyResult& result) {
    std::ostringstream out;
    out.precision(17);
    std::string kern = result.reports.empty() ? "" : result.reports.front().kernel;
    out << "# experiment=" << result.spec.experiment << " kernel=" << kern << " gamma=";
    if (result.spec.gamma_is_alpha) out << "alpha";
    else out << result.spec.gamma;
    out << "\n";
    out << "alpha,N,E_inf,rate\n";
    for (const ConvergenceReport& rep : result.reports)
        for (const ReportRow& r : rep.rows) {
            out << rep.alpha << "," << r.N << "," << r.E_inf << ",";
            if (r.rate) out << *r.rate;
            out << "\n";
        }
    return out.str();
}

/// Parses study_to_csv output back into (alpha, rows) groups.
inline std::vector<ConvergenceReport> study_from_csv(const std::string& text) {
    std::vector<ConvergenceReport> reports;
    std::istringstream in(text);
    std::string line;
    std::string experiment, gamma_str;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto epos = line.find("experiment=");
            auto gpos = line.find("gamma=");
            if (epos != std::string::npos)
                experiment = line.substr(epos + 11, line.find(' ', epos + 11) - epos - 11);
            if (gpos != std::string::npos) gamma_str = line.substr(gpos + 6);
            continue;
        }
        if (line.rfind("alpha,", 0) == 0) continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        double alpha = std::stod(cell);
        ReportRow row;
        std::getline(ls, cell, ',');
        row.N = static_cast<std::size_t>(std::stoull(cell));
        std::getline(ls, cell, ',');
        row.E_inf = std::stod(cell);
        if (std::getline(ls, cell, ',') && !cell.empty()) row.rate = std::stod(cell);
        if (reports.empty() || reports.back().alpha != alpha) {
            ConvergenceReport rep;
            rep.experiment = experiment;
            rep.alpha = alpha;
            if (gamma_str != "alpha" && !gamma_str.empty()) rep.gamma = std::stod(gamma_str);
            else rep.gamma = alpha;
            reports.push_back(rep);
        }
        reports.back().rows.push_back(row);
    }
    return reports;
}

} // namespace fracquad
