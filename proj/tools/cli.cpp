#include "cli.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "tailinv/cancellation.hpp"
#include "tailinv/forward.hpp"
#include "tailinv/inverse.hpp"
#include "tailinv/measure.hpp"
#include "tailinv/montecarlo.hpp"
#include "tailinv/oscillating.hpp"
#include "tailinv/serialize.hpp"

namespace tailinv::cli {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open " + path);
    try {
        return Json::parse(is);
    } catch (const Json::parse_error& e) {
        throw ValidationError("invalid JSON in " + path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ComputeError("cannot open " + path + " for writing");
    os << text;
    if (!os) throw ComputeError("write failure on " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
        os << "\n";
    }
    write_text_file(path, os.str());
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw ValidationError("cannot parse number '" + item + "'");
        }
        if (pos != item.size()) throw ValidationError("cannot parse number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError("empty number list");
    return out;
}

ScanOptions scan_options(double theta_max, double grid_step, double zero_tol) {
    ScanOptions o;
    o.theta_max = theta_max;
    o.grid_step = grid_step;
    o.zero_tol = zero_tol;
    return o;
}

// Default evaluation panel used by roundtrip when none is supplied.
std::vector<EvalSet> default_panel(int dim) {
    std::vector<EvalSet> panel;
    panel.push_back(EvalSet::norm_exceed(dim, 1.0));
    panel.push_back(EvalSet::norm_exceed(dim, 2.0));
    {
        std::vector<int> signs(static_cast<std::size_t>(dim), 0);
        signs[0] = +1;
        Vec t = Vec::Zero(dim);
        t[0] = 1.0;
        panel.push_back(EvalSet::half_line(signs, t));
    }
    {
        std::vector<int> signs(static_cast<std::size_t>(dim), 0);
        signs[0] = -1;
        Vec t = Vec::Zero(dim);
        t[0] = 1.5;
        panel.push_back(EvalSet::half_line(signs, t));
    }
    {
        Vec lo = Vec::Constant(dim, -2.0);
        Vec hi = Vec::Constant(dim, 2.0);
        lo[0] = 1.0;
        hi[0] = 3.0;
        panel.push_back(EvalSet::rect(lo, hi));
    }
    return panel;
}

struct ReportSink {
    std::string path;    // empty: stdout
    std::string plot_prefix;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    int emit(Json report) const {
        report["schema_version"] = 1;
        const std::string text = report.dump(2) + "\n";
        if (path.empty()) {
            std::cout << text;
        } else {
            write_text_file(path, text);
            // Volatile run metadata lives in a sidecar so reports stay
            // byte-identical across runs.
            const auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
            const auto now = std::chrono::system_clock::now().time_since_epoch();
            Json meta{{"wall_seconds", wall.count()},
                      {"unix_time", std::chrono::duration_cast<std::chrono::seconds>(now).count()}};
            write_text_file(path + ".meta.json", meta.dump(2) + "\n");
        }
        if (!plot_prefix.empty())
            for (const std::string& f : emit_plot_data(report, plot_prefix))
                std::cerr << "wrote " << f << "\n";
        return 0;
    }
};

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

struct CheckOpts {
    std::string weights;
    std::string family_path;
    std::string product_path;
    std::string uniform;
    double alpha = 1.0;
    double theta_max = 50.0;
    double grid_step = 0.01;
    double zero_tol = 1e-9;
};

int run_check(const CheckOpts& o, const ReportSink& sink) {
    const ScanOptions opts = scan_options(o.theta_max, o.grid_step, o.zero_tol);
    int sources = 0;
    for (const std::string& s : {o.weights, o.family_path, o.product_path, o.uniform})
        if (!s.empty()) ++sources;
    if (sources != 1)
        throw ValidationError("check: give exactly one of --weights, --family, --product, --uniform");

    DeterminingVerdict verdict;
    Json input;
    if (!o.weights.empty()) {
        const auto psis = parse_double_list(o.weights);
        verdict = check_scalar_determining(psis, o.alpha, opts);
        input = Json{{"weights", psis}};
    } else if (!o.family_path.empty()) {
        const WeightFamily fam = weight_family_from_json(read_json_file(o.family_path));
        if (fam.kind() == WeightKind::Scalars)
            verdict = check_scalar_determining(fam, o.alpha, opts);
        else if (fam.kind() == WeightKind::DiagonalVectors)
            verdict = check_diagonal_determining(fam, o.alpha, opts);
        else
            throw ValidationError("check: full matrix families have no cancellation check; "
                                  "use the invert command for those");
        input = Json{{"family", o.family_path}};
    } else if (!o.product_path.empty()) {
        const ProductLaw law(discrete_from_json(read_json_file(o.product_path)));
        verdict = check_product_determining(law, o.alpha, opts);
        input = Json{{"product", o.product_path}};
    } else {
        const auto ab = parse_double_list(o.uniform);
        if (ab.size() != 2) throw ValidationError("check: --uniform wants 'a,b'");
        verdict = check_uniform_product(ab[0], ab[1], o.alpha, opts);
        input = Json{{"uniform", ab}};
    }

    Json report{{"command", "check"},
                {"alpha", o.alpha},
                {"input", input},
                {"verdict", to_json(verdict)}};
    return sink.emit(report);
}

// ---------------------------------------------------------------------------
// mellin
// ---------------------------------------------------------------------------

struct MellinOpts {
    std::string rho_path;
    double alpha = 1.0;
    int j = 1;
    std::string pattern;
    int axis = 1;
    double theta_max = 50.0;
    double grid_step = 0.01;
    std::string csv_path;
};

int run_mellin(const MellinOpts& o, const ReportSink& sink) {
    const DiscreteMeasure rho = discrete_from_json(read_json_file(o.rho_path));
    const int d = rho.dim();
    const QuadrantSplit split = quadrant_split(rho);
    if (!split.axes_remainder.empty())
        std::cerr << "note: " << split.axes_remainder.atoms().size()
                  << " atom(s) with zero coordinates were excluded from the quadrant system\n";
    if (split.parts.empty()) throw ValidationError("mellin: no atoms with nonzero coordinates");

    SignPattern pattern = SignPattern::zeros(d);
    if (!o.pattern.empty()) {
        const auto bits = parse_double_list(o.pattern);
        if (static_cast<int>(bits.size()) != d) throw ValidationError("mellin: pattern length must match dim");
        std::vector<int> m;
        for (double b : bits) m.push_back(static_cast<int>(b));
        pattern = SignPattern(m);
    }
    if (o.axis < 1 || o.axis > d) throw ValidationError("mellin: axis out of range");

    const CancellationTask task{{o.j}, o.alpha, o.alpha / 2.0};
    std::vector<Vec> thetas;
    for (double t = -o.theta_max; t <= o.theta_max + 1e-12; t += o.grid_step) {
        Vec theta = Vec::Zero(d);
        theta[o.axis - 1] = t;
        thetas.push_back(theta);
    }
    const MellinProfile profile = mellin_profile(split.parts, task, o.j, pattern, thetas);

    Json arr_theta = Json::array();
    Json arr_re = Json::array();
    Json arr_im = Json::array();
    Json arr_abs = Json::array();
    double min_abs = std::numeric_limits<double>::infinity();
    double min_theta = 0.0;
    std::vector<std::vector<double>> csv_rows;
    for (std::size_t i = 0; i < profile.values.size(); ++i) {
        const double t = profile.thetas[i][o.axis - 1];
        const Complex v = profile.values[i];
        arr_theta.push_back(t);
        arr_re.push_back(v.real());
        arr_im.push_back(v.imag());
        arr_abs.push_back(std::abs(v));
        csv_rows.push_back({t, v.real(), v.imag(), std::abs(v)});
        if (std::abs(v) < min_abs) {
            min_abs = std::abs(v);
            min_theta = t;
        }
    }
    if (!o.csv_path.empty()) write_csv(o.csv_path, {"theta", "re", "im", "abs"}, csv_rows);

    Json report{{"command", "mellin"},
                {"alpha", o.alpha},
                {"j", o.j},
                {"pattern", pattern.bits()},
                {"axis", o.axis},
                {"min_abs_value", min_abs},
                {"min_theta", min_theta},
                {"profile", Json{{"theta", arr_theta}, {"re", arr_re}, {"im", arr_im}, {"abs", arr_abs}}}};
    return sink.emit(report);
}

// ---------------------------------------------------------------------------
// forward
// ---------------------------------------------------------------------------

struct ForwardOpts {
    std::string mu_z_path;
    std::string family_path;
    std::string product_path;
    std::string out_path;
};

int run_forward(const ForwardOpts& o, const ReportSink& sink) {
    if (o.family_path.empty() == o.product_path.empty())
        throw ValidationError("forward: give exactly one of --family, --product");
    const HomogeneousTailMeasure mu_z = tail_measure_from_json(read_json_file(o.mu_z_path));

    Json report{{"command", "forward"}};
    HomogeneousTailMeasure mu_x = mu_z;
    if (!o.family_path.empty()) {
        const WeightFamily fam = weight_family_from_json(read_json_file(o.family_path));
        if (fam.kind() == WeightKind::Scalars) {
            const auto out = scalar_weight_tail(mu_z, fam);
            mu_x = out.mu_x;
            report["psi_plus"] = out.psi_plus;
            report["psi_minus"] = out.psi_minus;
        } else {
            mu_x = weighted_sum_tail(mu_z, fam);
        }
        report["map"] = "weighted_sum";
    } else {
        const ProductLaw law(discrete_from_json(read_json_file(o.product_path)));
        mu_x = product_tail(mu_z, law);
        report["map"] = "product";
    }
    if (o.out_path.empty()) throw ValidationError("forward: --out is required");
    write_text_file(o.out_path, to_json(mu_x).dump(2) + "\n");
    report["out"] = o.out_path;
    report["spectral_atoms"] = mu_x.spectral().size();
    report["total_weight"] = mu_x.total_weight();
    return sink.emit(report);
}

// ---------------------------------------------------------------------------
// invert / roundtrip
// ---------------------------------------------------------------------------

struct InvertOpts {
    std::string family_path;
    std::string mu_x_path;
    std::string set_path;
    double tol = 1e-8;
    std::uint64_t max_terms = 10000000;
    std::string precondition = "none";
};

std::optional<Mat> resolve_preconditioner(const std::string& mode, const WeightFamily& fam,
                                          double alpha, Json& report) {
    if (mode == "none") return std::nullopt;
    if (mode == "auto") {
        if (certify(fam, alpha).feasible) return std::nullopt;
        const auto found = search_preconditioner(fam, alpha);
        if (!found)
            throw ComputeError("invert: contraction condition fails and no preconditioner was found");
        report["preconditioner"] = to_json(found->second)["preconditioner"];
        return found->first;
    }
    if (mode.rfind("file:", 0) == 0) {
        const Json j = read_json_file(mode.substr(5));
        Mat a(fam.dim(), fam.dim());
        for (int r = 0; r < fam.dim(); ++r)
            for (int c = 0; c < fam.dim(); ++c)
                a(r, c) = j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
        report["preconditioner_file"] = mode.substr(5);
        return a;
    }
    throw ValidationError("invert: --precondition must be auto, none, or file:PATH");
}

int run_invert(const InvertOpts& o, const ReportSink& sink) {
    const WeightFamily fam = weight_family_from_json(read_json_file(o.family_path));
    const HomogeneousTailMeasure mu_x = tail_measure_from_json(read_json_file(o.mu_x_path));
    const EvalSet set = eval_set_from_json(read_json_file(o.set_path));

    Json report{{"command", "invert"}, {"tol", o.tol}};
    NeumannOptions opts;
    opts.max_terms = o.max_terms;
    opts.preconditioner = resolve_preconditioner(o.precondition, fam, mu_x.alpha(), report);
    const NeumannResult res = neumann_invert(mu_x, fam, set, o.tol, opts);
    report["certificate"] = to_json(certify(fam, mu_x.alpha(), opts.preconditioner));
    report["result"] = to_json(res);
    return sink.emit(report);
}

struct RoundtripOpts {
    std::string mu_z_path;
    std::string family_path;
    std::string panel_path;
    double tol = 1e-8;
    std::string precondition = "none";
    std::string csv_path;
};

int run_roundtrip(const RoundtripOpts& o, const ReportSink& sink) {
    const HomogeneousTailMeasure mu_z = tail_measure_from_json(read_json_file(o.mu_z_path));
    const WeightFamily fam = weight_family_from_json(read_json_file(o.family_path));
    std::vector<EvalSet> panel;
    if (!o.panel_path.empty()) {
        for (const Json& j : read_json_file(o.panel_path)) panel.push_back(eval_set_from_json(j));
    } else {
        panel = default_panel(mu_z.dim());
    }
    Json report{{"command", "roundtrip"}, {"tol", o.tol}};
    NeumannOptions opts;
    opts.preconditioner = resolve_preconditioner(o.precondition, fam, mu_z.alpha(), report);
    const auto rows = roundtrip_report(mu_z, fam, panel, o.tol, opts);
    bool all_pass = true;
    std::vector<std::vector<double>> csv_rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        all_pass = all_pass && rows[i].pass;
        csv_rows.push_back({static_cast<double>(i), rows[i].truth, rows[i].recovered, rows[i].bound,
                            rows[i].pass ? 1.0 : 0.0});
    }
    if (!o.csv_path.empty())
        write_csv(o.csv_path, {"set_index", "truth", "recovered", "bound", "pass"}, csv_rows);
    report["rows"] = to_json(rows);
    report["all_pass"] = all_pass;
    return sink.emit(report);
}

// ---------------------------------------------------------------------------
// counterexample
// ---------------------------------------------------------------------------

struct CounterexampleOpts {
    double alpha = 1.0;
    double theta0 = 1.0;
    double a = 1.0;
    double b = 0.0;
    double r = 0.0; // 0: use exp(pi/theta0)
    std::size_t n = 0;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string law = "osc";
    int windows = 3;
};

int run_counterexample(const CounterexampleOpts& o, const ReportSink& sink) {
    OscLawParams params{o.alpha, o.theta0, o.a, o.b,
                        o.r > 0.0 ? o.r : std::exp(std::numbers::pi / o.theta0), false};
    const OscillatingLaw law = build_law(params);
    const auto cert = oscillation_certificate(law, o.windows);
    const double amplitude = oscillation_amplitude(o.alpha, o.theta0, o.a, o.b);

    Json params_json{{"alpha", params.alpha}, {"theta0", params.theta0}, {"a", params.a},
                     {"b", params.b},         {"r", params.r},           {"law", o.law}};
    Json report{{"command", "counterexample"},
                {"params", params_json},
                {"amplitude", amplitude},
                {"atom_at_one", law.atom_at_one()},
                {"certificate",
                 Json{{"sup", cert.sup}, {"inf", cert.inf}, {"non_rv", cert.non_rv}}}};

    // Closed-form oscillation trace of x^alpha * tail(x) for plotting.
    {
        Json lnx = Json::array();
        Json trace = Json::array();
        const double period = 2.0 * std::numbers::pi / std::abs(o.theta0);
        for (int i = 0; i <= 500 * o.windows; ++i) {
            const double t = std::log(params.r) + period * o.windows * i / (500.0 * o.windows);
            lnx.push_back(t);
            trace.push_back(std::exp(o.alpha * t) *
                            oscillating_tail(o.alpha, o.theta0, o.a, o.b, std::exp(t)));
        }
        report["trace"] = Json{{"lnx", lnx}, {"xalpha_tail", trace}};
    }

    if (o.n > 0) {
        if (o.out_path.empty()) throw ValidationError("counterexample: --out is required when --n > 0");
        std::vector<double> values;
        if (o.law == "osc") {
            values = law.sample(o.n, o.seed);
        } else if (o.law == "mixed-sym") {
            values = MixedLaw(params, MixVariant::Symmetric).sample(o.n, o.seed);
        } else if (o.law == "mixed-eq34") {
            values = MixedLaw(params, MixVariant::OppositeFlip).sample(o.n, o.seed);
        } else {
            throw ValidationError("counterexample: --law must be osc, mixed-sym, or mixed-eq34");
        }
        std::ostringstream os;
        os << "value\n";
        for (double v : values) os << fmt(v) << "\n";
        write_text_file(o.out_path, os.str());
        Json sidecar{{"params", params_json}, {"amplitude", amplitude}, {"n", o.n}, {"seed", o.seed}};
        write_text_file(o.out_path + ".json", sidecar.dump(2) + "\n");
        report["out"] = o.out_path;
        report["n"] = o.n;
        report["seed"] = o.seed;
    }
    return sink.emit(report);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOpts {
    std::string config_path;
    std::string out_path;
    int threads = 1;
};

ZLaw law_from_config(const Json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "pareto")
        return ZLaw(ParetoLaw{j.at("alpha").get<double>(), j.value("xm", 1.0)}, j.value("dim", 1));
    if (type == "spectral") return ZLaw(SpectralParetoLaw{tail_measure_from_json(j.at("mu"))});
    OscLawParams p{j.at("alpha").get<double>(), j.at("theta0").get<double>(), j.at("a").get<double>(),
                   j.at("b").get<double>(),
                   j.value("r", std::exp(std::numbers::pi / j.at("theta0").get<double>())),
                   j.value("flip", false)};
    if (type == "oscillating") return ZLaw(build_law(p), j.value("dim", 1));
    if (type == "mixed") {
        const std::string variant = j.value("variant", "symmetric");
        if (variant == "symmetric") return ZLaw(MixedLaw(p, MixVariant::Symmetric), j.value("dim", 1));
        if (variant == "opposite-flip")
            return ZLaw(MixedLaw(p, MixVariant::OppositeFlip), j.value("dim", 1));
        throw ValidationError("simulate: law.variant must be symmetric or opposite-flip");
    }
    throw ValidationError("simulate: law.type must be pareto, spectral, oscillating, or mixed");
}

int run_simulate(const SimulateOpts& o, const ReportSink& sink) {
    const Json cfg = read_json_file(o.config_path);
    if (!cfg.contains("law") || !cfg.contains("n") || !cfg.contains("seed"))
        throw ValidationError("simulate: config needs law, n, seed");
    const ZLaw law = law_from_config(cfg.at("law"));
    const std::size_t n = cfg.at("n").get<std::size_t>();
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const int threads = cfg.value("threads", o.threads);

    SampleBatch batch;
    if (cfg.contains("product")) {
        const Json& pj = cfg.at("product");
        MultiplierLaw mult = pj.contains("uniform")
                                 ? MultiplierLaw{UniformMultiplier{pj.at("uniform").at(0).get<double>(),
                                                                   pj.at("uniform").at(1).get<double>()}}
                                 : MultiplierLaw{ProductLaw(discrete_from_json(pj.at("atoms")))};
        batch = simulate_product(mult, law, n, seed, threads);
    } else {
        WeightFamily fam = cfg.contains("family") ? weight_family_from_json(cfg.at("family"))
                                                  : WeightFamily::scalars(law.dim(), {1.0});
        batch = simulate_weighted_sum(law, fam, n, seed, threads);
    }

    Json report{{"command", "simulate"},
                {"config", cfg},
                {"provenance", batch.provenance},
                {"n", batch.n},
                {"dim", batch.dim},
                {"seed", batch.seed}};

    if (cfg.contains("estimators")) {
        const Json& est = cfg.at("estimators");
        const auto mags = batch.magnitudes();
        if (est.contains("hill_k")) report["hill"] = to_json(hill(mags, est.at("hill_k").get<std::size_t>()));
        if (est.contains("ratio_thresholds")) {
            std::vector<double> thresholds;
            for (const Json& t : est.at("ratio_thresholds")) thresholds.push_back(t.get<double>());
            report["tail_ratio"] = to_json(tail_ratio(mags, thresholds));
        }
        if (est.contains("spectral_quantile")) {
            const auto spectral = empirical_spectral(batch, est.at("spectral_quantile").get<double>(),
                                                     est.value("spectral_bins", 8));
            report["spectral"] = to_json(spectral);
            if (est.contains("compare")) {
                const Json& cj = est.at("compare");
                std::vector<EvalSet> panel;
                for (const Json& pj : cj.at("panel")) panel.push_back(eval_set_from_json(pj));
                const auto theo = tail_measure_from_json(cj.at("mu"));
                report["compare_spectral"] = to_json(compare_tail_measures(spectral, theo, panel));
                report["compare_batch"] =
                    to_json(compare_tail_measures(batch, cj.value("quantile", 0.995), theo, panel));
            }
        }
    }

    if (!o.out_path.empty()) {
        write_batch_file(o.out_path, batch);
        report["out"] = o.out_path;
    }
    return sink.emit(report);
}

// ---------------------------------------------------------------------------
// verify-system
// ---------------------------------------------------------------------------

struct VerifySystemOpts {
    double c1 = 1.0;
    double c_minus1 = 1.0;
    double alpha = 1.0;
    double theta0 = 1.0;
    double a = 1.0;
    double b = 0.0;
    int nodes = 10000;
    bool second_line = false;
    double perturb_rho = 1.0;
    double perturb_nu = 1.0;
};

int run_verify_system(const VerifySystemOpts& o, const ReportSink& sink) {
    Remark22Options opts;
    opts.target_nodes = o.nodes;
    opts.second_line = o.second_line;
    opts.rho_minus_scale = o.perturb_rho;
    opts.nu1_plus_scale = o.perturb_nu;
    const auto fx = remark22_fixture(o.c1, o.c_minus1, o.alpha, o.theta0, o.a, o.b, opts);
    const double residual = system_residual(fx.rho, fx.nu1, fx.nu2, fx.panel);
    Json report{{"command", "verify-system"},
                {"alpha", o.alpha},
                {"theta0", o.theta0},
                {"a", o.a},
                {"b", o.b},
                {"c1", o.c1},
                {"c_minus1", o.c_minus1},
                {"nodes", o.nodes},
                {"second_line", o.second_line},
                {"perturb_rho", o.perturb_rho},
                {"perturb_nu", o.perturb_nu},
                {"residual", residual},
                {"tv_window", fx.tv_window},
                {"panel_size", fx.panel.size()},
                {"distinct_families", fx.tv_window > 0.1},
                {"system_solved", residual <= 1e-8}};
    return sink.emit(report);
}

} // namespace

// ---------------------------------------------------------------------------
// emit_plot_data
// ---------------------------------------------------------------------------

std::vector<std::string> emit_plot_data(const Json& report, const std::string& prefix) {
    std::vector<std::string> written;
    const std::string command = report.value("command", "");
    if (command == "mellin" && report.contains("profile")) {
        const Json& p = report.at("profile");
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < p.at("theta").size(); ++i)
            rows.push_back({p.at("theta")[i].get<double>(), p.at("re")[i].get<double>(),
                            p.at("im")[i].get<double>(), p.at("abs")[i].get<double>()});
        const std::string path = prefix + "_mellin.csv";
        write_csv(path, {"theta", "re", "im", "abs"}, rows);
        written.push_back(path);
    }
    if (command == "simulate" && report.contains("tail_ratio")) {
        std::vector<std::vector<double>> rows;
        for (const Json& r : report.at("tail_ratio"))
            rows.push_back({r.at("s").get<double>(), r.at("ratio").get<double>(), r.at("sigma").get<double>()});
        const std::string path = prefix + "_tail_ratio.csv";
        write_csv(path, {"s", "ratio", "sigma"}, rows);
        written.push_back(path);
    }
    if (command == "counterexample" && report.contains("trace")) {
        const Json& t = report.at("trace");
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < t.at("lnx").size(); ++i)
            rows.push_back({t.at("lnx")[i].get<double>(), t.at("xalpha_tail")[i].get<double>()});
        const std::string path = prefix + "_oscillation.csv";
        write_csv(path, {"lnx", "xalpha_tail"}, rows);
        written.push_back(path);
    }
    return written;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args) {
    CLI::App app{"computes, checks, and inverts tail-measure transformations of heavy-tailed laws"};
    app.require_subcommand(1);

    ReportSink sink;
    app.add_option("--report", sink.path, "write the JSON report here instead of stdout")
        ->capture_default_str();
    app.add_option("--plot", sink.plot_prefix, "also write plot-ready CSV files with this prefix");

    CheckOpts check_opts;
    auto* check_cmd = app.add_subcommand("check", "decide a cancellation / determining condition");
    check_cmd->add_option("--weights", check_opts.weights, "comma-separated scalar weights");
    check_cmd->add_option("--family", check_opts.family_path, "weight family JSON (scalars or diag)");
    check_cmd->add_option("--product", check_opts.product_path, "atomic multiplier law JSON");
    check_cmd->add_option("--uniform", check_opts.uniform, "uniform multiplier 'a,b'");
    check_cmd->add_option("--alpha", check_opts.alpha, "tail index")->required();
    check_cmd->add_option("--theta-max", check_opts.theta_max, "scan bound");
    check_cmd->add_option("--grid-step", check_opts.grid_step, "scan grid step");
    check_cmd->add_option("--zero-tol", check_opts.zero_tol, "zero detection tolerance");

    MellinOpts mellin_opts;
    auto* mellin_cmd = app.add_subcommand("mellin", "tabulate a signed Mellin sum over a frequency grid");
    mellin_cmd->add_option("--rho", mellin_opts.rho_path, "atomic measure JSON")->required();
    mellin_cmd->add_option("--alpha", mellin_opts.alpha, "tail index")->required();
    mellin_cmd->add_option("--j", mellin_opts.j, "moment coordinate (1-based)");
    mellin_cmd->add_option("--pattern", mellin_opts.pattern, "sign pattern bits, e.g. 0,1");
    mellin_cmd->add_option("--axis", mellin_opts.axis, "frequency axis to sweep (1-based)");
    mellin_cmd->add_option("--theta-max", mellin_opts.theta_max, "scan bound");
    mellin_cmd->add_option("--grid-step", mellin_opts.grid_step, "grid step");
    mellin_cmd->add_option("--csv", mellin_opts.csv_path, "write the profile as CSV");

    ForwardOpts forward_opts;
    auto* forward_cmd = app.add_subcommand("forward", "apply a forward tail map to a tail measure");
    forward_cmd->add_option("--muZ", forward_opts.mu_z_path, "input tail measure JSON")->required();
    forward_cmd->add_option("--family", forward_opts.family_path, "weight family JSON");
    forward_cmd->add_option("--product", forward_opts.product_path, "atomic multiplier law JSON");
    forward_cmd->add_option("--out", forward_opts.out_path, "output tail measure JSON")->required();

    InvertOpts invert_opts;
    auto* invert_cmd = app.add_subcommand("invert", "invert the weighted-sum map by the alternating series");
    invert_cmd->add_option("--family", invert_opts.family_path, "weight family JSON")->required();
    invert_cmd->add_option("--muX", invert_opts.mu_x_path, "observed tail measure JSON")->required();
    invert_cmd->add_option("--set", invert_opts.set_path, "evaluation set JSON")->required();
    invert_cmd->add_option("--tol", invert_opts.tol, "remainder tolerance");
    invert_cmd->add_option("--max-terms", invert_opts.max_terms, "series term budget");
    invert_cmd->add_option("--precondition", invert_opts.precondition, "auto | none | file:PATH");

    RoundtripOpts roundtrip_opts;
    auto* roundtrip_cmd = app.add_subcommand("roundtrip", "forward map then inversion on a set panel");
    roundtrip_cmd->add_option("--muZ", roundtrip_opts.mu_z_path, "ground-truth tail measure JSON")->required();
    roundtrip_cmd->add_option("--family", roundtrip_opts.family_path, "weight family JSON")->required();
    roundtrip_cmd->add_option("--panel", roundtrip_opts.panel_path, "panel JSON (array of sets)");
    roundtrip_cmd->add_option("--tol", roundtrip_opts.tol, "remainder tolerance");
    roundtrip_cmd->add_option("--precondition", roundtrip_opts.precondition, "auto | none | file:PATH");
    roundtrip_cmd->add_option("--csv", roundtrip_opts.csv_path, "write the rows as CSV");

    CounterexampleOpts cex_opts;
    auto* cex_cmd = app.add_subcommand("counterexample", "build and sample a log-periodic Pareto law");
    cex_cmd->add_option("--alpha", cex_opts.alpha, "tail index")->required();
    cex_cmd->add_option("--theta0", cex_opts.theta0, "oscillation frequency")->required();
    cex_cmd->add_option("--a", cex_opts.a, "cosine amplitude");
    cex_cmd->add_option("--b", cex_opts.b, "sine amplitude");
    cex_cmd->add_option("--r", cex_opts.r, "truncation point (default exp(pi/theta0))");
    cex_cmd->add_option("--n", cex_opts.n, "sample count (0: no sampling)");
    cex_cmd->add_option("--seed", cex_opts.seed, "sampler seed");
    cex_cmd->add_option("--out", cex_opts.out_path, "samples CSV path");
    cex_cmd->add_option("--law", cex_opts.law, "osc | mixed-sym | mixed-eq34");
    cex_cmd->add_option("--windows", cex_opts.windows, "periods for the oscillation certificate");

    SimulateOpts sim_opts;
    auto* sim_cmd = app.add_subcommand("simulate", "sample transformed laws and run tail estimators");
    sim_cmd->add_option("--config", sim_opts.config_path, "simulation config JSON")->required();
    sim_cmd->add_option("--out", sim_opts.out_path, "batch output (binary)");
    sim_cmd->add_option("--threads", sim_opts.threads, "worker threads");

    VerifySystemOpts vs_opts;
    auto* vs_cmd = app.add_subcommand("verify-system", "residual of the quadrant equation system "
                                                       "for the perturbed-power fixture");
    vs_cmd->add_option("--c1", vs_opts.c1, "plus-side density constant");
    vs_cmd->add_option("--c-minus1", vs_opts.c_minus1, "minus-side density constant");
    vs_cmd->add_option("--alpha", vs_opts.alpha, "tail index")->required();
    vs_cmd->add_option("--theta0", vs_opts.theta0, "oscillation frequency")->required();
    vs_cmd->add_option("--a", vs_opts.a, "cosine amplitude");
    vs_cmd->add_option("--b", vs_opts.b, "sine amplitude");
    vs_cmd->add_option("--nodes", vs_opts.nodes, "quadrature nodes across the window");
    vs_cmd->add_flag("--second-line", vs_opts.second_line, "use the signed-condition variant");
    vs_cmd->add_option("--perturb-rho", vs_opts.perturb_rho, "scale the shifted multiplier atom");
    vs_cmd->add_option("--perturb-nu", vs_opts.perturb_nu, "scale the plus-side perturbed family");

    std::vector<std::string> argv_store(args.begin(), args.end());
    std::vector<char*> argv;
    argv.reserve(argv_store.size());
    for (std::string& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (check_cmd->parsed()) return run_check(check_opts, sink);
        if (mellin_cmd->parsed()) return run_mellin(mellin_opts, sink);
        if (forward_cmd->parsed()) return run_forward(forward_opts, sink);
        if (invert_cmd->parsed()) return run_invert(invert_opts, sink);
        if (roundtrip_cmd->parsed()) return run_roundtrip(roundtrip_opts, sink);
        if (cex_cmd->parsed()) return run_counterexample(cex_opts, sink);
        if (sim_cmd->parsed()) return run_simulate(sim_opts, sink);
        if (vs_cmd->parsed()) return run_verify_system(vs_opts, sink);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ComputeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "error: malformed JSON input: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace tailinv::cli
