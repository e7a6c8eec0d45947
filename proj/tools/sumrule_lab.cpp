// sumrule_lab: command-line front end for equilibrium measures, Jacobi
// coefficients, sum-rule reports and beta-ensemble sampling.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "sumrule/ensemble.hpp"
#include "sumrule/equilibrium.hpp"
#include "sumrule/jacobi.hpp"
#include "sumrule/rng.hpp"
#include "sumrule/serialize.hpp"
#include "sumrule/sumrule.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sumrule;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) {
    std::string text = read_file(p);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("malformed JSON in " + p.string() + ": " + e.what());
    }
}

void write_file(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + p.string());
    out << text;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// one manifest per command run; every output file is listed exactly once
struct Manifest {
    std::string command_line;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string started;
    std::vector<std::string> outputs;

    void write(const fs::path& path) const {
        json j{{"command_line", command_line},
               {"config_hash", config_hash},
               {"tool_version", kVersion},
               {"started_at", started},
               {"finished_at", timestamp()},
               {"outputs", outputs}};
        if (has_seed) j["seed"] = seed;
        write_file(path, j.dump(2) + "\n");
    }
};

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

Polynomial load_potential(const fs::path& p) {
    Polynomial V;
    try {
        V = polynomial_from_json(read_json(p));
    } catch (const json::exception& e) {
        throw ValidationError("bad potential file " + p.string() + ": " + e.what());
    }
    PotentialReport rep = validate_potential(V);
    if (!rep.valid) throw ValidationError(rep.message);
    return V;
}

// accepts either a MeasureModel object or a bare GridMeasure (the format the
// equilibrium command emits)
MeasureModel load_measure(const fs::path& p) {
    json j = read_json(p);
    try {
        if (j.is_object() && j.contains("ac")) return measure_model_from_json(j);
        if (j.is_object() && j.contains("intervals")) {
            MeasureModel m = MeasureModel::from_ac(grid_measure_from_json(j));
            return m;
        }
    } catch (const json::exception& e) {
        throw ValidationError("bad measure file " + p.string() + ": " + e.what());
    }
    throw ValidationError("unrecognized measure schema in " + p.string());
}

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("SUMRULE_LAB_SEED");
    if (!s || !*s) return std::nullopt;
    return std::strtoull(s, nullptr, 10);
}

// ---------------------------------------------------------------------------

int cmd_equilibrium(const fs::path& potential_path, const std::string& method, int grid,
                    std::vector<double> domain, const fs::path& out, const std::string& cmdline) {
    Manifest man{cmdline, fnv1a(read_file(potential_path)), 0, false, timestamp(), {}};
    Polynomial V = load_potential(potential_path);

    GridMeasure measure;
    if (method == "onecut") {
        OneCutResult oc = solve_one_cut(V);
        if (!oc.one_cut)
            throw NumericalFailure(
                "one-cut hypothesis violated (density factor negative); rerun with --method grid");
        measure = oc.measure;
    } else if (method == "grid") {
        if (domain.size() != 2) throw ValidationError("--domain a b required for --method grid");
        measure = solve_grid(V, domain[0], domain[1], grid).measure;
    } else {
        throw ValidationError("unknown method: " + method + " (expected onecut or grid)");
    }

    write_file(out, grid_measure_to_json(measure).dump(2) + "\n");
    man.outputs.push_back(out.string());
    man.write(out.string() + ".manifest.json");
    std::printf("equilibrium: %d interval(s), mass %.12g -> %s\n", measure.support.cut_count(),
                measure.mass, out.string().c_str());
    return 0;
}

int cmd_jacobi_from_measure(const fs::path& measure_path, int n, const fs::path& out,
                            const std::string& cmdline) {
    Manifest man{cmdline, fnv1a(read_file(measure_path)), 0, false, timestamp(), {}};
    MeasureModel mu = load_measure(measure_path);
    JacobiSequence r = measure_to_jacobi(mu, n);
    if (r.length() < n)
        std::fprintf(stderr, "note: finite support, achieved length %d < %d\n", r.length(), n);
    write_file(out, jacobi_to_json(r).dump(2) + "\n");
    man.outputs.push_back(out.string());
    man.write(out.string() + ".manifest.json");
    return 0;
}

int cmd_jacobi_to_measure(const fs::path& seq_path, const fs::path& out,
                          const std::string& cmdline) {
    Manifest man{cmdline, fnv1a(read_file(seq_path)), 0, false, timestamp(), {}};
    JacobiSequence r;
    try {
        r = jacobi_from_json(read_json(seq_path));
    } catch (const json::exception& e) {
        throw ValidationError("bad coefficient file " + seq_path.string() + ": " + e.what());
    }
    MeasureModel m = jacobi_to_measure(r);
    write_file(out, measure_model_to_json(m).dump(2) + "\n");
    man.outputs.push_back(out.string());
    man.write(out.string() + ".manifest.json");
    return 0;
}

int cmd_jacobi_trace(const fs::path& seq_path, const fs::path& potential_path, int n) {
    JacobiSequence r;
    try {
        r = jacobi_from_json(read_json(seq_path));
    } catch (const json::exception& e) {
        throw ValidationError("bad coefficient file " + seq_path.string() + ": " + e.what());
    }
    Polynomial V = load_potential(potential_path);
    if (n <= 0) n = r.length();
    std::printf("%.17g\n", trace_poly(r, n, V));
    return 0;
}

int cmd_sumrule_verify(const fs::path& measure_path, const fs::path& potential_path, int N,
                       double K, const fs::path& out, int jobs, const std::string& cmdline) {
    Manifest man{cmdline, fnv1a(read_file(measure_path) + read_file(potential_path)), 0, false,
                 timestamp(), {}};
    MeasureModel mu = load_measure(measure_path);
    Polynomial V = load_potential(potential_path);
    VerifyOptions opts;
    opts.jobs = std::max(1, jobs);
    SumRuleReport rep = verify_sum_rule(mu, V, N, K, opts);

    write_file(out, rep.to_csv());
    man.outputs.push_back(out.string());
    fs::path jout = out;
    jout.replace_extension(".json");
    write_file(jout, sum_rule_report_to_json(rep).dump(2) + "\n");
    man.outputs.push_back(jout.string());
    man.write(out.string() + ".manifest.json");

    std::printf("verdict: %s\n", to_string(rep.verdict).c_str());
    if (rep.spectral_total.is_finite())
        std::printf("spectral side: %.10g   U_%d: %.10g\n", rep.spectral_total.value(), N,
                    rep.U.back());
    else
        std::printf("spectral side: inf\n");
    return 0;
}

int cmd_sumrule_gem(const fs::path& measure_path, const fs::path& potential_path,
                    const fs::path& out, const std::string& cmdline) {
    Manifest man{cmdline, fnv1a(read_file(measure_path) + read_file(potential_path)), 0, false,
                 timestamp(), {}};
    MeasureModel mu = load_measure(measure_path);
    Polynomial V = load_potential(potential_path);
    GemReport rep = gem_check(mu, V);
    std::string text = gem_report_to_json(rep).dump(2) + "\n";
    if (!out.empty()) {
        write_file(out, text);
        man.outputs.push_back(out.string());
        man.write(out.string() + ".manifest.json");
    }
    std::fputs(text.c_str(), stdout);
    return 0;
}

int cmd_sumrule_quartic_gap(double v, int N) {
    QuarticGapEstimate est = quartic_gap_estimate(v, N);
    std::printf("pseudorate gap (closed form): %.7f\n", est.analytic);
    std::printf("finite-N estimate (N = %d):   %.7f\n", est.N, est.finite_n);
    return 0;
}

int cmd_sample(const fs::path& config_path, const fs::path& out_dir, int jobs,
               const std::string& cmdline) {
    Manifest man{cmdline, fnv1a(read_file(config_path)), 0, false, timestamp(), {}};
    EnsembleConfig cfg;
    try {
        cfg = ensemble_config_from_json(read_json(config_path));
    } catch (const json::exception& e) {
        throw ValidationError("bad config file " + config_path.string() + ": " + e.what());
    }
    if (auto s = env_seed()) cfg.seed = *s;
    man.seed = cfg.seed;
    man.has_seed = true;
    fs::create_directories(out_dir);

    // chains fan out over --jobs with seeds derived deterministically
    int chains = std::max(1, jobs);
    std::vector<std::vector<MeasureModel>> results(static_cast<size_t>(chains));
    auto run_chain = [&](int c) {
        EnsembleConfig local = cfg;
        local.seed = cfg.seed + static_cast<std::uint64_t>(c);
        std::vector<MeasureModel> spectra;
        if (local.sampler == SamplerKind::eigen_mcmc) {
            auto states = sample_eigenvalues(local);
            Rng wrng(local.seed ^ 0x9e3779b97f4a7c15ULL);
            for (const auto& lam : states) {
                WeightSample w = sample_weights(local.n, local.beta, wrng);
                spectra.push_back(assemble_spectral(lam, w.normalized));
            }
        } else {
            auto states = local.sampler == SamplerKind::jacobi_mcmc ? sample_jacobi(local)
                                                                    : sample_gaussian_exact(local);
            for (const auto& r : states) spectra.push_back(jacobi_to_measure(r));
        }
        results[static_cast<size_t>(c)] = std::move(spectra);
    };
    if (chains == 1) {
        run_chain(0);
    } else {
        std::vector<std::thread> pool;
        for (int c = 0; c < chains; ++c) pool.emplace_back(run_chain, c);
        for (auto& t : pool) t.join();
    }

    long idx = 0;
    std::vector<MeasureModel> all;
    for (const auto& chain : results)
        for (const MeasureModel& m : chain) {
            char name[64];
            std::snprintf(name, sizeof name, "sample_%05ld.json", idx++);
            fs::path p = out_dir / name;
            write_file(p, measure_model_to_json(m).dump() + "\n");
            man.outputs.push_back(p.string());
            all.push_back(m);
        }

    if (static_cast<int>(all.size()) >= 10) {
        DiagnosticsReport diag = empirical_diagnostics(all, equilibrium_measure(cfg.V));
        char row[128];
        std::ostringstream csv;
        csv << "metric,value\n";
        std::snprintf(row, sizeof row, "kolmogorov_distance,%.17g\n", diag.kolmogorov_distance);
        csv << row;
        std::snprintf(row, sizeof row, "gap_applicable,%d\n", diag.gap_applicable ? 1 : 0);
        csv << row;
        std::snprintf(row, sizeof row, "gap_fraction,%.17g\n", diag.gap_fraction);
        csv << row;
        std::snprintf(row, sizeof row, "rightmost_mean,%.17g\n", diag.rightmost_mean);
        csv << row;
        std::snprintf(row, sizeof row, "rightmost_near_edge_fraction,%.17g\n",
                      diag.rightmost_near_edge_fraction);
        csv << row;
        std::snprintf(row, sizeof row, "sample_count,%d\n", diag.sample_count);
        csv << row;
        fs::path dpath = out_dir / "diagnostics.csv";
        write_file(dpath, csv.str());
        man.outputs.push_back(dpath.string());

        std::ostringstream rcsv;
        rcsv << "sample,rightmost\n";
        for (size_t i = 0; i < diag.rightmost.size(); ++i) {
            std::snprintf(row, sizeof row, "%zu,%.17g\n", i, diag.rightmost[i]);
            rcsv << row;
        }
        fs::path rpath = out_dir / "rightmost.csv";
        write_file(rpath, rcsv.str());
        man.outputs.push_back(rpath.string());
        std::printf("diagnostics: KS %.4f, gap fraction %.4f\n", diag.kolmogorov_distance,
                    diag.gap_fraction);
    }

    man.write(out_dir / "manifest.json");
    std::printf("wrote %ld spectral measures to %s\n", idx, out_dir.string().c_str());
    return 0;
}

int cmd_quartic_demo(double v, int N, const fs::path& out_dir, const std::string& cmdline) {
    Manifest man{cmdline, fnv1a(std::to_string(v) + ":" + std::to_string(N)), 0, false,
                 timestamp(), {}};
    fs::create_directories(out_dir);

    QuarticEquilibrium q = quartic_equilibrium(v);
    std::printf("support: [%.6f, %.6f] u [%.6f, %.6f]\n", -q.alpha_plus, -q.alpha_minus,
                q.alpha_minus, q.alpha_plus);
    std::printf("squared coefficient limits: l1 = %.7f, l2 = %.7f\n", q.ell1, q.ell2);

    fs::path mpath = out_dir / "equilibrium.json";
    write_file(mpath, grid_measure_to_json(q.measure).dump() + "\n");
    man.outputs.push_back(mpath.string());

    // grid solver cross-check of the two-cut support
    GridSolveResult gs = solve_grid(quartic_potential(v), -q.alpha_plus - 0.4, q.alpha_plus + 0.4,
                                    800);
    std::printf("grid solver support:");
    for (const auto& [l, r] : gs.measure.support.intervals) std::printf(" [%.4f, %.4f]", l, r);
    std::printf("\n");

    QuarticGapEstimate est = quartic_gap_estimate(v, N);
    std::printf("pseudorate gap: closed form %.7f, finite-N estimate %.7f (N = %d)\n",
                est.analytic, est.finite_n, est.N);

    std::ostringstream csv;
    csv << "N,U_N\n";
    char line[64];
    for (size_t i = 0; i < est.U.size(); ++i) {
        std::snprintf(line, sizeof line, "%zu,%.17g\n", i + 1, est.U[i]);
        csv << line;
    }
    fs::path upath = out_dir / "oscillation.csv";
    write_file(upath, csv.str());
    man.outputs.push_back(upath.string());

    json summary{{"v", v},
                 {"alpha_minus", q.alpha_minus},
                 {"alpha_plus", q.alpha_plus},
                 {"ell1", q.ell1},
                 {"ell2", q.ell2},
                 {"gap_closed_form", est.analytic},
                 {"gap_finite_N", est.finite_n},
                 {"N", est.N}};
    fs::path spath = out_dir / "summary.json";
    write_file(spath, summary.dump(2) + "\n");
    man.outputs.push_back(spath.string());
    man.write(out_dir / "manifest.json");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::string cmdline = join_args(argc, argv);
    CLI::App app{"sum-rule laboratory: equilibrium measures, Jacobi coefficients, sum rules, "
                 "beta-ensemble sampling"};
    app.require_subcommand(1);

    // equilibrium
    auto* eq = app.add_subcommand("equilibrium", "compute the equilibrium measure of a potential");
    fs::path eq_potential, eq_out = "measure.json";
    std::string eq_method = "onecut";
    int eq_grid = 600;
    std::vector<double> eq_domain;
    eq->add_option("--potential", eq_potential, "potential coefficients JSON")->required();
    eq->add_option("--method", eq_method, "onecut | grid");
    eq->add_option("--grid", eq_grid, "grid size for --method grid");
    eq->add_option("--domain", eq_domain, "domain a b for --method grid")->expected(2);
    eq->add_option("--out", eq_out, "output measure path");

    // jacobi
    auto* jac = app.add_subcommand("jacobi", "Favard correspondence and traces");
    auto* jfm = jac->add_subcommand("from-measure", "recursion coefficients of a measure");
    fs::path jfm_measure, jfm_out = "jacobi.json";
    int jfm_n = 50;
    jfm->add_option("--measure", jfm_measure, "measure JSON")->required();
    jfm->add_option("--n", jfm_n, "number of diagonal coefficients");
    jfm->add_option("--out", jfm_out, "output path");
    auto* jtm = jac->add_subcommand("to-measure", "spectral measure of a coefficient sequence");
    fs::path jtm_seq, jtm_out = "measure.json";
    jtm->add_option("--seq", jtm_seq, "coefficients JSON {b, a}")->required();
    jtm->add_option("--out", jtm_out, "output path");
    auto* jtr = jac->add_subcommand("trace", "tr V(T_N)");
    fs::path jtr_seq, jtr_potential;
    int jtr_n = 0;
    jtr->add_option("--seq", jtr_seq, "coefficients JSON")->required();
    jtr->add_option("--potential", jtr_potential, "potential JSON")->required();
    jtr->add_option("--n", jtr_n, "submatrix size (default: full length)");
    jac->require_subcommand(1);

    // sumrule
    auto* sr = app.add_subcommand("sumrule", "sum-rule reports and gems");
    auto* srv = sr->add_subcommand("verify", "evaluate both sides and a verdict");
    fs::path srv_measure, srv_potential, srv_out = "report.csv";
    int srv_N = 400;
    double srv_K = 6.0;
    int srv_jobs = 1;
    srv->add_option("--measure", srv_measure)->required();
    srv->add_option("--potential", srv_potential)->required();
    srv->add_option("--N", srv_N, "largest partial-sum index");
    srv->add_option("--K", srv_K, "support bound of the measure");
    srv->add_option("--out", srv_out, "CSV output (JSON written alongside)");
    srv->add_option("--jobs", srv_jobs, "concurrency hint");
    auto* srg = sr->add_subcommand("gem", "finiteness equivalence report");
    fs::path srg_measure, srg_potential, srg_out;
    srg->add_option("--measure", srg_measure)->required();
    srg->add_option("--potential", srg_potential)->required();
    srg->add_option("--out", srg_out, "optional JSON output path");
    auto* srq = sr->add_subcommand("quartic-gap", "alternation amplitude of the swapped quartic");
    double srq_v = 3.0;
    int srq_N = 300;
    srq->add_option("--v", srq_v, "quartic parameter (> 2)");
    srq->add_option("--N", srq_N, "half-length of the coefficient run");
    sr->require_subcommand(1);

    // sample
    auto* sm = app.add_subcommand("sample", "draw spectral measures from the ensemble");
    fs::path sm_config, sm_out = "samples";
    int sm_jobs = 1;
    sm->add_option("--config", sm_config, "EnsembleConfig JSON")->required();
    sm->add_option("--out", sm_out, "output directory");
    sm->add_option("--jobs", sm_jobs, "independent chains run concurrently");

    // quartic-demo
    auto* qd = app.add_subcommand("quartic-demo", "two-cut reproduction run");
    double qd_v = 3.0;
    int qd_N = 300;
    fs::path qd_out = "quartic-demo";
    qd->add_option("--v", qd_v, "quartic parameter (> 2)");
    qd->add_option("--N", qd_N, "half-length of the oscillation run");
    qd->add_option("--out", qd_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*eq) return cmd_equilibrium(eq_potential, eq_method, eq_grid, eq_domain, eq_out, cmdline);
        if (*jfm) return cmd_jacobi_from_measure(jfm_measure, jfm_n, jfm_out, cmdline);
        if (*jtm) return cmd_jacobi_to_measure(jtm_seq, jtm_out, cmdline);
        if (*jtr) return cmd_jacobi_trace(jtr_seq, jtr_potential, jtr_n);
        if (*srv)
            return cmd_sumrule_verify(srv_measure, srv_potential, srv_N, srv_K, srv_out, srv_jobs,
                                      cmdline);
        if (*srg) return cmd_sumrule_gem(srg_measure, srg_potential, srg_out, cmdline);
        if (*srq) return cmd_sumrule_quartic_gap(srq_v, srq_N);
        if (*sm) return cmd_sample(sm_config, sm_out, sm_jobs, cmdline);
        if (*qd) return cmd_quartic_demo(qd_v, qd_N, qd_out, cmdline);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
