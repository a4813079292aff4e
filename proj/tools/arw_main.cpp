// arw: arithmetic random wave workbench.
//
// Subcommands: lambda, identities, scan-s6, experiment, singular-set, k2-probe.
// Exit codes: 0 success, 1 usage error, 2 domain error, 3 suite failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arw/correlation.hpp"
#include "arw/errors.hpp"
#include "arw/kac_rice.hpp"
#include "arw/lattice.hpp"
#include "arw/records.hpp"
#include "arw/rng.hpp"
#include "arw/sampler.hpp"
#include "arw/spectral.hpp"
#include "arw/torus_grid.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitSuite = 3;

struct CommonOpts {
    int threads = 0;
    std::string config_path;
};

// flat key=value defaults; explicit flags always win. Applied by appending
// synthetic flags for keys the command line did not mention.
std::vector<std::string> with_config_defaults(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") path = args[i + 1];
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw arw::Error("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string flag = "--" + line.substr(0, eq);
        if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
        args.push_back(flag);
        args.push_back(line.substr(eq + 1));
    }
    return args;
}

arw::EnergySequence sequence_from_flags(const std::string& kind, double a, int terms,
                                        arw::u64 bound) {
    arw::SequenceKind k;
    if (kind == "generic") k = arw::SequenceKind::generic;
    else if (kind == "cilleruelo") k = arw::SequenceKind::cilleruelo;
    else if (kind == "nu_a") k = arw::SequenceKind::nu_a;
    else throw CLI::ValidationError("--sequence must be generic|cilleruelo|nu_a");
    return arw::build_sequence(k, a, terms, bound);
}

arw::RunManifest make_manifest(const std::string& command,
                               const std::vector<std::pair<std::string, std::string>>& params,
                               const std::vector<std::string>& outputs) {
    arw::RunManifest m;
    m.command = command;
    for (auto& [k, v] : params) m.params[k] = v;
    m.outputs = outputs;
    return m;
}

// ---- lambda ---------------------------------------------------------------

int cmd_lambda(arw::u64 n, bool as_json) {
    arw::FrequencySet fs = arw::enumerate_lambda(n);
    arw::SpectralSummary s = arw::spectral_summary(fs);
    if (as_json) {
        std::ostringstream points;
        points << '[';
        for (std::size_t i = 0; i < fs.points.size(); ++i) {
            if (i) points << ',';
            points << '[' << fs.points[i].x << ',' << fs.points[i].y << ']';
        }
        points << ']';
        std::printf("{\"n\":%llu,\"N\":%d,\"E\":%.17g,\"mu4\":%.17g,\"c_n\":%.17g,"
                    "\"B4\":%.17g,\"points\":%s}\n",
                    static_cast<unsigned long long>(n), s.N, fs.energy(), s.mu_hat.at(4),
                    s.c_n, s.B4, points.str().c_str());
        return kExitOk;
    }
    std::printf("n = %llu   N = %d   E = %.6f\n", static_cast<unsigned long long>(n), s.N,
                fs.energy());
    std::printf("mu_hat(4) = %.10f   c_n = %.10g   B4 = %.10f\n", s.mu_hat.at(4), s.c_n, s.B4);
    std::printf("points (ascending angle):\n");
    for (const auto& p : fs.points) std::printf("  (%lld, %lld)\n", (long long)p.x, (long long)p.y);
    return kExitOk;
}

// ---- identities -------------------------------------------------------------

struct IdentityCheck {
    std::string name;
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

void report(std::vector<IdentityCheck>& out, const std::string& name, bool pass,
            const std::string& detail = "") {
    out.push_back({name, pass, false, detail});
}

int cmd_identities(const std::vector<arw::u64>& ns, int cap, int threads) {
    using namespace arw;
    bool all_pass = true;
    for (u64 n : ns) {
        std::vector<IdentityCheck> checks;
        FrequencySet fs;
        try {
            fs = enumerate_lambda(n);
        } catch (const NotSumOfTwoSquares&) {
            std::printf("n=%llu: SKIP (not a sum of two squares)\n",
                        static_cast<unsigned long long>(n));
            continue;
        }
        const int N = fs.multiplicity();
        if (N > cap) {
            std::printf("n=%llu: SKIP (N=%d exceeds cap %d)\n",
                        static_cast<unsigned long long>(n), N, cap);
            continue;
        }

        // S4 closed form (brute-force confirmed at small N)
        u64 s4 = count_s4(fs);
        bool s4_ok = true;
        std::string s4_detail = "closed form " + std::to_string(s4);
        if (N <= 16) {
            u64 brute = count_s4_bruteforce(fs);
            s4_ok = brute == s4;
            s4_detail += " brute " + std::to_string(brute);
        }
        report(checks, "S4 closed form", s4_ok, s4_detail);

        // moment/count duality for r^2, r^4, r^6
        u64 s6 = count_s6(fs, cap);
        {
            int M = next_smooth(12 * static_cast<int>(isqrt_u64(n) + 1) + 1);
            auto r = r_grid(fs, M);
            std::vector<double> r2v(r.size()), r4v(r.size()), r6v(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) {
                double q = r[i] * r[i];
                r2v[i] = q;
                r4v[i] = q * q;
                r6v[i] = q * q * q;
            }
            double q2 = pairwise_mean(r2v), q4 = pairwise_mean(r4v), q6 = pairwise_mean(r6v);
            double Nd = N;
            report(checks, "int r^2 = 1/N", std::abs(q2 - 1.0 / Nd) < 1e-10);
            double s4_exact = static_cast<double>(s4) / std::pow(Nd, 4.0);
            report(checks, "int r^4 = |S4|/N^4", std::abs(q4 - s4_exact) < 1e-9);
            double s6_exact = static_cast<double>(s6) / std::pow(Nd, 6.0);
            report(checks, "int r^6 = |S6|/N^6", std::abs(q6 - s6_exact) < 1e-9);
        }

        // B4 identity
        {
            double b4 = B4_direct(fs);
            double m4 = mu_hat(fs, 4);
            report(checks, "B4 = 3/8 + mu4^2/8", std::abs(b4 - 0.375 - m4 * m4 / 8.0) < 1e-12);
        }

        // Laplace identity at random points
        {
            CounterRng rng(20240 + n, 17);
            bool ok = true;
            double E = fs.energy();
            for (int i = 0; i < 100; ++i) {
                Point x{rng.next_unit(), rng.next_unit()};
                CovarianceJet jet = covariance_jet(fs, x);
                if (std::abs(jet.H.trace() + E * jet.r) > 1e-10 * E) ok = false;
            }
            report(checks, "tr H = -E r", ok);
        }

        // lemma integral suite
        {
            auto rows = lemma_integral_suite(fs, threads);
            for (const auto& rrow : rows) {
                bool ok;
                if (rrow.is_bound) {
                    ok = rrow.quadrature <= rrow.bound_rhs;
                } else {
                    double scale = std::max(std::abs(rrow.exact), 1e-300);
                    ok = std::abs(rrow.quadrature - rrow.exact) < 1e-8 * scale &&
                         std::abs(rrow.exact - rrow.leading) <= rrow.allowance * (1 + 1e-12);
                }
                report(checks, "lemma " + rrow.name, ok);
            }
        }

        for (const auto& c : checks) {
            std::printf("n=%llu: %-34s %s%s%s\n", static_cast<unsigned long long>(n),
                        c.name.c_str(), c.pass ? "PASS" : "FAIL",
                        c.detail.empty() ? "" : "  ", c.detail.c_str());
            if (!c.pass) all_pass = false;
        }
    }
    return all_pass ? kExitOk : kExitSuite;
}

// ---- scan-s6 ----------------------------------------------------------------

int cmd_scan_s6(const arw::EnergySequence& seq, const std::string& out_path, int cap) {
    using namespace arw;
    std::set<u64> done;
    bool existing = false;
    if (!out_path.empty() && std::filesystem::exists(out_path)) {
        std::ifstream in(out_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("n,", 0) == 0) continue;
            done.insert(std::stoull(line.substr(0, line.find(','))));
        }
        existing = true;
    }
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::app);
        os = &file;
    }
    if (!existing) {
        auto manifest = make_manifest(
            "scan-s6", {{"kind", to_string(seq.kind)}, {"cap", std::to_string(cap)}},
            out_path.empty() ? std::vector<std::string>{} : std::vector<std::string>{out_path});
        *os << manifest_line(manifest) << '\n';
        *os << "n,N,s6,s6_over_N4,s6_over_N3\n";
    }
    for (std::size_t i = 0; i < seq.terms.size(); ++i) {
        if (done.count(seq.terms[i])) continue;  // resume: skip computed rows
        EnergySequence single;
        single.kind = seq.kind;
        single.terms = {seq.terms[i]};
        if (i < seq.term_factors.size()) single.term_factors = {seq.term_factors[i]};
        for (const auto& row : s6_decay_scan(single, cap)) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%llu,%d,%llu,%.17g,%.17g",
                          static_cast<unsigned long long>(row.n), row.N,
                          static_cast<unsigned long long>(row.s6), row.s6_over_n4,
                          row.s6_over_n3);
            *os << buf << '\n';
        }
    }
    return kExitOk;
}

// ---- experiment ---------------------------------------------------------------

int cmd_experiment(const std::vector<arw::FrequencySet>& sets, int trials, int grid,
                   arw::u64 seed, const std::string& out_path, int threads,
                   const std::string& dump_grid_path,
                   const std::vector<std::pair<std::string, std::string>>& params) {
    using namespace arw;
    std::ofstream file;
    std::ostream* os = nullptr;
    if (!out_path.empty()) {
        bool fresh = !std::filesystem::exists(out_path);
        file.open(out_path, std::ios::app);
        if (!file) throw Error("cannot open output file: " + out_path);
        os = &file;
        if (fresh) *os << manifest_line(make_manifest("experiment", params, {out_path})) << '\n';
    }
    for (const auto& fs : sets) {
        ExperimentRecord rec = run_experiment(fs, trials, grid, seed, threads);
        std::string line = record_line(rec);
        if (os) *os << line << '\n';
        std::printf("%s\n", line.c_str());
        double pull = (rec.sample_mean_L - rec.theory_mean) / rec.se_mean;
        std::fprintf(stderr,
                     "n=%llu: mean %.5f (theory %.5f, %+0.2f se), var %.6g "
                     "(leading %.6g, ratio %.3f), %d trials in %.2fs\n",
                     static_cast<unsigned long long>(rec.n), rec.sample_mean_L,
                     rec.theory_mean, pull, rec.sample_var_L, rec.theory_var_leading,
                     rec.sample_var_L / rec.theory_var_leading, rec.trials, rec.wall_time_s);
    }
    if (!dump_grid_path.empty() && !sets.empty()) {
        FieldGrid g = sample_field(sets.front(),
                                   grid ? grid : default_grid_m(sets.front().n),
                                   mix_seed(seed, 0));
        std::ofstream gf(dump_grid_path);
        write_grid_csv(g, gf);
    }
    return kExitOk;
}

// ---- singular-set ---------------------------------------------------------------

int cmd_singular(arw::u64 n, int grid, int threads) {
    using namespace arw;
    FrequencySet fs = enumerate_lambda(n);
    SingularSetReport rep = singular_set(fs, grid, threads);
    double r6 = r_moment(fs, 6);
    std::printf("n=%llu M=%d singular_squares=%llu measure=%.6g min|r|=%.4f R6=%.6g "
                "measure/R6=%.4f\n",
                static_cast<unsigned long long>(rep.n), rep.M,
                static_cast<unsigned long long>(rep.singular_square_count),
                rep.measure_estimate, rep.min_abs_r_on_b, r6, rep.measure_estimate / r6);
    return kExitOk;
}

// ---- k2-probe --------------------------------------------------------------------

int cmd_k2_probe(arw::u64 n, double x1, double x2) {
    using namespace arw;
    FrequencySet fs = enumerate_lambda(n);
    CovarianceJet jet = covariance_jet(fs, {x1, x2});
    std::printf("x = (%.6f, %.6f)\n", x1, x2);
    std::printf("r = %.10f  D = (%.6f, %.6f)\n", jet.r, jet.d1, jet.d2);
    std::printf("H = [[%.6f, %.6f], [%.6f, %.6f]]\n", jet.H.a, jet.H.b, jet.H.b, jet.H.c);
    ScaledPerturbation pert = perturbation(jet, fs.energy());
    std::printf("X = [[%.8f, %.8f], [., %.8f]]  trX = %.8f\n", pert.X.a, pert.X.b, pert.X.c,
                pert.X.trace());
    std::printf("Y = [[%.8f, %.8f], [., %.8f]]\n", pert.Y.a, pert.Y.b, pert.Y.c);
    double ke = k2_exact(pert);
    double kt = k2_taylor(pert);
    std::printf("K2_exact  = %.10f\nK2_taylor = %.10f\ndelta     = %.3e\n", ke, kt, ke - kt);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"arithmetic random waves on the torus: exact arithmetic, Kac-Rice "
                 "analytics, Monte Carlo nodal length experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    CommonOpts common;
    app.add_option("--threads", common.threads, "worker threads (0 = hardware)");
    app.add_option("--config", common.config_path, "flat key=value defaults file");

    // lambda
    auto* lam = app.add_subcommand("lambda", "frequency set and spectral summary for one n");
    arw::u64 lam_n = 0;
    bool lam_json = false;
    lam->add_option("n", lam_n, "energy level")->required();
    lam->add_flag("--json", lam_json, "machine-readable output");

    // identities
    auto* ident = app.add_subcommand("identities", "exact-identity suites for a list of n");
    std::vector<arw::u64> ident_ns;
    int ident_cap = 256;
    ident->add_option("n", ident_ns, "energy levels")->required();
    ident->add_option("--cap", ident_cap, "multiplicity cap (larger n are skipped)");

    // scan-s6
    auto* scan = app.add_subcommand("scan-s6", "emit the S6 decay scan as CSV");
    std::string scan_kind = "generic";
    double scan_a = 0.3926990816987241;  // pi/8
    int scan_terms = 4;
    arw::u64 scan_bound = 2'000'000;
    std::string scan_out;
    int scan_cap = 256;
    scan->add_option("--sequence", scan_kind, "generic|cilleruelo|nu_a");
    scan->add_option("--a", scan_a, "nu_a half-width");
    scan->add_option("--terms", scan_terms, "number of sequence terms");
    scan->add_option("--search-bound", scan_bound, "prime search bound");
    scan->add_option("--out", scan_out, "CSV path (appends; resumes past rows)");
    scan->add_option("--cap", scan_cap, "multiplicity cap");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Monte Carlo nodal-length experiments");
    arw::u64 exp_n = 0;
    std::string exp_kind;
    double exp_a = 0.3926990816987241;
    int exp_terms = 3;
    arw::u64 exp_bound = 2'000'000;
    int exp_trials = 500;
    int exp_grid = 0;
    arw::u64 exp_seed = 1;
    std::string exp_out, exp_dump;
    exp->add_option("--n", exp_n, "single energy level");
    exp->add_option("--sequence", exp_kind, "generic|cilleruelo|nu_a");
    exp->add_option("--a", exp_a, "nu_a half-width");
    exp->add_option("--terms", exp_terms, "sequence terms");
    exp->add_option("--search-bound", exp_bound, "prime search bound");
    exp->add_option("--trials", exp_trials, "Monte Carlo trials");
    exp->add_option("--grid", exp_grid, "grid side M (0 = default)");
    exp->add_option("--seed", exp_seed, "experiment seed");
    exp->add_option("--out", exp_out, "record file (line-delimited, appended)");
    exp->add_option("--dump-grid", exp_dump, "write the first realization as CSV");

    // singular-set
    auto* sing = app.add_subcommand("singular-set", "classify singular squares");
    arw::u64 sing_n = 0;
    int sing_grid = 0;
    sing->add_option("--n", sing_n, "energy level")->required();
    sing->add_option("--grid", sing_grid, "grid side M (0 = default)");

    // k2-probe
    auto* probe = app.add_subcommand("k2-probe", "evaluate K2 exact/Taylor at a point");
    arw::u64 probe_n = 0;
    std::vector<double> probe_x{0.2, 0.3};
    probe->add_option("--n", probe_n, "energy level")->required();
    probe->add_option("--x", probe_x, "torus point x1 x2")->expected(2);

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = with_config_defaults(std::move(args));
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*lam) return cmd_lambda(lam_n, lam_json);
        if (*ident) {
            if (ident_ns.empty()) {
                std::fprintf(stderr, "identities: empty n list\n");
                return kExitUsage;
            }
            return cmd_identities(ident_ns, ident_cap, common.threads);
        }
        if (*scan) {
            auto seq = sequence_from_flags(scan_kind, scan_a, scan_terms, scan_bound);
            return cmd_scan_s6(seq, scan_out, scan_cap);
        }
        if (*exp) {
            std::vector<arw::FrequencySet> sets;
            std::vector<std::pair<std::string, std::string>> params = {
                {"trials", std::to_string(exp_trials)},
                {"grid", std::to_string(exp_grid)},
                {"seed", std::to_string(exp_seed)},
            };
            if (!exp_kind.empty()) {
                auto seq = sequence_from_flags(exp_kind, exp_a, exp_terms, exp_bound);
                for (std::size_t i = 0; i < seq.terms.size(); ++i)
                    sets.push_back(arw::enumerate_lambda_from_factorization(seq.term_factors[i]));
                params.emplace_back("sequence", exp_kind);
                if (exp_kind == "nu_a") params.emplace_back("a", std::to_string(exp_a));
                params.emplace_back("terms", std::to_string(exp_terms));
            } else if (exp_n > 0) {
                sets.push_back(arw::enumerate_lambda(exp_n));
                params.emplace_back("n", std::to_string(exp_n));
            } else {
                std::fprintf(stderr, "experiment: need --n or --sequence\n");
                return kExitUsage;
            }
            return cmd_experiment(sets, exp_trials, exp_grid, exp_seed, exp_out,
                                  common.threads, exp_dump, params);
        }
        if (*sing) return cmd_singular(sing_n, sing_grid, common.threads);
        if (*probe) return cmd_k2_probe(probe_n, probe_x[0], probe_x[1]);
    } catch (const arw::NotSumOfTwoSquares& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDomain;
    } catch (const arw::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDomain;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
