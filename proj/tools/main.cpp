// Command-line front end: spectrum / crb / trace / mc / green-check.
//
// Exit codes: 0 success, 1 config or input error, 2 I/O error,
// 3 validation failure. Data files carry no timestamps; run metadata
// goes into leading '#' comment lines so outputs are byte-stable for a
// fixed config and seed.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crbound/csv_io.hpp"
#include "crbound/emsource.hpp"
#include "crbound/fisher.hpp"
#include "crbound/kahan.hpp"
#include "crbound/mcsim.hpp"
#include "crbound/specfun.hpp"

namespace {

using crbound::KahanSum;
using crbound::ModalSpectrum;
using crbound::SpectrumEntry;
using crbound::Vec3;
namespace emsource = crbound::emsource;
namespace fisher = crbound::fisher;
namespace mcsim = crbound::mcsim;
namespace csv = crbound::csv;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kSchemaVersion = 1;

emsource::SourceConfig load_config(const std::string& path) {
    emsource::SourceConfig cfg;  // defaults: k=10, r0=1, r1=1.5, E0=1, eta0=1, lmax=40
    if (path.empty()) return cfg;
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    static const std::vector<std::string> known = {"schema_version", "k",        "r0",   "r1",
                                                   "E0",             "eta0",     "field", "sigma_w2",
                                                   "wnr_db",         "lmax"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const auto& k : known) ok = ok || (k == key);
        if (!ok) throw ConfigError("unknown config key: " + key);
    }
    if (j.contains("schema_version") && j["schema_version"].get<int>() != kSchemaVersion)
        throw ConfigError("unsupported schema_version");
    if (j.contains("sigma_w2") && j.contains("wnr_db"))
        throw ConfigError("sigma_w2 and wnr_db are mutually exclusive");
    try {
        if (j.contains("k")) cfg.k = j["k"].get<double>();
        if (j.contains("r0")) cfg.r0 = j["r0"].get<double>();
        if (j.contains("r1")) cfg.r1 = j["r1"].get<double>();
        if (j.contains("E0")) cfg.E0 = j["E0"].get<double>();
        if (j.contains("eta0")) cfg.eta0 = j["eta0"].get<double>();
        if (j.contains("lmax")) cfg.lmax = j["lmax"].get<int>();
        if (j.contains("sigma_w2")) cfg.sigma_w2 = j["sigma_w2"].get<double>();
        if (j.contains("wnr_db")) cfg.wnr_db = j["wnr_db"].get<double>();
        if (j.contains("field")) {
            const std::string f = j["field"].get<std::string>();
            if (f == "real")
                cfg.field = fisher::ScalarField::real_field;
            else if (f == "complex")
                cfg.field = fisher::ScalarField::complex_field;
            else
                throw ConfigError("field must be 'real' or 'complex'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open output file: " + path);
    return os;
}

std::vector<std::string> config_comments(const emsource::SourceConfig& cfg) {
    std::ostringstream ss;
    ss << "k=" << cfg.k << " r0=" << cfg.r0 << " r1=" << cfg.r1 << " E0=" << cfg.E0
       << " eta0=" << cfg.eta0 << " lmax=" << cfg.lmax;
    if (cfg.wnr_db)
        ss << " wnr_db=" << *cfg.wnr_db;
    else
        ss << " sigma_w2=" << cfg.sigma_w2;
    return {ss.str()};
}

int cmd_spectrum(const emsource::SourceConfig& cfg, const std::string& out_path) {
    const auto sig = emsource::jacobian_spectrum_scaled(cfg);
    const auto lam = emsource::noise_spectrum_scaled(cfg);
    const double white = cfg.resolved_sigma_w2();
    auto os = open_output(out_path);
    for (const auto& c : config_comments(cfg)) os << "# " << c << "\n";
    os << "tau,l,multiplicity,sigma2,lambda_iso,lambda_total,fisher_mu,crb_increment,"
          "sigma2_db,lambda_iso_db,lambda_total_db\n";
    for (std::size_t i = 0; i < sig.size(); ++i) {
        const auto& mode = sig[i].mode;
        const crbound::ScaledReal s2 = sig[i].value;
        const crbound::ScaledReal li = lam[i].value;
        const crbound::ScaledReal lt = li + crbound::ScaledReal::from(white);
        const double field_factor = cfg.field == fisher::ScalarField::real_field ? 2.0 : 1.0;
        const crbound::ScaledReal mu = field_factor * (s2 / lt);
        const crbound::ScaledReal inc = (2.0 * mode.l + 1.0) * (lt / s2);
        const double s2v = s2.underflows_double() ? 0.0 : s2.value();
        const double liv = li.underflows_double() ? 0.0 : li.value();
        const double ltv = lt.underflows_double() ? 0.0 : lt.value();
        os << mode.tau << "," << mode.l << "," << mode.multiplicity() << ","
           << csv::format_linear(s2v) << "," << csv::format_linear(liv) << ","
           << csv::format_linear(ltv) << "," << csv::format_linear(mu.value()) << ","
           << csv::format_linear(inc.value()) << "," << csv::format_db_of(s2v) << ","
           << csv::format_db_of(liv) << "," << csv::format_db_of(ltv) << "\n";
    }
    if (!os) throw IoError("write failed: " + out_path);
    return 0;
}

int cmd_crb(const emsource::SourceConfig& cfg, const std::vector<std::string>& wnr_tokens,
            const std::string& out_path) {
    std::vector<std::optional<double>> curves;  // nullopt = isotropic only
    curves.emplace_back(std::nullopt);
    for (const auto& t : wnr_tokens) {
        if (t == "none") continue;  // isotropic curve is always present
        try {
            std::size_t pos = 0;
            const double v = std::stod(t, &pos);
            if (pos != t.size()) throw std::invalid_argument("trailing");
            curves.emplace_back(v);
        } catch (const std::exception&) {
            throw ConfigError("bad --wnr-db entry: " + t);
        }
    }
    auto os = open_output(out_path);
    for (const auto& c : config_comments(cfg)) os << "# " << c << "\n";
    os << "L,wnr_db,crb,crb_db\n";
    for (const auto& wnr : curves) {
        emsource::SourceConfig run = cfg;
        run.sigma_w2 = 0.0;
        run.wnr_db = wnr;
        const fisher::CrbCurve curve = emsource::crb_L(run, run.lmax);
        for (const auto& pt : curve.points) {
            os << pt.truncation << ",";
            if (wnr)
                os << *wnr;
            else
                os << "none";
            os << "," << csv::format_linear(pt.bound) << "," << csv::format_db_of(pt.bound)
               << "\n";
        }
    }
    if (!os) throw IoError("write failed: " + out_path);
    return 0;
}

int cmd_trace(const emsource::SourceConfig& cfg, const std::string& sigma_csv,
              const std::string& lambda_csv) {
    ModalSpectrum sigma, lambda;
    if (!sigma_csv.empty() || !lambda_csv.empty()) {
        if (sigma_csv.empty() || lambda_csv.empty())
            throw ConfigError("trace needs both --sigma-csv and --lambda-csv, or neither");
        try {
            sigma = csv::read_spectrum_file(sigma_csv);
            lambda = csv::read_spectrum_file(lambda_csv);
        } catch (const csv::ParseError& e) {
            throw ConfigError(e.what());
        } catch (const std::exception& e) {
            throw IoError(e.what());
        }
    } else {
        // singular values from the electromagnetic spectrum
        const ModalSpectrum sig2 = emsource::jacobian_spectrum(cfg);
        std::vector<SpectrumEntry> ss;
        for (const auto& e : sig2.entries())
            ss.push_back({e.label, std::sqrt(e.value), e.multiplicity, e.underflow});
        sigma = ModalSpectrum(std::move(ss), crbound::SpectrumOrdering::by_label);
        lambda = emsource::noise_spectrum(cfg);
    }

    const auto trace = fisher::fisher_trace(sigma, lambda, fisher::OverlapMatrix::identity());
    std::printf("Fisher trace partial sums (every 4th shown):\n");
    for (std::size_t i = 0; i < trace.partial_sums.size(); i += 4)
        std::printf("  N=%-4zu S=%.12e\n", i + 1, trace.partial_sums[i]);
    std::printf("Fisher trace at truncation: %.12e (%s)\n", trace.value,
                trace.tail == fisher::SeriesDiagnosis::converged ? "tail converging"
                                                                 : "tail growing");

    // CRB tail: partial sums of lambda/sigma^2
    KahanSum<> crb;
    std::vector<double> crb_sums;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const auto& s = sigma.entries()[i];
        const auto& n = lambda.entries()[i];
        if (s.value == 0.0) continue;
        for (int m = 0; m < s.multiplicity; ++m) {
            crb += n.value / (s.value * s.value);
            crb_sums.push_back(crb.value());
        }
    }
    std::printf("CRB tail partial sums (every 4th shown):\n");
    for (std::size_t i = 0; i < crb_sums.size(); i += 4)
        std::printf("  N=%-4zu S=%.12e\n", i + 1, crb_sums[i]);

    const fisher::RegimeClass regime = fisher::regime_classify(sigma, lambda);
    std::printf("regime: %s\n", fisher::regime_name(regime));
    return 0;
}

int cmd_mc(const emsource::SourceConfig& cfg, int trials, int realizations, int n_directions,
           int cov_lmax, int rank, std::uint64_t seed, const std::string& out_path) {
    if (trials < 100) throw ConfigError("mc: trials must be >= 100");
    if (realizations < 100) throw ConfigError("mc: realizations must be >= 100");

    // covariance validation
    std::vector<std::vector<std::complex<double>>> realization_list;
    realization_list.reserve(static_cast<std::size_t>(realizations));
    for (int t = 0; t < realizations; ++t) {
        mcsim::Rng rng(seed, static_cast<std::uint64_t>(t) + 1);
        realization_list.push_back(
            mcsim::sample_isotropic_coeffs(cfg, cov_lmax, n_directions, rng));
    }
    const mcsim::TrialReport cov = mcsim::empirical_covariance(realization_list, cfg, cov_lmax);

    // estimation trials
    mcsim::Rng est_rng(seed, 0x100000000ULL);
    std::vector<std::complex<double>> truth(static_cast<std::size_t>(rank));
    mcsim::Rng truth_rng(seed, 0x200000000ULL);
    for (auto& t : truth) t = truth_rng.complex_normal(1.0);
    const mcsim::TrialReport est = mcsim::simulate_linear_estimation(
        cfg, truth, static_cast<std::size_t>(rank), trials, est_rng);

    auto os = open_output(out_path);
    std::vector<std::string> comments = config_comments(cfg);
    comments.push_back("seed=" + std::to_string(seed) + " trials=" + std::to_string(trials) +
                       " realizations=" + std::to_string(realizations) +
                       " n_directions=" + std::to_string(n_directions));
    comments.push_back("covariance rows: index=tau:l:m, target=lambda");
    csv::write_trial_report(os, cov, comments);
    os << "# estimation rows: index=tau:l:m, target=1/mu\n";
    csv::write_trial_report(os, est);
    if (!os) throw IoError("write failed: " + out_path);

    bool all_pass = true;
    int cov_fail = 0;
    for (const auto& s : cov.per_mode)
        if (std::abs(s.z_score) > 3.0) ++cov_fail;
    // per-(tau,l) variance bands, m pooled (see README)
    for (int l = 1; l <= cov_lmax; ++l) {
        for (int tau = 1; tau <= 2; ++tau) {
            KahanSum<> pooled;
            double target = 0.0;
            int count = 0;
            for (const auto& s : cov.per_mode) {
                if (s.mode.tau == tau && s.mode.l == l) {
                    pooled += s.emp_var;
                    target = s.target;
                    ++count;
                }
            }
            const double ratio = pooled.value() / (count * target);
            const bool ok = ratio > 0.9 && ratio < 1.1;
            std::printf("cov  (tau=%d,l=%d): Var/lambda = %.4f  [%s]\n", tau, l, ratio,
                        ok ? "pass" : "FAIL");
            all_pass = all_pass && ok;
        }
    }
    for (const auto& s : est.per_mode) {
        const double bias_se = std::sqrt(s.emp_var / est.trials);
        const bool bias_ok = std::abs(s.emp_mean) < 3.0 * bias_se;
        const bool var_ok = std::abs(s.z_score) < 3.0;
        std::printf("est  (tau=%d,l=%d,m=%+d): |bias|=%.3e (3SE=%.3e) var/target=%.4f  [%s]\n",
                    s.mode.tau, s.mode.l, s.mode.m, std::abs(s.emp_mean), 3.0 * bias_se,
                    s.emp_var / s.target, bias_ok && var_ok ? "pass" : "FAIL");
        all_pass = all_pass && bias_ok && var_ok;
    }
    std::printf("covariance per-mode 3SE failures: %d / %zu\n", cov_fail, cov.per_mode.size());
    if (!all_pass) throw ValidationFailure("one or more Monte Carlo bands failed");
    return 0;
}

int cmd_green_check(const emsource::SourceConfig& cfg, int lmax, int n_pairs, double kr_max,
                    std::uint64_t seed) {
    if (n_pairs == 0) {
        std::printf("warning: no point pairs requested; vacuous pass\n");
        return 0;
    }
    if (n_pairs < 0) throw ConfigError("green-check: n-pairs must be >= 0");
    const double r_cap = std::min(cfg.r1, kr_max / cfg.k);
    mcsim::Rng rng(seed, 17);
    std::vector<std::pair<Vec3, Vec3>> pairs;
    pairs.reserve(static_cast<std::size_t>(n_pairs));
    auto draw_point = [&]() {
        const crbound::Direction d = rng.isotropic_direction();
        const double r = r_cap * std::cbrt(rng.uniform());
        return r * d.unit_radial();
    };
    for (int i = 0; i < n_pairs; ++i) pairs.emplace_back(draw_point(), draw_point());
    double err = 0.0;
    try {
        err = mcsim::green_identity_check(cfg, lmax, pairs);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    std::printf("green-check: %d pairs, lmax=%d, max relative error = %.3e\n", n_pairs, lmax, err);
    if (!(err < 1e-6)) throw ValidationFailure("green identity error above 1e-6");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fisher information spectra and Cramer-Rao bounds for the spherical inverse source problem"};
    app.require_subcommand(1);

    std::string config_path, out_path = "out.csv";
    std::string sigma_csv, lambda_csv;
    std::vector<std::string> wnr_tokens = {"-60", "-20", "20"};
    int lmax_override = 0;
    int trials = 10000, realizations = 200, n_directions = 100000, cov_lmax = 5, rank = 10;
    int green_lmax = 40, n_pairs = 20;
    double kr_max = 5.0;
    std::uint64_t seed = 1;

    app.add_option("--config", config_path, "JSON configuration file")->capture_default_str();

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--lmax", lmax_override, "override lmax from the config");
        sub->add_option("--out", out_path, "output CSV path");
    };

    auto* sp = app.add_subcommand("spectrum", "write the per-mode sigma^2 / lambda table");
    add_common(sp);
    auto* cr = app.add_subcommand("crb", "write CRB(L) curves, isotropic plus WNR variants");
    add_common(cr);
    cr->add_option("--wnr-db", wnr_tokens, "WNR values in dB ('none' = isotropic only)")
        ->delimiter(',');
    auto* tr = app.add_subcommand("trace", "Fisher trace / CRB tail partial sums and regime");
    add_common(tr);
    tr->add_option("--sigma-csv", sigma_csv, "external singular value spectrum CSV");
    tr->add_option("--lambda-csv", lambda_csv, "external noise eigenvalue spectrum CSV");
    auto* mc = app.add_subcommand("mc", "Monte Carlo covariance and estimator validation");
    add_common(mc);
    mc->add_option("--trials", trials, "estimation trials")->capture_default_str();
    mc->add_option("--realizations", realizations, "covariance realizations")->capture_default_str();
    mc->add_option("--n-directions", n_directions, "plane-wave directions per realization")
        ->capture_default_str();
    mc->add_option("--cov-lmax", cov_lmax, "highest multipole tracked by the covariance check")
        ->capture_default_str();
    mc->add_option("--rank", rank, "retained modes r for the estimator")->capture_default_str();
    mc->add_option("--seed", seed, "RNG seed")->capture_default_str();
    auto* gc = app.add_subcommand("green-check", "mode-sum vs closed-form noise covariance dyadic");
    gc->add_option("--config", config_path, "JSON configuration file");
    gc->add_option("--lmax", green_lmax, "mode sum truncation")->capture_default_str();
    gc->add_option("--n-pairs", n_pairs, "number of random point pairs")->capture_default_str();
    gc->add_option("--kr-max", kr_max, "largest k|r| for sampled points")->capture_default_str();
    gc->add_option("--seed", seed, "RNG seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        emsource::SourceConfig cfg = load_config(config_path);
        if (lmax_override > 0) cfg.lmax = lmax_override;
        try {
            cfg.validate();
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        if (sp->parsed()) return cmd_spectrum(cfg, out_path);
        if (cr->parsed()) return cmd_crb(cfg, wnr_tokens, out_path);
        if (tr->parsed()) return cmd_trace(cfg, sigma_csv, lambda_csv);
        if (mc->parsed())
            return cmd_mc(cfg, trials, realizations, n_directions, cov_lmax, rank, seed, out_path);
        if (gc->parsed()) return cmd_green_check(cfg, green_lmax, n_pairs, kr_max, seed);
        return 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ValidationFailure& e) {
        std::fprintf(stderr, "validation failure: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
