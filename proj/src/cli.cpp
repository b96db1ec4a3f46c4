#include "qldev/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <memory>
#include <ostream>
#include <sstream>

#include "qldev/errors.hpp"
#include "qldev/estimation.hpp"
#include "qldev/expfam.hpp"
#include "qldev/families.hpp"
#include "qldev/measurement.hpp"
#include "qldev/qmetrics.hpp"
#include "qldev/repdecomp.hpp"
#include "qldev/rng.hpp"

namespace qldev::cli {

namespace {

// 12 significant digits, locale-independent
std::string fmt12(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

std::vector<double> parse_eps(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw config_error("empty eps list");
    return out;
}

std::vector<int> parse_ngrid(const std::string& s) {
    int start = 0, stop = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::stringstream ss(s);
    ss >> start >> c1 >> stop >> c2 >> step;
    if (ss.fail() || c1 != ':' || c2 != ':' || step <= 0 || start <= 0 || stop < start)
        throw config_error("n grid must be start:stop:step with positive entries");
    std::vector<int> out;
    for (int n = start; n <= stop; n += step) out.push_back(n);
    return out;
}

struct FamilyFlags {
    std::string name = "equatorial";
    double r = 0.5;
    double nbar = 1.0;
    int trunc = 60;
    int k = 2;

    void attach(CLI::App* cmd) {
        cmd->add_option("--family", name, "family: equatorial|gaussian|diagonal")
            ->check(CLI::IsMember({"equatorial", "gaussian", "diagonal"}));
        cmd->add_option("--r", r, "equatorial radius in (0,1]");
        cmd->add_option("--nbar", nbar, "gaussian mean photon number");
        cmd->add_option("--trunc", trunc, "gaussian Fock truncation");
        cmd->add_option("--k", k, "diagonal family outcome count");
    }

    std::unique_ptr<StateFamily> build() const {
        if (name == "equatorial") return std::make_unique<EquatorialFamily>(r);
        if (name == "gaussian")
            return std::make_unique<GaussianFockFamily>(nbar, trunc);
        RVec base = RVec::Ones(k), f(k);
        for (int i = 0; i < k; ++i) f[i] = i;
        return std::make_unique<DiagonalFamily>(base, f);
    }

    nlohmann::json describe() const {
        nlohmann::json j{{"family", name}};
        if (name == "equatorial") j["r"] = r;
        if (name == "gaussian") {
            j["nbar"] = nbar;
            j["trunc"] = trunc;
        }
        if (name == "diagonal") j["k"] = k;
        return j;
    }
};

std::uint64_t effective_seed(std::uint64_t flag_seed) {
    if (const char* env = std::getenv("QLDEV_SEED")) {
        std::uint64_t v = 0;
        auto res = std::from_chars(env, env + std::string(env).size(), v);
        if (res.ec != std::errc())
            throw config_error("QLDEV_SEED is not a valid integer");
        return v;
    }
    return flag_seed;
}

StrategySpec build_strategy(const std::string& name, double theta0, double delta,
                            double theta1, int m, double nbar) {
    if (name == "fixed-sld") return FixedSLD{theta0};
    if (name == "two-stage") return TwoStage{delta};
    if (name == "superefficient") return Superefficient{theta1};
    if (name == "m-adaptive") return MAdaptive{theta0, m, delta};
    if (name == "gaussian-homodyne") return GaussianHomodyne{nbar};
    if (name == "gaussian-number") return GaussianNumber{nbar};
    throw config_error("unknown strategy: " + name);
}

void emit_json(std::ostream& out, const nlohmann::json& j) { out << j.dump() << "\n"; }

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const capacity_error& e) {
        emit_json(err, {{"error", "capacity"}, {"message", e.what()}});
        return 3;
    } catch (const error& e) {
        emit_json(err, {{"error", "validation"}, {"message", e.what()}});
        return 2;
    } catch (const std::exception& e) {
        emit_json(err, {{"error", "internal"}, {"message", e.what()}});
        return 2;
    }
}

namespace {

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
    CLI::App app{"quantum Fisher information and large-deviation estimation toolkit"};
    app.require_subcommand(1);

    // shared state
    FamilyFlags fam;
    double theta = 0.0, theta0 = 0.0, theta1 = 0.0, theta_prime = 0.0;
    bool have_theta_prime = false;
    std::string eps_str = "0.5";
    std::string ngrid_str = "100:800:100";
    long trials = 10000;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string strategy_name = "fixed-sld";
    double delta = 0.25;
    int m = 1;
    std::string format = "csv";
    bool dry = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_flag("--dry-run", dry, "validate and print the plan only");
    };

    auto* c_metrics = app.add_subcommand("metrics", "Fisher informations and divergences");
    fam.attach(c_metrics);
    c_metrics->add_option("--theta", theta, "evaluation point")->required();
    c_metrics->add_option("--theta0", theta_prime, "second point for divergences");
    add_common(c_metrics);

    auto* c_limits = app.add_subcommand("limits", "finite-difference limit table");
    fam.attach(c_limits);
    c_limits->add_option("--theta", theta)->required();
    c_limits->add_option("--eps", eps_str, "comma-separated eps grid")->required();
    c_limits->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    add_common(c_limits);

    auto* c_sim = app.add_subcommand("simulate", "tail-probability Monte Carlo");
    fam.attach(c_sim);
    c_sim->add_option("--strategy", strategy_name)
        ->check(CLI::IsMember({"fixed-sld", "two-stage", "superefficient", "m-adaptive",
                               "gaussian-homodyne", "gaussian-number"}));
    c_sim->add_option("--theta", theta, "true parameter")->required();
    c_sim->add_option("--theta0", theta0);
    c_sim->add_option("--theta1", theta1);
    c_sim->add_option("--delta", delta);
    c_sim->add_option("--m", m);
    c_sim->add_option("--eps", eps_str)->required();
    c_sim->add_option("--ngrid", ngrid_str)->required();
    c_sim->add_option("--trials", trials);
    c_sim->add_option("--seed", seed);
    c_sim->add_option("--workers", workers, "scheduling hint; never changes results");
    add_common(c_sim);

    auto* c_rates = app.add_subcommand("rates", "exponent extraction and bounds");
    fam.attach(c_rates);
    c_rates->add_option("--strategy", strategy_name)
        ->check(CLI::IsMember({"fixed-sld", "two-stage", "superefficient", "m-adaptive",
                               "gaussian-homodyne", "gaussian-number"}));
    c_rates->add_option("--theta", theta)->required();
    c_rates->add_option("--theta0", theta0);
    c_rates->add_option("--theta1", theta1);
    c_rates->add_option("--delta", delta);
    c_rates->add_option("--m", m);
    c_rates->add_option("--eps", eps_str)->required();
    c_rates->add_option("--ngrid", ngrid_str)->required();
    c_rates->add_option("--trials", trials);
    c_rates->add_option("--seed", seed);
    c_rates->add_option("--workers", workers);
    add_common(c_rates);

    auto* c_schur = app.add_subcommand("schur", "relative-entropy sandwich table");
    int mmax = 6;
    double schur_r = 0.5;
    c_schur->add_option("--r", schur_r);
    c_schur->add_option("--theta0", theta0)->required();
    c_schur->add_option("--theta1", theta1)->required();
    c_schur->add_option("--mmax", mmax)->check(CLI::Range(1, 10));
    add_common(c_schur);

    auto* c_bounds = app.add_subcommand("bounds", "theoretical exponent bounds");
    fam.attach(c_bounds);
    c_bounds->add_option("--theta", theta)->required();
    double bounds_eps = 0.1;
    c_bounds->add_option("--eps", bounds_eps)->required();
    add_common(c_bounds);

    auto* c_expfam = app.add_subcommand("expfam", "classical Cramer rates");
    std::string ef_name = "bernoulli";
    double ef_p = 0.4, ef_a = 0.6;
    std::string ef_side = "geq", ef_probs = "";
    bool ef_rate = false, ef_simulate = false;
    c_expfam->add_option("--family", ef_name)
        ->check(CLI::IsMember({"bernoulli", "multinomial"}));
    c_expfam->add_option("--p", ef_p, "bernoulli success probability");
    c_expfam->add_option("--probs", ef_probs, "multinomial probabilities, comma list");
    c_expfam->add_option("--a", ef_a, "event threshold on the statistic mean");
    c_expfam->add_option("--side", ef_side)->check(CLI::IsMember({"geq", "leq"}));
    c_expfam->add_flag("--rate", ef_rate, "print the Cramer rate");
    c_expfam->add_flag("--simulate", ef_simulate, "Monte-Carlo tail table");
    c_expfam->add_option("--ngrid", ngrid_str);
    c_expfam->add_option("--trials", trials);
    c_expfam->add_option("--seed", seed);
    add_common(c_expfam);

    std::vector<const char*> argv;
    argv.push_back("qldev");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        have_theta_prime = c_metrics->count("--theta0") > 0;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        emit_json(err, {{"error", "validation"}, {"message", e.what()}});
        return 2;
    }
    seed = effective_seed(seed);

    if (c_metrics->parsed()) {
        auto family = fam.build();
        nlohmann::json plan = fam.describe();
        plan["subcommand"] = "metrics";
        plan["theta"] = theta;
        if (dry) {
            emit_json(out, {{"dry_run", true}, {"plan", plan}});
            return 0;
        }
        Mat rho = family->state(theta);
        Mat drho = derivative(*family, theta);
        auto sld = sld_and_fisher(rho, drho);
        auto kmb = kmb_and_fisher(rho, drho);
        nlohmann::json j = fam.describe();
        j["theta"] = theta;
        j["j_sld"] = fmt12(sld.j);
        j["j_kmb"] = fmt12(kmb.j);
        try {
            j["j_rld"] = fmt12(rld_fisher(rho, drho));
        } catch (const rank_error&) {
            // omitted for singular states
        }
        if (have_theta_prime) {
            Mat sigma = family->state(theta_prime);
            j["theta0"] = theta_prime;
            j["relative_entropy"] = fmt12(relative_entropy(rho, sigma));
            j["bures"] = fmt12(bures_distance(rho, sigma));
            j["affinity"] = fmt12(affinity(rho, sigma));
        }
        emit_json(out, j);
        return 0;
    }

    if (c_limits->parsed()) {
        auto family = fam.build();
        std::vector<double> eps = parse_eps(eps_str);
        if (dry) {
            emit_json(out, {{"dry_run", true},
                            {"plan", {{"subcommand", "limits"},
                                      {"theta", theta},
                                      {"eps", eps},
                                      {"family", fam.describe()}}}});
            return 0;
        }
        auto rows = limit_table(*family, theta, eps);
        if (format == "json") {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& r : rows)
                arr.push_back({{"eps", fmt12(r.eps)},
                               {"two_d_over_eps2", fmt12(r.two_d_over_eps2)},
                               {"four_b2_over_eps2", fmt12(r.four_b2_over_eps2)},
                               {"i_over_eps2", fmt12(r.i_over_eps2)},
                               {"j_sld", fmt12(r.j_sld)},
                               {"j_kmb", fmt12(r.j_kmb)}});
            emit_json(out, arr);
        } else {
            out << "eps,two_d_over_eps2,four_b2_over_eps2,i_over_eps2,j_sld,j_kmb\n";
            for (const auto& r : rows)
                out << fmt12(r.eps) << ',' << fmt12(r.two_d_over_eps2) << ','
                    << fmt12(r.four_b2_over_eps2) << ',' << fmt12(r.i_over_eps2) << ','
                    << fmt12(r.j_sld) << ',' << fmt12(r.j_kmb) << "\n";
        }
        return 0;
    }

    if (c_sim->parsed() || c_rates->parsed()) {
        SimulationConfig cfg;
        cfg.n_grid = parse_ngrid(ngrid_str);
        cfg.eps_list = parse_eps(eps_str);
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.worker_hint = workers;
        StrategySpec strategy =
            build_strategy(strategy_name, theta0, delta, theta1, m, fam.nbar);
        bool gaussian = strategy_name.rfind("gaussian", 0) == 0;
        std::unique_ptr<StateFamily> family;
        if (!gaussian) family = fam.build();
        if (dry) {
            emit_json(out, {{"dry_run", true},
                            {"plan", {{"subcommand", c_sim->parsed() ? "simulate" : "rates"},
                                      {"strategy", strategy_name},
                                      {"theta", theta},
                                      {"eps", cfg.eps_list},
                                      {"n_grid", cfg.n_grid},
                                      {"trials", cfg.trials},
                                      {"seed", cfg.seed},
                                      {"workers", cfg.worker_hint},
                                      {"family", fam.describe()}}}});
            return 0;
        }
        auto tails = simulate_tail(strategy, family.get(), theta, cfg);
        if (c_sim->parsed()) {
            out << "strategy,theta_true,epsilon,n,trials,hits,p_hat,wilson_lo,wilson_hi\n";
            for (const auto& t : tails)
                out << strategy_name << ',' << fmt12(theta) << ',' << fmt12(t.eps)
                    << ',' << t.n << ',' << t.trials << ',' << t.hit_count << ','
                    << fmt12(t.p_hat) << ',' << fmt12(t.wilson_lo) << ','
                    << fmt12(t.wilson_hi) << "\n";
            return 0;
        }
        // rates: per-eps regression, alpha fit, theoretical bounds
        nlohmann::json j;
        j["strategy"] = strategy_name;
        j["theta"] = theta;
        j["note"] = "single regression slope; limsup and liminf exponents are "
                    "indistinguishable at finite n";
        std::vector<std::pair<double, BetaFit>> fits;
        nlohmann::json per_eps = nlohmann::json::array();
        for (double eps : cfg.eps_list) {
            std::vector<TailEstimate> slice;
            for (const auto& t : tails)
                if (t.eps == eps) slice.push_back(t);
            nlohmann::json je{{"eps", fmt12(eps)}};
            try {
                BetaFit fit = extract_beta(slice);
                fits.emplace_back(eps, fit);
                je["beta"] = fmt12(fit.beta);
                je["stderr"] = fmt12(fit.stderr_);
            } catch (const estimation_error& e) {
                je["error"] = e.what();
            }
            if (!gaussian) {
                BoundTriple b = theoretical_bounds(*family, theta, eps);
                je["bounds"] = {{"j_half", fmt12(b.j_half)},
                                {"jt_half", fmt12(b.jt_half)},
                                {"inf_d", fmt12(b.inf_d)},
                                {"inf_d_inside", fmt12(b.inf_d_inside)}};
            } else {
                double l = std::log(1.0 + 1.0 / fam.nbar);
                je["bounds"] = {{"j_half", fmt12(1.0 / (fam.nbar + 0.5))},
                                {"jt_half", fmt12(l)},
                                {"inf_d", fmt12(l * eps * eps)},
                                {"inf_d_inside", fmt12(0.0)}};
            }
            per_eps.push_back(je);
        }
        j["per_eps"] = per_eps;
        if (fits.size() >= 3) j["alpha"] = fmt12(extract_alpha(fits));
        emit_json(out, j);
        return 0;
    }

    if (c_schur->parsed()) {
        if (dry) {
            emit_json(out, {{"dry_run", true},
                            {"plan", {{"subcommand", "schur"},
                                      {"r", schur_r},
                                      {"theta0", theta0},
                                      {"theta1", theta1},
                                      {"mmax", mmax}}}});
            return 0;
        }
        EquatorialFamily family(schur_r);
        auto forms = equatorial_closed_forms(schur_r);
        double d = forms.d(theta0, theta1);
        out << "m,D,lower,value,upper\n";
        for (int mm = 1; mm <= mmax; ++mm) {
            double value = sandwich_kl(family, theta0, theta1, mm);
            out << mm << ',' << fmt12(d) << ',' << fmt12(mm * d - std::log(mm + 1.0))
                << ',' << fmt12(value) << ',' << fmt12(mm * d) << "\n";
        }
        return 0;
    }

    if (c_bounds->parsed()) {
        auto family = fam.build();
        if (dry) {
            emit_json(out, {{"dry_run", true},
                            {"plan", {{"subcommand", "bounds"},
                                      {"theta", theta},
                                      {"eps", bounds_eps},
                                      {"family", fam.describe()}}}});
            return 0;
        }
        BoundTriple b = theoretical_bounds(*family, theta, bounds_eps);
        emit_json(out, {{"j_half", fmt12(b.j_half)},
                        {"jt_half", fmt12(b.jt_half)},
                        {"inf_d", fmt12(b.inf_d)},
                        {"inf_d_inside", fmt12(b.inf_d_inside)}});
        return 0;
    }

    if (c_expfam->parsed()) {
        std::vector<double> probs;
        if (ef_name == "bernoulli") {
            if (!(ef_p > 0.0) || !(ef_p < 1.0))
                throw config_error("expfam: --p must lie in (0,1)");
            probs = {1.0 - ef_p, ef_p};
        } else {
            probs = parse_eps(ef_probs);
            double s = 0.0;
            for (double p : probs) s += p;
            if (probs.size() < 2 || std::abs(s - 1.0) > 1e-9)
                throw config_error("expfam: --probs must be a distribution");
        }
        int k = static_cast<int>(probs.size());
        RVec base(k);
        Eigen::MatrixXd stats(k, 1);
        for (int i = 0; i < k; ++i) {
            base[i] = probs[i];
            stats(i, 0) = i;
        }
        ExponentialFamily family = make_expfam(base, stats);
        Side side = ef_side == "geq" ? Side::geq : Side::leq;
        if (dry) {
            emit_json(out, {{"dry_run", true},
                            {"plan", {{"subcommand", "expfam"},
                                      {"family", ef_name},
                                      {"a", ef_a},
                                      {"side", ef_side},
                                      {"rate", ef_rate},
                                      {"simulate", ef_simulate}}}});
            return 0;
        }
        if (ef_rate) {
            double rate = cramer_rate(family, Eigen::VectorXd::Zero(1), 0, ef_a, side);
            emit_json(out, {{"family", ef_name},
                            {"a", ef_a},
                            {"side", ef_side},
                            {"rate", fmt12(rate)}});
        }
        if (ef_simulate) {
            std::vector<int> n_grid = parse_ngrid(ngrid_str);
            out << "n,p_hat,rate_hat\n";
            for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
                int n = n_grid[ni];
                long hits = 0;
                if (k == 2) {
                    std::vector<double> pmf(n + 1);
                    double lp = std::log(probs[1]), lq = std::log(probs[0]);
                    for (int kk = 0; kk <= n; ++kk) {
                        double l = std::lgamma(n + 1.0) - std::lgamma(kk + 1.0) -
                                   std::lgamma(n - kk + 1.0) + kk * lp + (n - kk) * lq;
                        pmf[kk] = l < -700.0 ? 0.0 : std::exp(l);
                    }
                    AliasSampler alias(pmf);
                    for (long t = 0; t < trials; ++t) {
                        Rng rng = trial_rng(seed, 0, ni, static_cast<std::uint64_t>(t));
                        double mean = static_cast<double>(alias.draw(rng)) / n;
                        bool hit = side == Side::geq ? mean >= ef_a : mean <= ef_a;
                        if (hit) ++hits;
                    }
                } else {
                    AliasSampler alias(probs);
                    for (long t = 0; t < trials; ++t) {
                        Rng rng = trial_rng(seed, 0, ni, static_cast<std::uint64_t>(t));
                        double sum = 0.0;
                        for (int c = 0; c < n; ++c)
                            sum += static_cast<double>(alias.draw(rng));
                        double mean = sum / n;
                        bool hit = side == Side::geq ? mean >= ef_a : mean <= ef_a;
                        if (hit) ++hits;
                    }
                }
                double p_hat = static_cast<double>(hits) / static_cast<double>(trials);
                out << n << ',' << fmt12(p_hat) << ','
                    << (p_hat > 0.0 ? fmt12(-std::log(p_hat) / n) : "nan") << "\n";
            }
        }
        if (!ef_rate && !ef_simulate)
            throw config_error("expfam: pass --rate and/or --simulate");
        return 0;
    }

    throw config_error("no subcommand given");
}

}  // namespace

}  // namespace qldev::cli
