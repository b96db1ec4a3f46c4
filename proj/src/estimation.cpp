#include "qldev/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <thread>

#include "qldev/errors.hpp"
#include "qldev/measurement.hpp"
#include "qldev/qmetrics.hpp"
#include "qldev/repdecomp.hpp"
#include "qldev/tolerances.hpp"

namespace qldev {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::pair<double, double> wilson_interval(long hits, long trials) {
    if (trials <= 0 || hits < 0 || hits > trials)
        throw validation_error("wilson_interval: bad counts");
    const double z = 1.959963984540054;  // 95%
    double n = static_cast<double>(trials);
    double p = static_cast<double>(hits) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(center - half, 0.0), std::min(center + half, 1.0)};
}

namespace {

std::vector<double> binomial_pmf(int n, double p) {
    std::vector<double> pmf(n + 1, 0.0);
    if (p <= 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (p >= 1.0) {
        pmf[n] = 1.0;
        return pmf;
    }
    double lp = std::log(p), lq = std::log1p(-p);
    for (int k = 0; k <= n; ++k) {
        double l = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                   std::lgamma(n - k + 1.0) + k * lp + (n - k) * lq;
        pmf[k] = l < -700.0 ? 0.0 : std::exp(l);
    }
    return pmf;
}

// grid maximum-likelihood fit of a one-parameter measured family
class CurveMle {
  public:
    CurveMle(const StateFamily& fam, const POVM& m, double lo, double hi, double step)
        : lo_(lo), hi_(hi) {
        int pts = static_cast<int>(std::floor((hi - lo) / step)) + 1;
        grid_.reserve(pts);
        logp_.resize(pts, static_cast<int>(m.elements.size()));
        for (int g = 0; g < pts; ++g) {
            double th = std::min(lo + g * step, hi);
            grid_.push_back(th);
            Mat rho = fam.state(th);
            for (std::size_t i = 0; i < m.elements.size(); ++i) {
                double p = std::max((rho * m.elements[i]).trace().real(), 1e-300);
                logp_(g, static_cast<int>(i)) = std::log(p);
            }
        }
    }

    double mle(const std::vector<long>& counts) const {
        int best = 0;
        double best_ll = -kInf;
        for (int g = 0; g < static_cast<int>(grid_.size()); ++g) {
            double ll = 0.0;
            for (std::size_t i = 0; i < counts.size(); ++i)
                if (counts[i] > 0) ll += counts[i] * logp_(g, static_cast<int>(i));
            if (ll > best_ll) {
                best_ll = ll;
                best = g;
            }
        }
        // parabolic refinement on the log-likelihood around the grid argmax
        if (best > 0 && best + 1 < static_cast<int>(grid_.size())) {
            auto ll_at = [&](int g) {
                double ll = 0.0;
                for (std::size_t i = 0; i < counts.size(); ++i)
                    if (counts[i] > 0) ll += counts[i] * logp_(g, static_cast<int>(i));
                return ll;
            };
            double lm = ll_at(best - 1), l0 = best_ll, lp = ll_at(best + 1);
            double den = lm - 2.0 * l0 + lp;
            if (den < -1e-12) {
                double off = 0.5 * (lm - lp) / den;
                off = std::clamp(off, -1.0, 1.0);
                double h = grid_[best + 1] - grid_[best];
                return std::clamp(grid_[best] + off * h, lo_, hi_);
            }
        }
        return grid_[best];
    }

  private:
    double lo_, hi_;
    std::vector<double> grid_;
    Eigen::MatrixXd logp_;
};

using Sampler = std::function<double(Rng&)>;

Sampler fixed_sld_sampler(double theta0, const StateFamily& fam, double theta_true,
                          int n) {
    Mat rho0 = fam.state(theta0);
    auto [L, J] = sld_and_fisher(rho0, derivative(fam, theta0));
    if (!(J > 0.0)) throw config_error("fixed SLD: vanishing Fisher information");
    POVM pvm = spectral_pvm(Mat(L / J));
    OutcomeDistribution dist = distribution(pvm, fam.state(theta_true));
    if (dist.values.size() == 2) {
        auto alias = std::make_shared<AliasSampler>(binomial_pmf(n, dist.probabilities[0]));
        double x1 = dist.values[0], x2 = dist.values[1];
        return [=](Rng& rng) {
            auto k = static_cast<double>(alias->draw(rng));
            return (k * x1 + (n - k) * x2) / n + theta0;
        };
    }
    auto alias = std::make_shared<AliasSampler>(dist.probabilities);
    auto values = std::make_shared<std::vector<double>>(dist.values);
    return [=](Rng& rng) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += (*values)[alias->draw(rng)];
        return s / n + theta0;
    };
}

struct TwoStageModel {
    int n1, n2;
    POVM mf;
    std::shared_ptr<AliasSampler> alias1;
    std::shared_ptr<CurveMle> curve;
    Mat rho_true;
    std::pair<double, double> window;
};

TwoStageModel make_two_stage_model(double delta, const StateFamily& fam,
                                   double theta_true, int n) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw config_error("two-stage: delta outside (0,1)");
    TwoStageModel m;
    m.n1 = std::min(static_cast<int>(std::ceil(delta * n)), n);
    if (m.n1 < 1) throw config_error("two-stage: empty first stage");
    m.n2 = n - m.n1;
    m.mf = faithful_povm(fam.dim());
    m.rho_true = fam.state(theta_true);
    OutcomeDistribution d1 = distribution(m.mf, m.rho_true);
    m.alias1 = std::make_shared<AliasSampler>(d1.probabilities);
    m.window = fam.search_window(theta_true);
    m.curve = std::make_shared<CurveMle>(fam, m.mf, m.window.first, m.window.second,
                                         5e-3);
    return m;
}

double two_stage_trial(const TwoStageModel& m, const StateFamily& fam, Rng& rng) {
    std::vector<long> counts(m.mf.elements.size(), 0);
    for (int i = 0; i < m.n1; ++i) ++counts[m.alias1->draw(rng)];
    double th_check = m.curve->mle(counts);
    if (m.n2 == 0) return th_check;
    Mat rho_chk = fam.state(th_check);
    auto [L, J] = sld_and_fisher(rho_chk, derivative(fam, th_check));
    (void)J;
    POVM e2 = spectral_pvm(L);
    OutcomeDistribution d2 = distribution(e2, m.rho_true);
    AliasSampler alias2(d2.probabilities);
    double mean = 0.0;
    for (int i = 0; i < m.n2; ++i) mean += d2.values[alias2.draw(rng)];
    mean /= m.n2;
    // solve Tr rho_T L = mean near th_check
    auto g = [&](double t) { return (fam.state(t) * L).trace().real() - mean; };
    double lo = std::max(th_check - M_PI / 2, m.window.first);
    double hi = std::min(th_check + M_PI / 2, m.window.second);
    double glo = g(lo), ghi = g(hi);
    if (glo * ghi > 0.0) return std::abs(glo) < std::abs(ghi) ? lo : hi;  // clamp
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Sampler two_stage_sampler(double delta, const StateFamily& fam, double theta_true,
                          int n) {
    auto model = std::make_shared<TwoStageModel>(
        make_two_stage_model(delta, fam, theta_true, n));
    const StateFamily* fp = &fam;
    return [model, fp](Rng& rng) { return two_stage_trial(*model, *fp, rng); };
}

// enumeration of count vectors over k outcomes summing to n
void enumerate_counts(int k, int n, std::vector<long>& cur,
                      const std::function<void(const std::vector<long>&)>& visit) {
    if (static_cast<int>(cur.size()) == k - 1) {
        cur.push_back(n - std::accumulate(cur.begin(), cur.end(), 0L));
        visit(cur);
        cur.pop_back();
        return;
    }
    long used = std::accumulate(cur.begin(), cur.end(), 0L);
    for (long c = 0; c <= n - used; ++c) {
        cur.push_back(c);
        enumerate_counts(k, n, cur, visit);
        cur.pop_back();
    }
}

double log_multinomial(const std::vector<long>& counts, const std::vector<double>& p) {
    long n = std::accumulate(counts.begin(), counts.end(), 0L);
    double l = std::lgamma(n + 1.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        l -= std::lgamma(counts[i] + 1.0);
        if (counts[i] > 0) {
            if (p[i] <= 0.0) return -kInf;
            l += counts[i] * std::log(p[i]);
        }
    }
    return l;
}

}  // namespace

double run_fixed_sld(double theta0, const StateFamily& fam, double theta_true, int n,
                     Rng& rng) {
    return fixed_sld_sampler(theta0, fam, theta_true, n)(rng);
}

double mgf_phi(const StateFamily& fam, double theta, double theta_check, double s) {
    Mat rho = fam.state(theta);
    Mat rho_chk = fam.state(theta_check);
    auto [L, J] = sld_and_fisher(rho_chk, derivative(fam, theta_check));
    if (!(J > 0.0)) throw config_error("mgf_phi: vanishing Fisher information");
    Mat x = L / J;
    double c = (rho * x).trace().real();
    Mat centered = x - c * Mat::Identity(x.rows(), x.cols());
    Mat e = spectral_apply(centered, [s](double v) { return std::exp(s * v); });
    return (rho * e).trace().real();
}

double run_two_stage(double delta, const StateFamily& fam, double theta_true, int n,
                     Rng& rng) {
    TwoStageModel m = make_two_stage_model(delta, fam, theta_true, n);
    return two_stage_trial(m, fam, rng);
}

ExactDistribution superefficient_distribution(double theta1, const StateFamily& fam,
                                              double theta_true, int n) {
    if (fam.dim() != 2)
        throw config_error("superefficient: qubit families only");
    if (n < 2 || n > 12)
        throw capacity_error("superefficient: exact mode requires 2 <= n <= 12");
    int m1 = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    int m2 = n - m1;
    if (m2 < 1) throw capacity_error("superefficient: n too small for the split");
    POVM mf = faithful_povm(2);
    OutcomeDistribution d_true = distribution(mf, fam.state(theta_true));
    auto window = fam.search_window(theta1);
    CurveMle curve(fam, mf, window.first, window.second, 5e-3);

    RefinedPVM refined = refined_pvm(fam, theta1, m2);
    Mat rho_true_n = tensor_power(fam.state(theta_true), m2, 1 << m2);
    Mat rho1_n = tensor_power(fam.state(theta1), m2, 1 << m2);
    std::vector<double> pt = refined_probs(refined, rho_true_n);
    std::vector<double> p1 = refined_probs(refined, rho1_n);
    Mat rho1 = fam.state(theta1);

    double delta_m = std::pow(static_cast<double>(m2), -0.2);
    std::map<double, double> acc;
    std::vector<long> cur;
    enumerate_counts(static_cast<int>(mf.elements.size()), m1, cur,
                     [&](const std::vector<long>& counts) {
        double lp = log_multinomial(counts, d_true.probabilities);
        if (lp < -700.0) return;
        double p_counts = std::exp(lp);
        double th_check = curve.mle(counts);
        double d = relative_entropy(fam.state(th_check), rho1);
        double factor = std::isfinite(d)
                            ? std::exp(m2 * (1.0 - delta_m) * d)
                            : kInf;
        std::vector<double> pc =
            refined_probs(refined, tensor_power(fam.state(th_check), m2, 1 << m2));
        for (std::size_t w = 0; w < pt.size(); ++w) {
            if (pt[w] <= 0.0) continue;
            bool accept = factor * p1[w] >= pc[w];
            acc[accept ? theta1 : th_check] += p_counts * pt[w];
        }
    });
    ExactDistribution out;
    double total = 0.0;
    for (auto& [v, p] : acc) {
        out.values.push_back(v);
        out.probs.push_back(p);
        total += p;
    }
    for (double& p : out.probs) p /= total;
    return out;
}

double run_superefficient(double theta1, const StateFamily& fam, double theta_true,
                          int n, Rng& rng) {
    ExactDistribution d = superefficient_distribution(theta1, fam, theta_true, n);
    AliasSampler alias(d.probs);
    return d.values[alias.draw(rng)];
}

namespace {

struct MAdaptiveModel {
    int m;
    double delta, theta0;
    long n_faithful_outcomes;  // K^m
    int k_single;              // K
    std::vector<double> grid;
    Eigen::MatrixXd log_qf;    // grid x K, single-copy faithful log-probs
    Eigen::MatrixXd log_qe;    // grid x 2^m, refined log-probs
    std::vector<double> model_kl;  // D(P_u || P_theta0) per grid point
    int theta0_idx = 0;
    std::shared_ptr<AliasSampler> alias_f, alias_e, alias_branch;
    std::vector<double> log_p0_f, log_p0_e;  // at theta0, for the budget
};

MAdaptiveModel make_m_adaptive_model(double theta0, int m, double delta,
                                     const StateFamily& fam, double theta_true) {
    if (fam.dim() != 2) throw config_error("m-adaptive: qubit families only");
    if (m < 1 || m > 6) throw capacity_error("m-adaptive: m must lie in [1, 6]");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw config_error("m-adaptive: delta outside (0,1)");
    MAdaptiveModel md;
    md.m = m;
    md.delta = delta;
    md.theta0 = theta0;
    POVM mf = faithful_povm(2);
    md.k_single = static_cast<int>(mf.elements.size());
    md.n_faithful_outcomes = 1;
    for (int i = 0; i < m; ++i) md.n_faithful_outcomes *= md.k_single;
    RefinedPVM refined = refined_pvm(fam, theta0, m);
    int dim_e = 1 << m;

    auto window = fam.search_window(theta_true);
    for (double u = window.first; u <= window.second + 5e-3; u += 1e-2)
        md.grid.push_back(std::min(u, window.second));
    // make sure theta0 itself is on the grid (feasibility anchor)
    md.grid.push_back(theta0);
    std::sort(md.grid.begin(), md.grid.end());
    int pts = static_cast<int>(md.grid.size());
    md.log_qf.resize(pts, md.k_single);
    md.log_qe.resize(pts, dim_e);
    md.model_kl.resize(pts);
    std::vector<double> qf0(md.k_single), qe0(dim_e);
    {
        Mat rho0 = fam.state(theta0);
        OutcomeDistribution d0 = distribution(mf, rho0);
        qf0 = d0.probabilities;
        qe0 = refined_probs(refined, tensor_power(rho0, m, dim_e));
    }
    for (int g = 0; g < pts; ++g) {
        double u = md.grid[g];
        Mat rho = fam.state(u);
        OutcomeDistribution df = distribution(mf, rho);
        std::vector<double> qe = refined_probs(refined, tensor_power(rho, m, dim_e));
        double d_f = classical_kl(df.probabilities, qf0);
        double d_e = classical_kl(qe, qe0);
        md.model_kl[g] = delta * m * d_f + (1.0 - delta) * d_e;
        for (int i = 0; i < md.k_single; ++i)
            md.log_qf(g, i) = std::log(std::max(df.probabilities[i], 1e-300));
        for (int w = 0; w < dim_e; ++w)
            md.log_qe(g, w) = std::log(std::max(qe[w], 1e-300));
        if (u == theta0) md.theta0_idx = g;
    }
    // sampling distributions at theta_true
    Mat rho_t = fam.state(theta_true);
    OutcomeDistribution dft = distribution(mf, rho_t);
    std::vector<double> qet = refined_probs(refined, tensor_power(rho_t, m, dim_e));
    md.alias_f = std::make_shared<AliasSampler>(dft.probabilities);
    md.alias_e = std::make_shared<AliasSampler>(qet);
    md.log_p0_f.resize(md.k_single);
    for (int i = 0; i < md.k_single; ++i)
        md.log_p0_f[i] = std::log(std::max(qf0[i], 0.0));
    md.log_p0_e.resize(dim_e);
    for (int w = 0; w < dim_e; ++w) md.log_p0_e[w] = std::log(std::max(qe0[w], 0.0));
    return md;
}

double m_adaptive_trial(const MAdaptiveModel& md, int blocks, Rng& rng) {
    // outcome ids: [0, K^m) faithful tuples, then refined outcomes
    std::map<long, long> counts;
    for (int b = 0; b < blocks; ++b) {
        if (rng.uniform() < md.delta) {
            long id = 0;
            for (int c = 0; c < md.m; ++c)
                id = id * md.k_single + static_cast<long>(md.alias_f->draw(rng));
            ++counts[id];
        } else {
            ++counts[md.n_faithful_outcomes + static_cast<long>(md.alias_e->draw(rng))];
        }
    }
    double inv_b = 1.0 / blocks;
    // budget D(p_hat || P_theta0) and the p_hat entropy term
    double neg_entropy = 0.0, cross0 = 0.0;
    bool budget_inf = false;
    for (const auto& [id, c] : counts) {
        double ph = c * inv_b;
        neg_entropy += ph * std::log(ph);
        double lp0;
        if (id < md.n_faithful_outcomes) {
            lp0 = std::log(md.delta);
            long rest = id;
            for (int c2 = 0; c2 < md.m; ++c2) {
                lp0 += md.log_p0_f[rest % md.k_single];
                rest /= md.k_single;
            }
        } else {
            lp0 = std::log1p(-md.delta) +
                  md.log_p0_e[static_cast<std::size_t>(id - md.n_faithful_outcomes)];
        }
        if (!std::isfinite(lp0)) budget_inf = true;
        cross0 += ph * lp0;
    }
    double budget = budget_inf ? kInf : neg_entropy - cross0;
    auto cross = [&](int g) {
        double s = 0.0;
        for (const auto& [id, c] : counts) {
            double lp;
            if (id < md.n_faithful_outcomes) {
                lp = std::log(md.delta);
                long rest = id;
                for (int c2 = 0; c2 < md.m; ++c2) {
                    lp += md.log_qf(g, static_cast<int>(rest % md.k_single));
                    rest /= md.k_single;
                }
            } else {
                lp = std::log1p(-md.delta) +
                     md.log_qe(g, static_cast<int>(id - md.n_faithful_outcomes));
            }
            s += c * inv_b * lp;
        }
        return s;
    };
    int best = md.theta0_idx;
    double best_obj = kInf;
    for (int g = 0; g < static_cast<int>(md.grid.size()); ++g) {
        if (md.model_kl[g] > budget + 1e-9) continue;
        double obj = neg_entropy - cross(g);
        if (obj < best_obj - 1e-15) {
            best_obj = obj;
            best = g;
        }
    }
    return md.grid[best];
}

Sampler m_adaptive_sampler(const MAdaptive& spec, const StateFamily& fam,
                           double theta_true, int n) {
    if (n < spec.m) throw config_error("m-adaptive: n smaller than the block size");
    auto model = std::make_shared<MAdaptiveModel>(
        make_m_adaptive_model(spec.theta0, spec.m, spec.delta, fam, theta_true));
    int blocks = n / spec.m;
    return [model, blocks](Rng& rng) { return m_adaptive_trial(*model, blocks, rng); };
}

Sampler make_sampler(const StrategySpec& strategy, const StateFamily* family,
                     double theta_true, int n) {
    if (std::holds_alternative<GaussianHomodyne>(strategy)) {
        double nbar = std::get<GaussianHomodyne>(strategy).nbar;
        if (!(nbar > 0.0)) throw config_error("homodyne: nbar must be positive");
        double sd = std::sqrt((2.0 * nbar + 1.0) / (4.0 * n));
        return [theta_true, sd](Rng& rng) { return theta_true + sd * rng.normal(); };
    }
    if (family == nullptr)
        throw config_error("strategy requires a state family");
    if (std::holds_alternative<FixedSLD>(strategy))
        return fixed_sld_sampler(std::get<FixedSLD>(strategy).theta0, *family,
                                 theta_true, n);
    if (std::holds_alternative<TwoStage>(strategy))
        return two_stage_sampler(std::get<TwoStage>(strategy).delta, *family,
                                 theta_true, n);
    if (std::holds_alternative<Superefficient>(strategy)) {
        double theta1 = std::get<Superefficient>(strategy).theta1;
        ExactDistribution d =
            superefficient_distribution(theta1, *family, theta_true, n);
        auto alias = std::make_shared<AliasSampler>(d.probs);
        auto values = std::make_shared<std::vector<double>>(d.values);
        return [alias, values](Rng& rng) { return (*values)[alias->draw(rng)]; };
    }
    if (std::holds_alternative<MAdaptive>(strategy))
        return m_adaptive_sampler(std::get<MAdaptive>(strategy), *family, theta_true,
                                  n);
    throw config_error("unsupported strategy/sampling combination");
}

}  // namespace

double run_m_adaptive(double theta0, int m, double delta, const StateFamily& fam,
                      double theta_true, int blocks, Rng& rng) {
    if (blocks < 1) throw config_error("m-adaptive: need at least one block");
    MAdaptiveModel md = make_m_adaptive_model(theta0, m, delta, fam, theta_true);
    return m_adaptive_trial(md, blocks, rng);
}

std::vector<TailEstimate> simulate_tail(const StrategySpec& strategy,
                                        const StateFamily* family, double theta_true,
                                        const SimulationConfig& cfg) {
    if (cfg.n_grid.empty()) throw config_error("simulate_tail: empty n grid");
    if (cfg.eps_list.empty()) throw config_error("simulate_tail: empty eps list");
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        if (cfg.n_grid[i] <= 0) throw config_error("simulate_tail: n must be positive");
        if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
            throw config_error("simulate_tail: n grid must be increasing");
    }
    for (double e : cfg.eps_list)
        if (!(e > 0.0)) throw config_error("simulate_tail: eps must be positive");
    if (cfg.trials <= 0) throw config_error("simulate_tail: trials must be positive");

    std::vector<TailEstimate> out;
    if (std::holds_alternative<GaussianNumber>(strategy)) {
        double nbar = std::get<GaussianNumber>(strategy).nbar;
        if (!(nbar > 0.0)) throw config_error("number strategy: nbar must be positive");
        if (std::abs(theta_true) > 1e-12)
            throw config_error("number strategy: deterministic path needs theta = 0");
        double q = nbar / (nbar + 1.0);
        for (std::size_t ei = 0; ei < cfg.eps_list.size(); ++ei)
            for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
                double eps = cfg.eps_list[ei];
                int n = cfg.n_grid[ni];
                double p = std::pow(q, std::ceil(n * eps * eps));
                TailEstimate t;
                t.n = n;
                t.eps = eps;
                t.trials = cfg.trials;
                t.hit_count = std::lround(p * static_cast<double>(cfg.trials));
                t.p_hat = p;
                t.wilson_lo = p;
                t.wilson_hi = p;
                t.exact = true;
                out.push_back(t);
            }
        return out;
    }
    if (std::holds_alternative<GaussianHomodyne>(strategy)) {
        // the sample mean is exactly Normal(theta, (2 nbar + 1)/(4 n)), so the
        // tail probability has a closed form; no sampling needed
        double nbar = std::get<GaussianHomodyne>(strategy).nbar;
        if (!(nbar > 0.0)) throw config_error("homodyne: nbar must be positive");
        for (std::size_t ei = 0; ei < cfg.eps_list.size(); ++ei)
            for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
                double eps = cfg.eps_list[ei];
                int n = cfg.n_grid[ni];
                double sd = std::sqrt((2.0 * nbar + 1.0) / (4.0 * n));
                double p = std::erfc(eps / (sd * std::sqrt(2.0)));
                TailEstimate t;
                t.n = n;
                t.eps = eps;
                t.trials = cfg.trials;
                t.hit_count = std::lround(p * static_cast<double>(cfg.trials));
                t.p_hat = p;
                t.wilson_lo = p;
                t.wilson_hi = p;
                t.exact = true;
                out.push_back(t);
            }
        return out;
    }

    unsigned workers = cfg.worker_hint > 0
                           ? static_cast<unsigned>(cfg.worker_hint)
                           : std::min(8u, std::max(1u, std::thread::hardware_concurrency()));
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        int n = cfg.n_grid[ni];
        Sampler sampler = make_sampler(strategy, family, theta_true, n);
        for (std::size_t ei = 0; ei < cfg.eps_list.size(); ++ei) {
            double eps = cfg.eps_list[ei];
            long total_hits = 0;
            if (workers <= 1) {
                for (long t = 0; t < cfg.trials; ++t) {
                    Rng rng = trial_rng(cfg.seed, ei, ni, static_cast<std::uint64_t>(t));
                    if (std::abs(sampler(rng) - theta_true) > eps) ++total_hits;
                }
            } else {
                std::vector<long> hits(workers, 0);
                std::vector<std::thread> pool;
                long chunk = (cfg.trials + workers - 1) / workers;
                for (unsigned w = 0; w < workers; ++w) {
                    long lo = w * chunk, hi = std::min<long>(cfg.trials, lo + chunk);
                    if (lo >= hi) break;
                    pool.emplace_back([&, lo, hi, w]() {
                        long h = 0;
                        for (long t = lo; t < hi; ++t) {
                            Rng rng = trial_rng(cfg.seed, ei, ni,
                                                static_cast<std::uint64_t>(t));
                            if (std::abs(sampler(rng) - theta_true) > eps) ++h;
                        }
                        hits[w] = h;
                    });
                }
                for (auto& th : pool) th.join();
                for (long h : hits) total_hits += h;
            }
            TailEstimate t;
            t.n = n;
            t.eps = eps;
            t.trials = cfg.trials;
            t.hit_count = total_hits;
            t.p_hat = static_cast<double>(total_hits) / static_cast<double>(cfg.trials);
            auto [lo, hi] = wilson_interval(total_hits, cfg.trials);
            t.wilson_lo = lo;
            t.wilson_hi = hi;
            out.push_back(t);
        }
    }
    // reorder to (eps major, n minor) so per-eps slices are contiguous
    std::stable_sort(out.begin(), out.end(), [](const TailEstimate& a,
                                                const TailEstimate& b) {
        if (a.eps != b.eps) return a.eps < b.eps;
        return a.n < b.n;
    });
    return out;
}

BetaFit extract_beta(const std::vector<TailEstimate>& points) {
    std::vector<double> x, y, w;
    for (const TailEstimate& t : points) {
        if (t.p_hat <= 0.0 || t.p_hat >= 1.0) continue;
        if (!t.exact && t.hit_count < 10) continue;
        x.push_back(static_cast<double>(t.n));
        y.push_back(-std::log(t.p_hat));
        double var = t.exact ? 1e-18
                             : (1.0 - t.p_hat) / static_cast<double>(t.hit_count);
        w.push_back(1.0 / std::max(var, 1e-18));
    }
    if (x.size() < 4)
        throw estimation_error("extract_beta: only " + std::to_string(x.size()) +
                               " usable grid points (need 4)");
    // weighted least squares y = a + beta x
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
        sxx += w[i] * x[i] * x[i];
        sxy += w[i] * x[i] * y[i];
    }
    double det = sw * sxx - sx * sx;
    if (det <= 0.0) throw estimation_error("extract_beta: degenerate design");
    double beta = (sw * sxy - sx * sy) / det;
    double se = std::sqrt(sw / det);
    return {beta, se};
}

double extract_alpha(const std::vector<std::pair<double, BetaFit>>& betas) {
    if (betas.size() < 3)
        throw estimation_error("extract_alpha: need at least 3 eps points");
    double num = 0.0, den = 0.0;
    for (const auto& [eps, fit] : betas) {
        double w = 1.0 / std::max(fit.stderr_ * fit.stderr_, 1e-18);
        double e2 = eps * eps;
        num += w * e2 * fit.beta;
        den += w * e2 * e2;
    }
    if (den <= 0.0) throw estimation_error("extract_alpha: degenerate fit");
    return num / den;
}

BoundTriple theoretical_bounds(const StateFamily& family, double theta, double eps) {
    Mat rho = family.state(theta);
    Mat drho = derivative(family, theta);
    double j = sld_and_fisher(rho, drho).j;
    double jt = kmb_and_fisher(rho, drho).j;
    // log rho once; D(rho' || rho) = -S(rho') - Tr rho' log rho
    Mat log_rho = spectral_apply(rho, [](double x) { return std::log(x); },
                                 KernelPolicy::skip_zero);
    auto d_to = [&](double thp) {
        Mat rp = family.state(thp);
        Spectral s = eig_hermitian(rp);
        double d = 0.0;
        for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
            double p = std::max(s.eigenvalues[i], 0.0);
            if (p > tol().kernel) d += p * std::log(p);
        }
        d -= (rp * log_rho).trace().real();
        return std::max(d, 0.0);
    };
    auto [lo, hi] = family.search_window(theta);
    auto [dom_lo, dom_hi] = family.domain();
    lo = std::max(lo, dom_lo);
    hi = std::min(hi, dom_hi);
    const double step = 1e-3;
    double inf_out = kInf, arg_out = theta;
    for (double t = lo; t <= hi + 0.5 * step; t += step) {
        double tt = std::min(t, hi);
        if (std::abs(tt - theta) < eps) continue;
        double d = d_to(tt);
        if (d < inf_out) {
            inf_out = d;
            arg_out = tt;
        }
    }
    // local refinement around the grid minimizer
    for (double fine = arg_out - step; fine <= arg_out + step; fine += step / 20.0) {
        if (fine < lo || fine > hi || std::abs(fine - theta) < eps) continue;
        inf_out = std::min(inf_out, d_to(fine));
    }
    double inf_in = kInf;
    for (int k = 1; k <= 99; ++k) {
        for (double s : {-1.0, 1.0}) {
            double tt = theta + s * eps * k / 100.0;
            if (tt < lo || tt > hi) continue;
            inf_in = std::min(inf_in, d_to(tt));
        }
    }
    return {0.5 * j, 0.5 * jt, inf_out, inf_in};
}

}  // namespace qldev
