#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "qldev/families.hpp"
#include "qldev/rng.hpp"

namespace qldev {

struct FixedSLD {
    double theta0;
};
struct TwoStage {
    double delta;  // fraction of copies spent on the localizing stage
};
struct Superefficient {
    double theta1;  // favored point
};
struct MAdaptive {
    double theta0;
    int m;
    double delta;
};
struct GaussianHomodyne {
    double nbar;
};
struct GaussianNumber {
    double nbar;
};

using StrategySpec = std::variant<FixedSLD, TwoStage, Superefficient, MAdaptive,
                                  GaussianHomodyne, GaussianNumber>;

struct SimulationConfig {
    std::vector<int> n_grid;
    long trials = 10000;
    std::uint64_t seed = 0;
    std::vector<double> eps_list;
    int worker_hint = 0;  // scheduling hint only; results do not depend on it
};

struct TailEstimate {
    int n = 0;
    double eps = 0.0;
    long hit_count = 0;
    long trials = 0;
    double p_hat = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 1.0;
    bool exact = false;  // deterministic formula path (no sampling)
};

std::pair<double, double> wilson_interval(long hits, long trials);

// Monte-Carlo tail probabilities P{|T_n - theta| > eps}; sampling always uses
// the exact outcome distributions induced by the strategy's measurements.
std::vector<TailEstimate> simulate_tail(const StrategySpec& strategy,
                                        const StateFamily* family, double theta_true,
                                        const SimulationConfig& cfg);

double run_fixed_sld(double theta0, const StateFamily& family, double theta_true, int n,
                     Rng& rng);

// phi(s) = Tr rho_theta exp(s (L/J - Tr rho_theta L/J)) with L the SLD at theta_check
double mgf_phi(const StateFamily& family, double theta, double theta_check, double s);

double run_two_stage(double delta, const StateFamily& family, double theta_true, int n,
                     Rng& rng);

struct ExactDistribution {
    std::vector<double> values;
    std::vector<double> probs;
};

// full distribution of the superefficient estimate under theta_true (n <= 12)
ExactDistribution superefficient_distribution(double theta1, const StateFamily& family,
                                              double theta_true, int n);
double run_superefficient(double theta1, const StateFamily& family, double theta_true,
                          int n, Rng& rng);

double run_m_adaptive(double theta0, int m, double delta, const StateFamily& family,
                      double theta_true, int blocks, Rng& rng);

struct BetaFit {
    double beta = 0.0;
    double stderr_ = 0.0;
};

// weighted least squares of -log p_hat against n (affine model); beta = slope
BetaFit extract_beta(const std::vector<TailEstimate>& points);

// weighted fit beta = alpha * eps^2
double extract_alpha(const std::vector<std::pair<double, BetaFit>>& betas);

struct BoundTriple {
    double j_half;
    double jt_half;
    double inf_d;         // inf D(theta' || theta) over |theta - theta'| >= eps
    double inf_d_inside;  // same over 0 < |theta - theta'| < eps (printed convention)
};

BoundTriple theoretical_bounds(const StateFamily& family, double theta, double eps);

}  // namespace qldev
