#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

namespace qldev {

// Exponential family on a finite outcome set:
// p_theta(w) = p(w) exp(theta . F(w) - psi(theta))
struct ExponentialFamily {
    Eigen::VectorXd base;  // positive base weights p(w)
    Eigen::MatrixXd stats; // |Omega| x d statistic matrix F

    int d() const { return static_cast<int>(stats.cols()); }
    int outcomes() const { return static_cast<int>(stats.rows()); }
};

ExponentialFamily make_expfam(Eigen::VectorXd base, Eigen::MatrixXd stats);

// log-partition psi(theta) and mean parameters eta(theta)
std::pair<double, Eigen::VectorXd> potential_and_mean(const ExponentialFamily& fam,
                                                      const Eigen::VectorXd& theta);

Eigen::VectorXd probabilities(const ExponentialFamily& fam, const Eigen::VectorXd& theta);

// D(theta || theta0) = (theta - theta0) . eta(theta) + psi(theta0) - psi(theta)
double kl(const ExponentialFamily& fam, const Eigen::VectorXd& theta,
          const Eigen::VectorXd& theta0);

// damped Newton moment matching eta(theta) = means
Eigen::VectorXd mle(const ExponentialFamily& fam, const Eigen::VectorXd& means);

enum class Side { geq, leq };

// Cramer rate of the event {mean of F_i side a} under p_theta0
double cramer_rate(const ExponentialFamily& fam, const Eigen::VectorXd& theta0, int i,
                   double a, Side side);

struct CurvedFamily {
    ExponentialFamily ambient;
    std::function<Eigen::VectorXd(double)> embedding;  // u -> natural parameters
    double u_lo = 0.0;
    double u_hi = 1.0;
};

// argmin_{u} { D(x||u) : D(u||theta0) <= D(x||theta0) }, two-stage grid;
// smallest optimal parameter on ties
double projection_estimator(const CurvedFamily& curved, const Eigen::VectorXd& x,
                            double theta0);

double binary_entropy(double x);

}  // namespace qldev
