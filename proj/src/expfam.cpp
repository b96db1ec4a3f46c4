#include "qldev/expfam.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qldev/errors.hpp"

namespace qldev {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ExponentialFamily make_expfam(Eigen::VectorXd base, Eigen::MatrixXd stats) {
    if (base.size() != stats.rows() || base.size() < 2 || stats.cols() < 1)
        throw validation_error("expfam: base/statistics shape mismatch");
    if (base.minCoeff() <= 0.0)
        throw validation_error("expfam: base weights must be positive");
    ExponentialFamily fam{std::move(base), std::move(stats)};
    // affine independence: Gram matrix of centered statistics must be nonsingular
    Eigen::VectorXd p = fam.base / fam.base.sum();
    Eigen::RowVectorXd mean = p.transpose() * fam.stats;
    Eigen::MatrixXd centered = fam.stats.rowwise() - mean;
    Eigen::MatrixXd gram = centered.transpose() * p.asDiagonal() * centered;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (lo <= 1e-12 * std::max(hi, 1.0))
        throw validation_error("expfam: statistics affinely dependent (condition " +
                               std::to_string(hi / std::max(lo, 1e-300)) + ")");
    return fam;
}

std::pair<double, Eigen::VectorXd> potential_and_mean(const ExponentialFamily& fam,
                                                      const Eigen::VectorXd& theta) {
    if (theta.size() != fam.d()) throw validation_error("expfam: parameter dimension");
    Eigen::VectorXd logw = fam.stats * theta + fam.base.array().log().matrix();
    double m = logw.maxCoeff();
    Eigen::VectorXd w = (logw.array() - m).exp();
    double z = w.sum();
    double psi = m + std::log(z);
    Eigen::VectorXd eta = fam.stats.transpose() * (w / z);
    return {psi, eta};
}

Eigen::VectorXd probabilities(const ExponentialFamily& fam, const Eigen::VectorXd& theta) {
    Eigen::VectorXd logw = fam.stats * theta + fam.base.array().log().matrix();
    double m = logw.maxCoeff();
    Eigen::VectorXd w = (logw.array() - m).exp();
    return w / w.sum();
}

double kl(const ExponentialFamily& fam, const Eigen::VectorXd& theta,
          const Eigen::VectorXd& theta0) {
    auto [psi, eta] = potential_and_mean(fam, theta);
    auto [psi0, eta0] = potential_and_mean(fam, theta0);
    (void)eta0;
    double d = (theta - theta0).dot(eta) + psi0 - psi;
    return std::max(d, 0.0);
}

namespace {

Eigen::MatrixXd covariance(const ExponentialFamily& fam, const Eigen::VectorXd& theta) {
    Eigen::VectorXd p = probabilities(fam, theta);
    Eigen::RowVectorXd mean = p.transpose() * fam.stats;
    Eigen::MatrixXd centered = fam.stats.rowwise() - mean;
    return centered.transpose() * p.asDiagonal() * centered;
}

}  // namespace

Eigen::VectorXd mle(const ExponentialFamily& fam, const Eigen::VectorXd& means) {
    if (means.size() != fam.d()) throw validation_error("mle: mean dimension");
    for (int i = 0; i < fam.d(); ++i) {
        double lo = fam.stats.col(i).minCoeff(), hi = fam.stats.col(i).maxCoeff();
        if (means[i] <= lo || means[i] >= hi)
            throw boundary_error("mle: mean " + std::to_string(means[i]) +
                                 " for statistic " + std::to_string(i) +
                                 " outside the open hull interval");
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(fam.d());
    auto [psi, eta] = potential_and_mean(fam, theta);
    (void)psi;
    double resid = (eta - means).norm();
    for (int it = 0; it < 200 && resid > 1e-12; ++it) {
        Eigen::MatrixXd cov = covariance(fam, theta);
        Eigen::VectorXd step = cov.ldlt().solve(means - eta);
        double scale = 1.0;
        for (int half = 0; half < 60; ++half) {
            Eigen::VectorXd cand = theta + scale * step;
            auto [cpsi, ceta] = potential_and_mean(fam, cand);
            (void)cpsi;
            double cresid = (ceta - means).norm();
            if (cresid < resid) {
                theta = cand;
                eta = ceta;
                resid = cresid;
                break;
            }
            scale *= 0.5;
        }
        if (scale < 1e-17) break;
    }
    if (resid > 1e-10)
        throw boundary_error("mle: no interior solution (residual " +
                             std::to_string(resid) + "), mean too close to hull boundary");
    return theta;
}

double cramer_rate(const ExponentialFamily& fam, const Eigen::VectorXd& theta0, int i,
                   double a, Side side) {
    if (i < 0 || i >= fam.d()) throw validation_error("cramer_rate: bad statistic index");
    double fmin = fam.stats.col(i).minCoeff(), fmax = fam.stats.col(i).maxCoeff();
    auto [psi0, eta0] = potential_and_mean(fam, theta0);
    double sgn = side == Side::geq ? 1.0 : -1.0;
    if (sgn * (a - eta0[i]) <= 0.0) return 0.0;  // halfspace contains the mean
    if (side == Side::geq && a > fmax) return kInf;
    if (side == Side::leq && a < fmin) return kInf;
    Eigen::VectorXd p0 = probabilities(fam, theta0);
    double extreme = side == Side::geq ? fmax : fmin;
    if (std::abs(a - extreme) <= 1e-12 * (1.0 + std::abs(extreme))) {
        double mass = 0.0;
        for (int w = 0; w < fam.outcomes(); ++w)
            if (std::abs(fam.stats(w, i) - extreme) <= 1e-12 * (1.0 + std::abs(extreme)))
                mass += p0[w];
        return -std::log(mass);
    }
    // solve eta_i(theta0 + t e_i) = a by bisection on the monotone tilt
    auto eta_i = [&](double t) {
        Eigen::VectorXd th = theta0;
        th[i] += t;
        return potential_and_mean(fam, th).second[i];
    };
    double lo = 0.0, hi = sgn;
    while (sgn * (eta_i(hi) - a) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (std::abs(hi) > 1e6)
            throw estimation_error("cramer_rate: tilt search diverged");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (sgn * (eta_i(mid) - a) < 0.0 ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    Eigen::VectorXd th = theta0;
    th[i] += t;
    return std::max(t * a - (potential_and_mean(fam, th).first - psi0), 0.0);
}

double projection_estimator(const CurvedFamily& curved, const Eigen::VectorXd& x,
                            double theta0) {
    const ExponentialFamily& fam = curved.ambient;
    Eigen::VectorXd emb0 = curved.embedding(theta0);
    double budget = kl(fam, x, emb0) + 1e-9;
    auto scan = [&](double lo, double hi, double step) {
        double best_u = std::numeric_limits<double>::quiet_NaN();
        double best = kInf;
        for (double u = lo; u <= hi + 0.5 * step; u += step) {
            double uu = std::min(u, hi);
            Eigen::VectorXd e = curved.embedding(uu);
            if (kl(fam, e, emb0) > budget) continue;
            double obj = kl(fam, x, e);
            if (obj < best - 1e-15) {
                best = obj;
                best_u = uu;
            }
        }
        return std::pair{best_u, best};
    };
    auto [coarse_u, coarse_obj] = scan(curved.u_lo, curved.u_hi, 1e-2);
    if (!std::isfinite(coarse_obj))
        throw feasibility_error("projection_estimator: empty feasible set on grid");
    double lo = std::max(curved.u_lo, coarse_u - 1e-2);
    double hi = std::min(curved.u_hi, coarse_u + 1e-2);
    auto [fine_u, fine_obj] = scan(lo, hi, 1e-5);
    (void)fine_obj;
    return fine_u;
}

double binary_entropy(double x) {
    if (x < 0.0 || x > 1.0) throw domain_error("binary_entropy: argument outside [0,1]");
    double h = 0.0;
    if (x > 0.0) h -= x * std::log(x);
    if (x < 1.0) h -= (1.0 - x) * std::log(1.0 - x);
    return h;
}

}  // namespace qldev
