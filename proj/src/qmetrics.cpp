#include "qldev/qmetrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qldev/errors.hpp"
#include "qldev/tolerances.hpp"

namespace qldev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Basis {
    Spectral s;
    Mat b;  // B rotated into rho's eigenbasis
};

Basis to_eigenbasis(const Mat& rho, const Mat& B, const char* what) {
    require_density(rho, what);
    require_hermitian(B, what);
    if (B.rows() != rho.rows())
        throw validation_error(std::string(what) + ": dimension mismatch");
    Spectral s = eig_hermitian(rho);
    Mat b = s.eigenvectors.adjoint() * B * s.eigenvectors;
    return {std::move(s), std::move(b)};
}

bool in_kernel(double p) { return p <= tol().kernel; }

void check_support(const Basis& bb, const char* what) {
    const RVec& p = bb.s.eigenvalues;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        for (Eigen::Index j = 0; j < p.size(); ++j)
            if (in_kernel(p[i]) && in_kernel(p[j]) &&
                std::abs(bb.b(i, j)) > 1e-10)
                throw support_error(std::string(what) +
                                    ": derivative not supported on support(rho)");
}

// 64-point Gauss-Legendre nodes/weights on [0,1], generated once by Newton
// iteration on the Legendre polynomial.
struct GaussLegendre {
    std::array<double, 64> x{}, w{};
    GaussLegendre() {
        const int n = 64;
        for (int i = 0; i < n / 2; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / pp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            double wi = 2.0 / ((1.0 - t * t) * pp * pp);
            x[i] = 0.5 * (1.0 - t);
            x[n - 1 - i] = 0.5 * (1.0 + t);
            w[i] = 0.5 * wi;
            w[n - 1 - i] = 0.5 * wi;
        }
    }
};

const GaussLegendre& gl64() {
    static const GaussLegendre g{};
    return g;
}

}  // namespace

SldResult sld_and_fisher(const Mat& rho, const Mat& B) {
    Basis bb = to_eigenbasis(rho, B, "sld_and_fisher");
    check_support(bb, "sld_and_fisher");
    const RVec& p = bb.s.eigenvalues;
    Eigen::Index d = p.size();
    Mat l = Mat::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            double den = std::max(p[i], 0.0) + std::max(p[j], 0.0);
            l(i, j) = den > tol().kernel ? 2.0 * bb.b(i, j) / den : 0.0;
        }
    Mat L = bb.s.eigenvectors * l * bb.s.eigenvectors.adjoint();
    L = 0.5 * (L + L.adjoint());
    double j = (L * L * rho).trace().real();
    return {std::move(L), j};
}

KmbResult kmb_and_fisher(const Mat& rho, const Mat& B) {
    Basis bb = to_eigenbasis(rho, B, "kmb_and_fisher");
    check_support(bb, "kmb_and_fisher");
    const RVec& p = bb.s.eigenvalues;
    Eigen::Index d = p.size();
    Mat l = Mat::Zero(d, d);
    bool infinite = false;  // derivative moves mass across the kernel boundary
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            double pi = std::max(p[i], 0.0), pj = std::max(p[j], 0.0);
            if (in_kernel(pi) && in_kernel(pj)) continue;
            if (in_kernel(pi) || in_kernel(pj)) {
                // the defining integral vanishes on these entries, so any
                // off-support derivative mass makes the KMB metric blow up
                if (std::abs(bb.b(i, j)) > 1e-10) infinite = true;
                l(i, j) = 0.0;
            } else if (std::abs(pi - pj) <= tol().kmb_degenerate) {
                l(i, j) = bb.b(i, j) / pi;
            } else {
                l(i, j) = bb.b(i, j) * (std::log(pi) - std::log(pj)) / (pi - pj);
            }
        }
    // Gauss-Legendre verification of int rho^t L rho^(1-t) dt = B (eigenbasis)
    Mat quad = Mat::Zero(d, d);
    const auto& g = gl64();
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            double pi = std::max(p[i], 0.0), pj = std::max(p[j], 0.0);
            if (in_kernel(pi) && in_kernel(pj)) continue;
            double acc = 0.0;
            for (int k = 0; k < 64; ++k)
                acc += g.w[k] * std::pow(pi, g.x[k]) * std::pow(pj, 1.0 - g.x[k]);
            quad(i, j) = acc * l(i, j);
        }
    double residual = infinite ? kInf : max_abs(quad - bb.b);
    Mat L = bb.s.eigenvectors * l * bb.s.eigenvectors.adjoint();
    L = 0.5 * (L + L.adjoint());
    double j = infinite ? kInf : (B * L).trace().real();
    return {std::move(L), j, residual};
}

double rld_fisher(const Mat& rho, const Mat& B) {
    require_density(rho, "rld_fisher");
    require_hermitian(B, "rld_fisher");
    Spectral s = eig_hermitian(rho);
    if (s.eigenvalues.minCoeff() < 1e-10)
        throw rank_error("rld_fisher: rho is singular (min eigenvalue " +
                         std::to_string(s.eigenvalues.minCoeff()) + ")");
    Mat inv = spectral_apply(rho, [](double x) { return 1.0 / x; });
    return (B * inv * B).trace().real();
}

double relative_entropy(const Mat& rho, const Mat& sigma) {
    require_density(rho, "relative_entropy: rho");
    require_density(sigma, "relative_entropy: sigma");
    if (rho.rows() != sigma.rows())
        throw validation_error("relative_entropy: dimension mismatch");
    // eigenvalues below the resolvable floor are indistinguishable from the
    // kernel at double precision; a fixed absolute cutoff would misclassify
    // the genuinely tiny tail eigenvalues of truncated full-rank states
    Spectral ss = eig_hermitian(sigma);
    double floor = static_cast<double>(ss.eigenvalues.size()) *
                   std::numeric_limits<double>::epsilon() *
                   std::max(ss.eigenvalues.maxCoeff(), 0.0);
    Mat rot = ss.eigenvectors.adjoint() * rho * ss.eigenvectors;
    double leak = 0.0, tr_rho_log_sigma = 0.0;
    for (Eigen::Index i = 0; i < ss.eigenvalues.size(); ++i) {
        double ev = ss.eigenvalues[i];
        double mass = std::max(rot(i, i).real(), 0.0);
        if (ev <= floor)
            leak += mass;
        else
            tr_rho_log_sigma += mass * std::log(ev);
    }
    // declare a support violation only when the mass below the floor could
    // shift D by more than ~1e-6 nats; smaller leaks are truncation tails of
    // full-rank states, not genuine kernel mass
    if (leak * std::abs(std::log(std::max(floor, 1e-300))) > 1e-6) return kInf;
    Spectral rs = eig_hermitian(rho);
    double tr_rho_log_rho = 0.0;
    for (Eigen::Index i = 0; i < rs.eigenvalues.size(); ++i) {
        double p = rs.eigenvalues[i];
        if (p > floor) tr_rho_log_rho += p * std::log(p);
    }
    return std::max(tr_rho_log_rho - tr_rho_log_sigma, 0.0);
}

double bures_distance(const Mat& rho, const Mat& sigma) {
    double f = std::min(trace_norm_product(rho, sigma), 1.0);
    return std::sqrt(std::max(2.0 * (1.0 - f), 0.0));
}

double affinity(const Mat& rho, const Mat& sigma) {
    double f = std::min(trace_norm_product(rho, sigma), 1.0);
    if (f <= 0.0) return kInf;
    return std::max(-8.0 * std::log(f), 0.0);
}

std::vector<LimitRow> limit_table(const StateFamily& family, double theta,
                                  const std::vector<double>& eps_grid) {
    auto [lo, hi] = family.domain();
    Mat rho = family.state(theta);
    Mat drho = derivative(family, theta);
    auto [l_sld, j_sld] = sld_and_fisher(rho, drho);
    KmbResult kmb = kmb_and_fisher(rho, drho);
    std::vector<LimitRow> rows;
    rows.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        if (!(eps > 0.0)) throw domain_error("limit_table: eps must be positive");
        if (theta + eps > hi || theta - eps < lo)
            throw domain_error("limit_table: theta +- eps leaves the domain");
        Mat rho_p = family.state(theta + eps);
        double d = relative_entropy(rho, rho_p);
        double b = bures_distance(rho, rho_p);
        double i = affinity(rho, rho_p);
        rows.push_back({eps, 2.0 * d / (eps * eps), 4.0 * b * b / (eps * eps),
                        i / (eps * eps), j_sld, kmb.j});
    }
    return rows;
}

}  // namespace qldev
