#include "qldev/families.hpp"

#include <cmath>
#include <string>

#include "qldev/errors.hpp"
#include "qldev/tolerances.hpp"

namespace qldev {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Mat StateFamily::analytic_derivative(double) const {
    throw validation_error("family has no analytic derivative");
}

std::pair<double, double> StateFamily::search_window(double theta) const {
    auto [lo, hi] = domain();
    return {std::max(lo, theta - M_PI), std::min(hi, theta + M_PI)};
}

Mat derivative(const StateFamily& family, double theta) {
    auto [lo, hi] = family.domain();
    if (theta < lo || theta > hi)
        throw domain_error("derivative: theta outside parameter domain");
    if (family.has_analytic_derivative()) {
        Mat d = family.analytic_derivative(theta);
        return 0.5 * (d + d.adjoint());
    }
    double h = tol().fd_step * std::max(1.0, std::abs(theta));
    Mat d;
    if (family.half_line() && theta - h < lo) {
        // one-sided second-order stencil at the closed boundary
        d = (-3.0 * family.state(theta) + 4.0 * family.state(theta + h) -
             family.state(theta + 2 * h)) /
            (2.0 * h);
    } else {
        if (theta - h < lo || theta + h > hi)
            throw domain_error("derivative: theta too close to an open boundary");
        d = (family.state(theta + h) - family.state(theta - h)) / (2.0 * h);
    }
    return 0.5 * (d + d.adjoint());
}

Mat equatorial_state(double r, double theta) {
    if (!(r > 0.0) || r > 1.0)
        throw domain_error("equatorial_state: r must lie in (0, 1]");
    Mat rho(2, 2);
    rho << 0.5 * (1.0 + r * std::cos(theta)), 0.5 * r * std::sin(theta),
        0.5 * r * std::sin(theta), 0.5 * (1.0 - r * std::cos(theta));
    return rho;
}

ClosedFormTriple equatorial_closed_forms(double r) {
    if (!(r > 0.0) || r > 1.0)
        throw domain_error("equatorial_closed_forms: r must lie in (0, 1]");
    ClosedFormTriple t;
    if (r < 1.0) {
        double lr = std::log((1.0 + r) / (1.0 - r));
        t.d = [r, lr](double th, double th0) {
            return 0.5 * r * (1.0 - std::cos(th - th0)) * lr;
        };
        t.j_kmb = [r, lr](double) { return 0.5 * r * lr; };
    } else {
        t.d = [](double th, double th0) { return th == th0 ? 0.0 : kInf; };
        t.j_kmb = [](double) { return kInf; };
    }
    t.j_sld = [r](double) { return r * r; };
    return t;
}

EquatorialFamily::EquatorialFamily(double r) : r_(r) {
    if (!(r > 0.0) || r > 1.0)
        throw domain_error("EquatorialFamily: r must lie in (0, 1]");
}

Mat EquatorialFamily::analytic_derivative(double theta) const {
    Mat d(2, 2);
    d << -0.5 * r_ * std::sin(theta), 0.5 * r_ * std::cos(theta),
        0.5 * r_ * std::cos(theta), 0.5 * r_ * std::sin(theta);
    return d;
}

namespace {

Mat lowering_operator(int d) {
    Mat a = Mat::Zero(d, d);
    for (int k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

// tail mass of the displaced thermal state beyond the truncation
double truncation_tail(double theta, double nbar, int d) {
    double q = nbar / (nbar + 1.0);
    return std::pow(q, d) * std::exp(theta * theta);
}

int suggested_trunc(double theta, double nbar, double tail_tol) {
    double q = nbar / (nbar + 1.0);
    double need = (std::log(tail_tol) - theta * theta) / std::log(q);
    return static_cast<int>(std::ceil(need)) + 1;
}

}  // namespace

Mat displaced_thermal(double theta, double nbar, int d, double tail_tol) {
    if (!(nbar > 0.0)) throw domain_error("displaced_thermal: nbar must be positive");
    if (d < 2) throw domain_error("displaced_thermal: truncation too small");
    if (truncation_tail(theta, nbar, d) > tail_tol)
        throw capacity_error("displaced_thermal: truncation " + std::to_string(d) +
                             " insufficient, suggest d >= " +
                             std::to_string(suggested_trunc(theta, nbar, tail_tol)));
    double q = nbar / (nbar + 1.0);
    Mat rho = Mat::Zero(d, d);
    double w = 1.0 / (nbar + 1.0);
    for (int k = 0; k < d; ++k) {
        rho(k, k) = w;
        w *= q;
    }
    // renormalize the geometric tail so the truncated state has unit trace
    rho /= rho.trace().real();
    if (theta == 0.0) return rho;
    // U = exp(theta (a^dag - a)) via the Hermitian generator K = i(a - a^dag)
    Mat a = lowering_operator(d);
    Mat k_op = std::complex<double>(0.0, 1.0) * (a - a.adjoint());
    Spectral s = eig_hermitian(k_op);
    CVec phase(d);
    for (int i = 0; i < d; ++i)
        phase[i] = std::exp(std::complex<double>(0.0, theta * s.eigenvalues[i]));
    Mat u = s.eigenvectors * phase.asDiagonal() * s.eigenvectors.adjoint();
    Mat out = u * rho * u.adjoint();
    return 0.5 * (out + out.adjoint());
}

ClosedFormTriple gaussian_closed_forms(double nbar) {
    if (!(nbar > 0.0)) throw domain_error("gaussian_closed_forms: nbar must be positive");
    double l = std::log(1.0 + 1.0 / nbar);
    ClosedFormTriple t;
    t.d = [l](double th, double th0) { return l * (th - th0) * (th - th0); };
    t.j_kmb = [l](double) { return 2.0 * l; };
    t.j_sld = [nbar](double) { return 2.0 / (nbar + 0.5); };
    return t;
}

GaussianFockFamily::GaussianFockFamily(double nbar, int trunc_dim, double tail_tol,
                                       bool half_line_domain)
    : nbar_(nbar), trunc_(trunc_dim), tail_tol_(tail_tol), half_line_(half_line_domain) {
    if (!(nbar > 0.0)) throw domain_error("GaussianFockFamily: nbar must be positive");
    if (trunc_dim < 2) throw domain_error("GaussianFockFamily: truncation too small");
}

std::pair<double, double> GaussianFockFamily::domain() const {
    if (half_line_) return {0.0, kInf};
    return {-kInf, kInf};
}

Mat GaussianFockFamily::state(double theta) const {
    return displaced_thermal(theta, nbar_, trunc_, tail_tol_);
}

Mat GaussianFockFamily::analytic_derivative(double theta) const {
    // d rho / d theta = [a^dag - a, rho]
    Mat a = lowering_operator(trunc_);
    Mat g = a.adjoint() - a;
    Mat rho = state(theta);
    Mat d = g * rho - rho * g;
    return 0.5 * (d + d.adjoint());
}

DiagonalFamily::DiagonalFamily(RVec base_weights, RVec statistic)
    : base_(std::move(base_weights)), f_(std::move(statistic)) {
    if (base_.size() != f_.size() || base_.size() < 2)
        throw validation_error("DiagonalFamily: base/statistic size mismatch");
    if (base_.minCoeff() <= 0.0)
        throw validation_error("DiagonalFamily: base weights must be positive");
}

RVec DiagonalFamily::probs(double theta) const {
    RVec logw = (theta * f_).array() + base_.array().log();
    double m = logw.maxCoeff();
    RVec w = (logw.array() - m).exp();
    return w / w.sum();
}

Mat DiagonalFamily::state(double theta) const {
    return probs(theta).cast<std::complex<double>>().asDiagonal();
}

Mat DiagonalFamily::analytic_derivative(double theta) const {
    RVec p = probs(theta);
    double mean = p.dot(f_);
    RVec d = p.array() * (f_.array() - mean);
    return d.cast<std::complex<double>>().asDiagonal();
}

double DiagonalFamily::classical_fisher(double theta) const {
    RVec p = probs(theta);
    double mean = p.dot(f_);
    return (p.array() * (f_.array() - mean).square()).sum();
}

}  // namespace qldev
