#include "qldev/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qldev/errors.hpp"
#include "qldev/qmetrics.hpp"
#include "qldev/tolerances.hpp"

namespace qldev {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void validate_povm(const POVM& m) {
    if (m.dim <= 0) throw validation_error("POVM: nonpositive dimension");
    if (m.elements.empty()) throw validation_error("POVM: no elements");
    if (m.elements.size() != m.values.size())
        throw validation_error("POVM: element/value count mismatch");
    Mat sum = Mat::Zero(m.dim, m.dim);
    for (const Mat& e : m.elements) {
        if (e.rows() != m.dim || e.cols() != m.dim)
            throw validation_error("POVM: element dimension mismatch");
        require_hermitian(e, "POVM element");
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (e + e.adjoint()),
                                              Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol().psd)
            throw validation_error("POVM: element not PSD");
        sum += e;
    }
    sum -= Mat::Identity(m.dim, m.dim);
    if (max_abs(sum) > tol().povm_complete)
        throw validation_error("POVM: completeness residual " +
                               std::to_string(max_abs(sum)));
}

bool is_pvm(const POVM& m) {
    for (std::size_t i = 0; i < m.elements.size(); ++i)
        for (std::size_t j = 0; j < m.elements.size(); ++j) {
            Mat prod = m.elements[i] * m.elements[j];
            if (i == j) prod -= m.elements[i];
            if (max_abs(prod) > 1e-9) return false;
        }
    return true;
}

void require_pvm(const POVM& m, const char* what) {
    validate_povm(m);
    if (!is_pvm(m)) throw validation_error(std::string(what) + ": not projective");
}

int max_rank(const POVM& m) {
    int w = 0;
    for (const Mat& e : m.elements) {
        int r = static_cast<int>(std::lround(e.trace().real()));
        w = std::max(w, r);
    }
    return w;
}

POVM spectral_pvm(const Mat& x) {
    Spectral s = eig_hermitian(x);
    POVM out;
    out.dim = static_cast<int>(x.rows());
    Eigen::Index i = 0;
    while (i < s.eigenvalues.size()) {
        Eigen::Index j = i;
        while (j + 1 < s.eigenvalues.size() &&
               s.eigenvalues[j + 1] - s.eigenvalues[i] <= tol().pvm_merge)
            ++j;
        Mat block = s.eigenvectors.middleCols(i, j - i + 1);
        out.elements.push_back(block * block.adjoint());
        double v = s.eigenvalues.segment(i, j - i + 1).mean();
        out.values.push_back(v);
        i = j + 1;
    }
    return out;
}

OutcomeDistribution distribution(const POVM& m, const Mat& rho) {
    if (rho.rows() != m.dim)
        throw validation_error("distribution: dimension mismatch");
    OutcomeDistribution d;
    d.values = m.values;
    d.probabilities.reserve(m.elements.size());
    double total = 0.0;
    for (const Mat& e : m.elements) {
        double p = (rho * e).trace().real();
        if (p < -1e-9) throw validation_error("distribution: negative probability");
        p = std::max(p, 0.0);
        d.probabilities.push_back(p);
        total += p;
    }
    if (std::abs(total - 1.0) > tol().povm_complete)
        throw validation_error("distribution: probabilities sum to " +
                               std::to_string(total));
    for (double& p : d.probabilities) p /= total;
    return d;
}

std::pair<double, double> local_unbiasedness_residuals(const POVM& m,
                                                       const StateFamily& family,
                                                       double theta0) {
    Mat rho = family.state(theta0);
    Mat drho = derivative(family, theta0);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < m.elements.size(); ++i) {
        s1 += m.values[i] * (drho * m.elements[i]).trace().real();
        s2 += m.values[i] * (rho * m.elements[i]).trace().real();
    }
    return {std::abs(s1 - 1.0), std::abs(s2 - theta0)};
}

Mat pinching(const POVM& e, const Mat& rho) {
    if (rho.rows() != e.dim) throw validation_error("pinching: dimension mismatch");
    Mat out = Mat::Zero(e.dim, e.dim);
    for (const Mat& p : e.elements) out += p * rho * p;
    return 0.5 * (out + out.adjoint());
}

POVM disjoint_random_combination(const POVM& m1, const POVM& m2, double lambda) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw domain_error("disjoint_random_combination: lambda outside (0,1)");
    if (m1.dim != m2.dim)
        throw validation_error("disjoint_random_combination: dimension mismatch");
    POVM out;
    out.dim = m1.dim;
    for (std::size_t i = 0; i < m1.elements.size(); ++i) {
        out.elements.push_back(lambda * m1.elements[i]);
        out.values.push_back(m1.values[i]);
    }
    for (std::size_t i = 0; i < m2.elements.size(); ++i) {
        out.elements.push_back((1.0 - lambda) * m2.elements[i]);
        out.values.push_back(m2.values[i]);
    }
    return out;
}

namespace {

// generalized Gell-Mann basis of traceless Hermitian matrices on C^k
std::vector<Mat> traceless_hermitian_basis(int k) {
    std::vector<Mat> basis;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            Mat x = Mat::Zero(k, k);
            x(i, j) = 1.0;
            x(j, i) = 1.0;
            basis.push_back(x);
            Mat y = Mat::Zero(k, k);
            y(i, j) = std::complex<double>(0.0, -1.0);
            y(j, i) = std::complex<double>(0.0, 1.0);
            basis.push_back(y);
        }
    for (int l = 1; l < k; ++l) {
        Mat z = Mat::Zero(k, k);
        double norm = std::sqrt(2.0 / (l * (l + 1.0)));
        for (int i = 0; i < l; ++i) z(i, i) = norm;
        z(l, l) = -norm * l;
        basis.push_back(z);
    }
    return basis;
}

}  // namespace

POVM faithful_povm(int k) {
    if (k < 2) throw domain_error("faithful_povm: k must be at least 2");
    std::vector<Mat> basis = traceless_hermitian_basis(k);
    double lambda = 1.0 / static_cast<double>(basis.size());
    POVM out;
    out.dim = k;
    double label = 0.0;
    for (const Mat& x : basis) {
        POVM e = spectral_pvm(x);
        for (std::size_t i = 0; i < e.elements.size(); ++i) {
            out.elements.push_back(lambda * e.elements[i]);
            out.values.push_back(label);
            label += 1.0;
        }
    }
    return out;
}

double classical_kl(const std::vector<double>& p, const std::vector<double>& q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return kInf;
        d += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(d, 0.0);
}

InducedClassical induced_classical_quantities(const POVM& m, const StateFamily& family,
                                              double theta, double theta_prime) {
    Mat rho = family.state(theta);
    Mat drho = derivative(family, theta);
    Mat rho_p = family.state(theta_prime);
    double fisher = 0.0;
    std::vector<double> p, q;
    double bc = 0.0;  // Bhattacharyya coefficient
    for (const Mat& e : m.elements) {
        double pi = std::max((rho * e).trace().real(), 0.0);
        double qi = std::max((rho_p * e).trace().real(), 0.0);
        double dpi = (drho * e).trace().real();
        if (pi > tol().kernel) fisher += dpi * dpi / pi;
        p.push_back(pi);
        q.push_back(qi);
        bc += std::sqrt(pi * qi);
    }
    double kl = classical_kl(p, q);
    double aff = bc <= 0.0 ? kInf : std::max(-8.0 * std::log(std::min(bc, 1.0)), 0.0);
    return {fisher, kl, aff};
}

double separable_kl_decomposition(const std::vector<POVM>& per_copy_povms, double theta,
                                  double theta_prime, const StateFamily& family) {
    Mat rho = family.state(theta);
    Mat rho_p = family.state(theta_prime);
    double total = 0.0;
    for (const POVM& m : per_copy_povms) {
        std::vector<double> p, q;
        for (const Mat& e : m.elements) {
            p.push_back(std::max((rho * e).trace().real(), 0.0));
            q.push_back(std::max((rho_p * e).trace().real(), 0.0));
        }
        total += classical_kl(p, q);
    }
    return total;
}

void to_json(nlohmann::json& j, const POVM& m) {
    j = nlohmann::json{{"dim", m.dim}, {"values", m.values}};
    std::vector<std::vector<double>> elems;
    for (const Mat& e : m.elements) {
        std::vector<double> flat;
        flat.reserve(2 * m.dim * m.dim);
        for (int r = 0; r < m.dim; ++r)
            for (int c = 0; c < m.dim; ++c) {
                flat.push_back(e(r, c).real());
                flat.push_back(e(r, c).imag());
            }
        elems.push_back(std::move(flat));
    }
    j["elements"] = elems;
}

void from_json(const nlohmann::json& j, POVM& m) {
    m.dim = j.at("dim").get<int>();
    m.values = j.at("values").get<std::vector<double>>();
    m.elements.clear();
    for (const auto& flat : j.at("elements")) {
        auto v = flat.get<std::vector<double>>();
        if (static_cast<int>(v.size()) != 2 * m.dim * m.dim)
            throw validation_error("POVM JSON: element size mismatch");
        Mat e(m.dim, m.dim);
        std::size_t idx = 0;
        for (int r = 0; r < m.dim; ++r)
            for (int c = 0; c < m.dim; ++c) {
                e(r, c) = std::complex<double>(v[idx], v[idx + 1]);
                idx += 2;
            }
        m.elements.push_back(std::move(e));
    }
    validate_povm(m);
}

}  // namespace qldev
