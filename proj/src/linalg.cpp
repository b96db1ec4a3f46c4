#include "qldev/linalg.hpp"

#include <cmath>
#include <string>

#include "qldev/errors.hpp"
#include "qldev/tolerances.hpp"

namespace qldev {

double max_abs(const Mat& A) { return A.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Mat& A) {
    if (A.rows() != A.cols() || A.rows() == 0) return false;
    if (!A.allFinite()) return false;
    double scale = 1.0 + max_abs(A);
    return max_abs(A - A.adjoint()) <= tol().hermitian * scale;
}

void require_hermitian(const Mat& A, const char* what) {
    if (A.rows() != A.cols() || A.rows() == 0)
        throw validation_error(std::string(what) + ": not square");
    if (!A.allFinite())
        throw validation_error(std::string(what) + ": non-finite entries");
    double scale = 1.0 + max_abs(A);
    double dev = max_abs(A - A.adjoint());
    if (dev > tol().hermitian * scale)
        throw validation_error(std::string(what) + ": Hermiticity deviation " +
                               std::to_string(dev));
}

void require_density(const Mat& rho, const char* what) {
    require_hermitian(rho, what);
    double tr_dev = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
    if (tr_dev > tol().trace_one)
        throw validation_error(std::string(what) + ": trace deviates from 1 by " +
                               std::to_string(tr_dev));
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()),
                                          Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol().psd)
        throw validation_error(std::string(what) + ": negative eigenvalue " +
                               std::to_string(es.eigenvalues().minCoeff()));
}

Spectral eig_hermitian(const Mat& A) {
    require_hermitian(A);
    Mat H = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    if (es.info() != Eigen::Success)
        throw validation_error("eig_hermitian: eigensolver failed");
    Spectral s{es.eigenvalues(), es.eigenvectors()};
    double scale = 1.0 + max_abs(A);
    Mat rebuilt = s.eigenvectors * s.eigenvalues.asDiagonal().toDenseMatrix().cast<std::complex<double>>() *
                  s.eigenvectors.adjoint();
    if (max_abs(rebuilt - H) > tol().eig_residual * scale)
        throw validation_error("eig_hermitian: reconstruction residual too large");
    Mat gram = s.eigenvectors.adjoint() * s.eigenvectors;
    gram -= Mat::Identity(A.rows(), A.cols());
    if (max_abs(gram) > tol().eig_residual)
        throw validation_error("eig_hermitian: eigenvectors not unitary");
    return s;
}

Mat spectral_apply(const Mat& A, const std::function<double(double)>& f,
                   KernelPolicy policy) {
    Spectral s = eig_hermitian(A);
    RVec fv(s.eigenvalues.size());
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        double ev = s.eigenvalues[i];
        if (ev < 0.0 && ev >= -tol().eig_clamp) ev = 0.0;
        bool kernel = std::abs(ev) <= tol().kernel;
        if (kernel && policy == KernelPolicy::skip_zero) {
            fv[i] = 0.0;
            continue;
        }
        double y = f(ev);
        if (!std::isfinite(y))
            throw domain_error("spectral_apply: f not finite at eigenvalue " +
                               std::to_string(ev));
        fv[i] = y;
    }
    Mat out = s.eigenvectors * fv.asDiagonal().toDenseMatrix().cast<std::complex<double>>() *
              s.eigenvectors.adjoint();
    return 0.5 * (out + out.adjoint());
}

double trace_norm_product(const Mat& rho, const Mat& sigma) {
    require_density(rho, "trace_norm_product: rho");
    require_density(sigma, "trace_norm_product: sigma");
    Mat sq = spectral_apply(rho, [](double x) { return std::sqrt(std::max(x, 0.0)); },
                            KernelPolicy::skip_zero);
    Mat inner = sq * sigma * sq;
    Spectral s = eig_hermitian(0.5 * (inner + inner.adjoint()));
    double f = 0.0;
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
        f += std::sqrt(std::max(s.eigenvalues[i], 0.0));
    return f;
}

Mat kron(const Mat& A, const Mat& B) {
    Mat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

Mat tensor_power(const Mat& rho, int n, int max_dim) {
    if (n < 1) throw validation_error("tensor_power: n must be positive");
    double dims = std::pow(static_cast<double>(rho.rows()), n);
    if (dims > static_cast<double>(max_dim))
        throw capacity_error("tensor_power: dimension " + std::to_string(dims) +
                             " exceeds maximum " + std::to_string(max_dim));
    Mat out = rho;
    for (int i = 1; i < n; ++i) out = kron(out, rho);
    return out;
}

}  // namespace qldev
