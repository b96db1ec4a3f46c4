#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace qldev {

using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

// max |A_ij| over all entries
double max_abs(const Mat& A);

bool is_hermitian(const Mat& A);
void require_hermitian(const Mat& A, const char* what = "operator");
// Hermitian PSD, trace one (within tolerances)
void require_density(const Mat& rho, const char* what = "density matrix");

struct Spectral {
    RVec eigenvalues;  // ascending
    Mat eigenvectors;  // columns, unitary
};

Spectral eig_hermitian(const Mat& A);

enum class KernelPolicy {
    error_on_kernel,  // f must be finite on every retained eigenvalue
    skip_zero,        // f(0) := 0 on kernel eigenvalues (support-restricted calculus)
};

// U f(L) U^dag with eigenvalues in [-1e-12, 0) clamped to 0 first.
Mat spectral_apply(const Mat& A, const std::function<double(double)>& f,
                   KernelPolicy policy = KernelPolicy::error_on_kernel);

// F = Tr|sqrt(rho) sqrt(sigma)| = Tr sqrt(sqrt(rho) sigma sqrt(rho))
double trace_norm_product(const Mat& rho, const Mat& sigma);

Mat kron(const Mat& A, const Mat& B);
Mat tensor_power(const Mat& rho, int n, int max_dim = 4096);

}  // namespace qldev
