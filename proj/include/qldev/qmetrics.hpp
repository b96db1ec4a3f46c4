#pragma once

#include <vector>

#include "qldev/families.hpp"
#include "qldev/linalg.hpp"

namespace qldev {

struct SldResult {
    Mat L;
    double j;
};

struct KmbResult {
    Mat L;
    double j;
    double quad_residual;  // 64-point Gauss-Legendre check of the defining integral
};

// solves (L rho + rho L)/2 = B in rho's eigenbasis; j = Tr L^2 rho
SldResult sld_and_fisher(const Mat& rho, const Mat& B);

// solves int_0^1 rho^t L rho^(1-t) dt = B; j = Tr B L
KmbResult kmb_and_fisher(const Mat& rho, const Mat& B);

// Tr(B rho^{-1} B); requires strictly positive rho
double rld_fisher(const Mat& rho, const Mat& B);

// Tr rho (log rho - log sigma); +infinity on support violation
double relative_entropy(const Mat& rho, const Mat& sigma);

// sqrt(2 (1 - F))
double bures_distance(const Mat& rho, const Mat& sigma);

// -8 log F; +infinity when F = 0
double affinity(const Mat& rho, const Mat& sigma);

struct LimitRow {
    double eps;
    double two_d_over_eps2;   // 2 D(rho_theta || rho_{theta+eps}) / eps^2 -> j_kmb
    double four_b2_over_eps2; // 4 b^2 / eps^2 -> j_sld
    double i_over_eps2;       // affinity / eps^2 -> j_sld
    double j_sld;
    double j_kmb;
};

std::vector<LimitRow> limit_table(const StateFamily& family, double theta,
                                  const std::vector<double>& eps_grid);

}  // namespace qldev
