#pragma once

#include <json.hpp>
#include <utility>
#include <vector>

#include "qldev/families.hpp"
#include "qldev/linalg.hpp"

namespace qldev {

struct POVM {
    int dim = 0;
    std::vector<Mat> elements;   // Hermitian PSD, summing to identity
    std::vector<double> values;  // real outcome labels, same length
};

void validate_povm(const POVM& m);
// PVM check: POVM invariants plus M_i M_j = delta_ij M_i
bool is_pvm(const POVM& m);
void require_pvm(const POVM& m, const char* what = "PVM");
// w(E): maximal element rank
int max_rank(const POVM& m);

struct OutcomeDistribution {
    std::vector<double> probabilities;
    std::vector<double> values;
};

// eigenspace projectors, eigenvalues merged within 1e-10
POVM spectral_pvm(const Mat& x);

OutcomeDistribution distribution(const POVM& m, const Mat& rho);

// (|sum x_i Tr(drho M_i) - 1|, |sum x_i Tr(rho M_i) - theta0|)
std::pair<double, double> local_unbiasedness_residuals(const POVM& m,
                                                       const StateFamily& family,
                                                       double theta0);

// sum_i E_i rho E_i
Mat pinching(const POVM& e, const Mat& rho);

POVM disjoint_random_combination(const POVM& m1, const POVM& m2, double lambda);

// uniform disjoint combination of the spectral PVMs of a traceless Hermitian
// basis (generalized Gell-Mann); injective on states
POVM faithful_povm(int k);

struct InducedClassical {
    double fisher;
    double kl;
    double hellinger_affinity;
};

InducedClassical induced_classical_quantities(const POVM& m, const StateFamily& family,
                                              double theta, double theta_prime);

// KL divergence of the product distribution of per-copy POVMs, without
// building the tensor space
double separable_kl_decomposition(const std::vector<POVM>& per_copy_povms, double theta,
                                  double theta_prime, const StateFamily& family);

// classical KL with support conventions (0 log 0 = 0; p > 0, q = 0 -> +inf)
double classical_kl(const std::vector<double>& p, const std::vector<double>& q);

void to_json(nlohmann::json& j, const POVM& m);
void from_json(const nlohmann::json& j, POVM& m);

}  // namespace qldev
