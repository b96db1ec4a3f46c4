#pragma once

#include <utility>
#include <vector>

#include "qldev/families.hpp"
#include "qldev/linalg.hpp"
#include "qldev/measurement.hpp"

namespace qldev {

// One total-spin block of the n-qubit irreducible decomposition.
struct IrrepBlock {
    double j;      // total spin
    int m_idx;     // multiplicity index within equal-j blocks
    Mat basis;     // 2^n x (2j+1) orthonormal columns
};

struct IrrepPVM {
    int n = 0;
    std::vector<IrrepBlock> blocks;

    Mat projector(std::size_t block) const;
    int max_dim() const;  // w(E)
    POVM as_povm() const;
};

// cached decomposition via sequential Clebsch-Gordan coupling, 2 <= n <= 12
const IrrepPVM& qubit_irrep_pvm(int n);

// rank-one refinement E^n_theta: joint eigenbasis of the blocks and rho_theta^(x n)
struct RefinedPVM {
    int n = 0;
    double base_theta = 0.0;
    Mat vectors;                // 2^n columns, orthonormal
    std::vector<int> block_of;  // irrep block index per column
};

RefinedPVM refine_with_state(const IrrepPVM& e, const StateFamily& family, double theta);

// convenience: refined PVM for m copies (m >= 1; m = 1 is the trivial block)
RefinedPVM refined_pvm(const StateFamily& family, double theta, int m);

// outcome probabilities of the refined PVM on an n-copy state
std::vector<double> refined_probs(const RefinedPVM& e, const Mat& rho_n);

// D^{E^m_theta1}(theta0 || theta1); satisfies
// m D - log(m+1) <= value <= m D for qubit families
double sandwich_kl(const StateFamily& family, double theta0, double theta1, int m);

// D(rho || pinching_F(rho)) for a fine PVM refining a coarse one that
// commutes with rho; bounded by log w(E_coarse)
double pinching_loss(const POVM& e_coarse, const POVM& f_fine, const Mat& rho);

// min eigenvalue of w(E) * pinching_M(rho) - rho (>= 0 up to tolerance)
double operator_dominance_check(const POVM& e_coarse, const POVM& m_fine, const Mat& rho);

// Chernoff-style tail bounds (b1, b2) for the refined-PVM log-likelihood events
std::pair<double, double> lemma8_bounds(const StateFamily& family, double theta0,
                                        double theta1, double theta2, double delta,
                                        int n);

// disjoint random combination of the m-fold product faithful POVM and the
// refined PVM E^m_theta0, ratio delta : 1-delta
POVM madaptive_block_povm(const StateFamily& family, double theta0, int m, double delta);

}  // namespace qldev
