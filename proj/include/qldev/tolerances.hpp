#pragma once

namespace qldev {

// Central numeric tolerances.  All modules read from this one record so the
// defaults can be audited (and, in tests, referenced) in a single place.
struct Tolerances {
    double hermitian = 1e-10;        // relative Hermiticity slack
    double eig_residual = 1e-11;     // reconstruction / unitarity residual
    double eig_clamp = 1e-12;        // eigenvalues in [-clamp, 0) are set to 0
    double kernel = 1e-12;           // eigenvalues <= kernel count as kernel
    double trace_one = 1e-10;        // |Tr rho - 1|
    double psd = 1e-10;              // min eigenvalue >= -psd
    double support_leak = 1e-10;     // mass allowed on the other state's kernel
    double povm_complete = 1e-9;     // ||sum M_i - I||_max
    double pvm_merge = 1e-10;        // eigenvalue merge distance for spectral PVMs
    double prob_clamp = 1e-12;       // negative probability clamp
    double kmb_degenerate = 1e-12;   // |p_i - p_j| below which the limit form is used
    double fd_step = 1e-5;           // finite-difference step scale
};

inline const Tolerances& tol() {
    static const Tolerances t{};
    return t;
}

}  // namespace qldev
