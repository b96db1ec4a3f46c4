#include "qldev/repdecomp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "qldev/errors.hpp"
#include "qldev/qmetrics.hpp"
#include "qldev/tolerances.hpp"

namespace qldev {

Mat IrrepPVM::projector(std::size_t block) const {
    const Mat& b = blocks.at(block).basis;
    return b * b.adjoint();
}

int IrrepPVM::max_dim() const {
    int w = 0;
    for (const auto& b : blocks) w = std::max(w, static_cast<int>(b.basis.cols()));
    return w;
}

POVM IrrepPVM::as_povm() const {
    POVM out;
    out.dim = 1 << n;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        out.elements.push_back(projector(i));
        out.values.push_back(static_cast<double>(i));
    }
    return out;
}

namespace {

// sequential Clebsch-Gordan coupling, left-to-right tree; columns of each
// basis are ordered by magnetic quantum number m = j, j-1, ..., -j
IrrepPVM build_irrep(int n) {
    struct Work {
        int two_j;
        Mat basis;
    };
    std::vector<Work> blocks;
    Mat seed(2, 2);
    seed << 1, 0, 0, 1;
    blocks.push_back({1, seed});
    for (int t = 2; t <= n; ++t) {
        std::vector<Work> next;
        for (const Work& w : blocks) {
            int two_j = w.two_j;
            Eigen::Index old_dim = w.basis.rows();
            auto old_col = [&](int two_m) { return w.basis.col((two_j - two_m) / 2); };
            auto lift = [&](const CVec& v, int qubit) {
                CVec out = CVec::Zero(2 * old_dim);
                for (Eigen::Index i = 0; i < old_dim; ++i) out[2 * i + qubit] = v[i];
                return out;
            };
            // j + 1/2
            {
                Mat up(2 * old_dim, two_j + 2);
                for (int c = 0; c <= two_j + 1; ++c) {
                    int two_m = two_j + 1 - 2 * c;  // 2m for the coupled column
                    double ca = std::sqrt((two_j + two_m + 1) / (2.0 * (two_j + 1)));
                    double cb = std::sqrt((two_j - two_m + 1) / (2.0 * (two_j + 1)));
                    CVec v = CVec::Zero(2 * old_dim);
                    if (two_m - 1 >= -two_j) v += ca * lift(old_col(two_m - 1), 0);
                    if (two_m + 1 <= two_j) v += cb * lift(old_col(two_m + 1), 1);
                    up.col(c) = v;
                }
                next.push_back({two_j + 1, std::move(up)});
            }
            // j - 1/2
            if (two_j >= 1) {
                Mat dn(2 * old_dim, two_j);
                for (int c = 0; c <= two_j - 1; ++c) {
                    int two_m = two_j - 1 - 2 * c;
                    double ca = std::sqrt((two_j - two_m + 1) / (2.0 * (two_j + 1)));
                    double cb = std::sqrt((two_j + two_m + 1) / (2.0 * (two_j + 1)));
                    CVec v = -ca * lift(old_col(two_m - 1), 0) +
                             cb * lift(old_col(two_m + 1), 1);
                    dn.col(c) = v;
                }
                next.push_back({two_j - 1, std::move(dn)});
            }
        }
        blocks = std::move(next);
    }
    IrrepPVM out;
    out.n = n;
    std::map<int, int> mult;
    for (Work& w : blocks) {
        IrrepBlock b;
        b.j = 0.5 * w.two_j;
        b.m_idx = mult[w.two_j]++;
        b.basis = std::move(w.basis);
        out.blocks.push_back(std::move(b));
    }
    return out;
}

const IrrepPVM& irrep_cached(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<IrrepPVM>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<IrrepPVM>(build_irrep(n))).first;
    return *it->second;
}

}  // namespace

const IrrepPVM& qubit_irrep_pvm(int n) {
    if (n < 2 || n > 12)
        throw capacity_error("qubit_irrep_pvm: n must lie in [2, 12], got " +
                             std::to_string(n));
    return irrep_cached(n);
}

namespace {

// deterministic eigenvector normalization: first coordinate of magnitude
// above tolerance is made real positive
void fix_phase(Mat& u) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
            std::complex<double> z = u(r, c);
            if (std::abs(z) > 1e-9) {
                u.col(c) *= std::conj(z) / std::abs(z);
                break;
            }
        }
    }
}

bool lex_less(const CVec& a, const CVec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
}

}  // namespace

RefinedPVM refine_with_state(const IrrepPVM& e, const StateFamily& family, double theta) {
    if (family.dim() != 2)
        throw validation_error("refine_with_state: qubit families only");
    int full = 1 << e.n;
    Mat rho_n = tensor_power(family.state(theta), e.n, full);
    RefinedPVM out;
    out.n = e.n;
    out.base_theta = theta;
    out.vectors = Mat(full, full);
    out.block_of.resize(full);
    int col = 0;
    for (std::size_t bi = 0; bi < e.blocks.size(); ++bi) {
        const Mat& basis = e.blocks[bi].basis;
        Mat m = basis.adjoint() * rho_n * basis;
        Spectral s = eig_hermitian(0.5 * (m + m.adjoint()));
        Mat u = s.eigenvectors;
        fix_phase(u);
        // deterministic order inside (numerically) degenerate clusters
        std::vector<int> order(u.cols());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            double da = s.eigenvalues[a], db = s.eigenvalues[b];
            if (std::abs(da - db) > 1e-12) return da < db;
            return lex_less(u.col(a), u.col(b));
        });
        for (int idx : order) {
            out.vectors.col(col) = basis * u.col(idx);
            out.block_of[col] = static_cast<int>(bi);
            ++col;
        }
    }
    if (col != full)
        throw structure_error("refine_with_state: block dimensions do not sum to 2^n");
    return out;
}

RefinedPVM refined_pvm(const StateFamily& family, double theta, int m) {
    if (m < 1 || m > 12) throw capacity_error("refined_pvm: m must lie in [1, 12]");
    return refine_with_state(irrep_cached(m), family, theta);
}

std::vector<double> refined_probs(const RefinedPVM& e, const Mat& rho_n) {
    if (rho_n.rows() != e.vectors.rows())
        throw validation_error("refined_probs: dimension mismatch");
    std::vector<double> p(e.vectors.cols());
    for (Eigen::Index c = 0; c < e.vectors.cols(); ++c) {
        std::complex<double> v = e.vectors.col(c).dot(rho_n * e.vectors.col(c));
        p[static_cast<std::size_t>(c)] = std::max(v.real(), 0.0);
    }
    return p;
}

double sandwich_kl(const StateFamily& family, double theta0, double theta1, int m) {
    if (family.dim() != 2) throw validation_error("sandwich_kl: qubit families only");
    if (m < 1 || m > 10)
        throw capacity_error("sandwich_kl: m must lie in [1, 10]");
    // m = 1 uses the trivial single-block decomposition
    const IrrepPVM& e = irrep_cached(m);
    RefinedPVM refined = refine_with_state(e, family, theta1);
    Mat rho0 = tensor_power(family.state(theta0), m, 1 << m);
    Mat rho1 = tensor_power(family.state(theta1), m, 1 << m);
    return classical_kl(refined_probs(refined, rho0), refined_probs(refined, rho1));
}

namespace {

// partition check: each fine element must live inside exactly one coarse one
void require_refinement(const POVM& coarse, const POVM& fine, const char* what) {
    require_pvm(coarse, what);
    require_pvm(fine, what);
    if (coarse.dim != fine.dim)
        throw validation_error(std::string(what) + ": dimension mismatch");
    std::vector<Mat> sums(coarse.elements.size(),
                          Mat::Zero(coarse.dim, coarse.dim));
    for (const Mat& f : fine.elements) {
        bool placed = false;
        for (std::size_t i = 0; i < coarse.elements.size(); ++i) {
            if (max_abs(coarse.elements[i] * f - f) <= 1e-8) {
                sums[i] += f;
                placed = true;
                break;
            }
        }
        if (!placed)
            throw structure_error(std::string(what) +
                                  ": fine element crosses coarse blocks");
    }
    for (std::size_t i = 0; i < coarse.elements.size(); ++i)
        if (max_abs(sums[i] - coarse.elements[i]) > 1e-8)
            throw structure_error(std::string(what) +
                                  ": fine elements do not resolve a coarse block");
}

void require_commutes(const POVM& e, const Mat& rho, const char* what) {
    for (const Mat& p : e.elements)
        if (max_abs(p * rho - rho * p) > 1e-8)
            throw structure_error(std::string(what) +
                                  ": state does not commute with the coarse PVM");
}

}  // namespace

double pinching_loss(const POVM& e_coarse, const POVM& f_fine, const Mat& rho) {
    require_refinement(e_coarse, f_fine, "pinching_loss");
    require_density(rho, "pinching_loss");
    require_commutes(e_coarse, rho, "pinching_loss");
    return relative_entropy(rho, pinching(f_fine, rho));
}

double operator_dominance_check(const POVM& e_coarse, const POVM& m_fine,
                                const Mat& rho) {
    require_refinement(e_coarse, m_fine, "operator_dominance_check");
    require_density(rho, "operator_dominance_check");
    require_commutes(e_coarse, rho, "operator_dominance_check");
    double w = static_cast<double>(max_rank(e_coarse));
    Mat gap = w * pinching(m_fine, rho) - rho;
    return eig_hermitian(0.5 * (gap + gap.adjoint())).eigenvalues.minCoeff();
}

namespace {

// golden-section maximization of a concave function on [lo, hi]
double maximize_concave(const std::function<double(double)>& f, double lo, double hi) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return std::max({f(0.5 * (a + b)), f(lo), f(hi)});
}

}  // namespace

std::pair<double, double> lemma8_bounds(const StateFamily& family, double theta0,
                                        double theta1, double theta2, double delta,
                                        int n) {
    if (family.dim() != 2) throw validation_error("lemma8_bounds: qubit families only");
    if (!(delta > 0.0)) throw domain_error("lemma8_bounds: delta must be positive");
    const int k = 2;
    Mat rho0 = family.state(theta0);
    Mat rho1 = family.state(theta1);
    Mat rho2 = family.state(theta2);
    auto moments = [&](const Mat& sigma) {
        Spectral s = eig_hermitian(sigma);
        Mat rot = s.eigenvectors.adjoint() * rho0 * s.eigenvectors;
        RVec diag(s.eigenvalues.size());
        for (Eigen::Index i = 0; i < diag.size(); ++i) diag[i] = rot(i, i).real();
        return std::pair{s.eigenvalues, diag};
    };
    auto [p2, d2] = moments(rho2);
    if (p2.minCoeff() <= tol().kernel)
        throw rank_error("lemma8_bounds: rho_theta2 must be full rank");
    double c2 = 0.0;
    for (Eigen::Index i = 0; i < p2.size(); ++i) c2 += d2[i] * std::log(p2[i]);
    double penalty = (k + 1) * std::log(n + 1.0) / n;
    auto g1 = [&](double t) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < p2.size(); ++i)
            acc += d2[i] * std::pow(p2[i], -t);
        return (delta - c2) * t - t * penalty - std::log(acc);
    };
    double sup1 = std::max(maximize_concave(g1, 0.0, 1.0), 0.0);

    auto [p1, d1] = moments(rho1);
    if (p1.minCoeff() <= tol().kernel)
        throw rank_error("lemma8_bounds: rho_theta1 must be full rank");
    double c1 = 0.0;
    for (Eigen::Index i = 0; i < p1.size(); ++i) c1 += d1[i] * std::log(p1[i]);
    auto g2 = [&](double t) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < p1.size(); ++i)
            acc += d1[i] * std::pow(p1[i], t);
        return (delta + c1) * t - std::log(acc);
    };
    double sup2 = std::max(maximize_concave(g2, 0.0, 50.0), 0.0);
    return {std::exp(-n * sup1), std::exp(-n * sup2)};
}

POVM madaptive_block_povm(const StateFamily& family, double theta0, int m,
                          double delta) {
    if (family.dim() != 2)
        throw validation_error("madaptive_block_povm: qubit families only");
    if (m < 1 || m > 8) throw capacity_error("madaptive_block_povm: m must lie in [1, 8]");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw domain_error("madaptive_block_povm: delta outside (0,1)");
    POVM single = faithful_povm(2);
    std::size_t outcomes = 1;
    for (int i = 0; i < m; ++i) outcomes *= single.elements.size();
    std::size_t dim = std::size_t(1) << m;
    if (outcomes * dim * dim > (std::size_t(1) << 25))
        throw capacity_error("madaptive_block_povm: product POVM too large to "
                             "materialize at m = " + std::to_string(m));
    // m-fold product of the faithful POVM
    std::vector<Mat> prod{Mat::Ones(1, 1)};
    for (int c = 0; c < m; ++c) {
        std::vector<Mat> next;
        next.reserve(prod.size() * single.elements.size());
        for (const Mat& a : prod)
            for (const Mat& b : single.elements) next.push_back(kron(a, b));
        prod = std::move(next);
    }
    POVM product;
    product.dim = static_cast<int>(dim);
    product.elements = std::move(prod);
    for (std::size_t i = 0; i < product.elements.size(); ++i)
        product.values.push_back(static_cast<double>(i));

    const IrrepPVM& e = irrep_cached(m);
    RefinedPVM refined = refine_with_state(e, family, theta0);
    POVM fine;
    fine.dim = static_cast<int>(dim);
    for (Eigen::Index c = 0; c < refined.vectors.cols(); ++c) {
        fine.elements.push_back(refined.vectors.col(c) *
                                refined.vectors.col(c).adjoint());
        fine.values.push_back(static_cast<double>(c));
    }
    return disjoint_random_combination(product, fine, delta);
}

}  // namespace qldev
