#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <utility>

#include "qldev/linalg.hpp"

namespace qldev {

// One-parameter curve theta -> rho_theta with derivative access.
class StateFamily {
  public:
    virtual ~StateFamily() = default;
    virtual int dim() const = 0;
    // closed parameter interval (may be +-inf); half_line() marks a closed
    // left endpoint where differentiation falls back to a one-sided stencil
    virtual std::pair<double, double> domain() const {
        return {-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    }
    virtual bool half_line() const { return false; }
    virtual Mat state(double theta) const = 0;
    virtual bool has_analytic_derivative() const { return false; }
    virtual Mat analytic_derivative(double /*theta*/) const;
    // window scanned by grid minimizations (theoretical bounds, MLE search)
    virtual std::pair<double, double> search_window(double theta) const;
};

Mat derivative(const StateFamily& family, double theta);

struct ClosedFormTriple {
    std::function<double(double, double)> d;  // (theta, theta0) -> divergence
    std::function<double(double)> j_sld;
    std::function<double(double)> j_kmb;
};

// rho_theta = (1/2)[[1 + r cos th, r sin th], [r sin th, 1 - r cos th]]
Mat equatorial_state(double r, double theta);
ClosedFormTriple equatorial_closed_forms(double r);

// Displaced thermal state in a d-dimensional Fock truncation.
Mat displaced_thermal(double theta, double nbar, int d, double tail_tol = 1e-10);
ClosedFormTriple gaussian_closed_forms(double nbar);

class EquatorialFamily : public StateFamily {
  public:
    explicit EquatorialFamily(double r);
    int dim() const override { return 2; }
    Mat state(double theta) const override { return equatorial_state(r_, theta); }
    bool has_analytic_derivative() const override { return true; }
    Mat analytic_derivative(double theta) const override;
    std::pair<double, double> search_window(double theta) const override {
        return {theta - M_PI, theta + M_PI};
    }
    double r() const { return r_; }

  private:
    double r_;
};

class GaussianFockFamily : public StateFamily {
  public:
    GaussianFockFamily(double nbar, int trunc_dim, double tail_tol = 1e-10,
                       bool half_line_domain = false);
    int dim() const override { return trunc_; }
    std::pair<double, double> domain() const override;
    bool half_line() const override { return half_line_; }
    Mat state(double theta) const override;
    bool has_analytic_derivative() const override { return true; }
    Mat analytic_derivative(double theta) const override;
    std::pair<double, double> search_window(double theta) const override {
        double lo = theta - 2.0, hi = theta + 2.0;
        if (half_line_ && lo < 0.0) lo = 0.0;
        return {lo, hi};
    }
    double nbar() const { return nbar_; }
    int trunc_dim() const { return trunc_; }

  private:
    double nbar_;
    int trunc_;
    double tail_tol_;
    bool half_line_;
};

// Diagonal embedding of a classical one-parameter exponential family
// p_theta(k) proportional to base_k * exp(theta * F_k).
class DiagonalFamily : public StateFamily {
  public:
    DiagonalFamily(RVec base_weights, RVec statistic);
    int dim() const override { return static_cast<int>(base_.size()); }
    Mat state(double theta) const override;
    bool has_analytic_derivative() const override { return true; }
    Mat analytic_derivative(double theta) const override;
    std::pair<double, double> search_window(double theta) const override {
        return {theta - 3.0, theta + 3.0};
    }
    double classical_fisher(double theta) const;

  private:
    RVec probs(double theta) const;
    RVec base_, f_;
};

}  // namespace qldev
