#include <doctest.h>

#include <cmath>

#include "qldev/errors.hpp"
#include "qldev/families.hpp"
#include "qldev/linalg.hpp"

using namespace qldev;

TEST_CASE("equatorial states are valid densities with the stated entries") {
    Mat rho = equatorial_state(0.6, 0.4);
    CHECK_NOTHROW(require_density(rho));
    CHECK(rho(0, 0).real() ==
          doctest::Approx(0.5 * (1.0 + 0.6 * std::cos(0.4))).epsilon(1e-14));
    CHECK(rho(0, 1).real() == doctest::Approx(0.5 * 0.6 * std::sin(0.4)).epsilon(1e-14));
}

TEST_CASE("analytic and finite-difference derivatives agree") {
    EquatorialFamily fam(0.7);
    Mat a = fam.analytic_derivative(0.9);
    // bypass the analytic path with a central difference
    double h = 1e-6;
    Mat fd = (fam.state(0.9 + h) - fam.state(0.9 - h)) / (2.0 * h);
    CHECK(max_abs(a - fd) < 1e-8);
    CHECK(is_hermitian(derivative(fam, 0.9)));
}

TEST_CASE("equatorial closed forms") {
    auto forms = equatorial_closed_forms(0.5);
    CHECK(forms.j_sld(0.3) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(forms.j_kmb(0.3) ==
          doctest::Approx(0.25 * std::log(3.0)).epsilon(1e-14));
    double d = forms.d(0.7, 0.0);
    CHECK(d == doctest::Approx(0.25 * (1.0 - std::cos(0.7)) * std::log(3.0))
                   .epsilon(1e-14));
    // pure-state family: KMB marked infinite, SLD stays r^2
    auto pure = equatorial_closed_forms(1.0);
    CHECK(std::isinf(pure.j_kmb(0.3)));
    CHECK(pure.j_sld(0.3) == doctest::Approx(1.0));
}

TEST_CASE("displaced thermal state: geometric diagonal at theta = 0") {
    double nbar = 1.0;
    int d = 40;
    Mat rho = displaced_thermal(0.0, nbar, d);
    CHECK_NOTHROW(require_density(rho));
    double ratio = rho(1, 1).real() / rho(0, 0).real();
    CHECK(ratio == doctest::Approx(nbar / (nbar + 1.0)).epsilon(1e-10));
    CHECK(max_abs(rho - rho.diagonal().asDiagonal().toDenseMatrix()) < 1e-12);
}

TEST_CASE("displaced thermal truncation capacity check") {
    CHECK_THROWS_AS(displaced_thermal(1.0, 1.0, 4), capacity_error);
}

TEST_CASE("gaussian closed forms at nbar = 1") {
    auto forms = gaussian_closed_forms(1.0);
    CHECK(forms.j_sld(0.2) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(forms.j_kmb(0.2) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(forms.d(0.5, -0.2) ==
          doctest::Approx(std::log(2.0) * 0.49).epsilon(1e-12));
}

TEST_CASE("gaussian family displacement moves photon number, trace preserved") {
    GaussianFockFamily fam(1.0, 60);
    Mat rho = fam.state(0.7);
    CHECK_NOTHROW(require_density(rho));
    Mat drho = fam.analytic_derivative(0.7);
    CHECK(is_hermitian(drho));
    CHECK(std::abs(drho.trace()) < 1e-10);
}

namespace {
// forwards the states but hides the analytic derivative, forcing the
// finite-difference path (one-sided at the closed endpoint)
class NumericOnly : public StateFamily {
  public:
    explicit NumericOnly(const GaussianFockFamily& base) : base_(base) {}
    int dim() const override { return base_.dim(); }
    std::pair<double, double> domain() const override { return base_.domain(); }
    bool half_line() const override { return base_.half_line(); }
    Mat state(double theta) const override { return base_.state(theta); }

  private:
    const GaussianFockFamily& base_;
};
}  // namespace

TEST_CASE("half-line gaussian family uses a one-sided derivative at 0") {
    GaussianFockFamily fam(1.0, 40, 1e-10, true);
    CHECK(fam.half_line());
    NumericOnly numeric(fam);
    Mat d0 = derivative(numeric, 0.0);
    CHECK(is_hermitian(d0));
    CHECK(max_abs(d0 - fam.analytic_derivative(0.0)) < 1e-4);
}

TEST_CASE("diagonal family classical Fisher information") {
    RVec base(2), f(2);
    base << 0.6, 0.4;
    f << 0.0, 1.0;
    DiagonalFamily fam(base, f);
    // at theta = 0 this is Bernoulli(0.4); Fisher = Var(F) = p(1-p)
    CHECK(fam.classical_fisher(0.0) == doctest::Approx(0.24).epsilon(1e-12));
    Mat rho = fam.state(0.0);
    CHECK(rho(1, 1).real() == doctest::Approx(0.4).epsilon(1e-12));
    Mat drho = fam.analytic_derivative(0.0);
    CHECK(std::abs(drho.trace()) < 1e-12);
}
