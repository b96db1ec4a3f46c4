#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "qldev/estimation.hpp"
#include "qldev/expfam.hpp"
#include "qldev/families.hpp"
#include "qldev/linalg.hpp"
#include "qldev/measurement.hpp"
#include "qldev/qmetrics.hpp"
#include "qldev/repdecomp.hpp"

namespace py = pybind11;
using namespace qldev;

namespace {

std::unique_ptr<StateFamily> build_family(const std::string& name, double r,
                                          double nbar, int trunc) {
    if (name == "equatorial") return std::make_unique<EquatorialFamily>(r);
    if (name == "gaussian") return std::make_unique<GaussianFockFamily>(nbar, trunc);
    throw validation_error("unknown family: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "quantum Fisher information and large-deviation estimation core";

    // translators run newest-first: register the base before the subclass so
    // capacity errors surface as CapacityError rather than the generic type
    py::register_exception<error>(m, "QldevError");
    py::register_exception<capacity_error>(m, "CapacityError");

    m.def("equatorial_state", &equatorial_state, py::arg("r"), py::arg("theta"));
    m.def("displaced_thermal", &displaced_thermal, py::arg("theta"), py::arg("nbar"),
          py::arg("dim"), py::arg("tail_tol") = 1e-10);

    m.def(
        "sld_fisher",
        [](const Mat& rho, const Mat& drho) {
            SldResult s = sld_and_fisher(rho, drho);
            return py::make_tuple(s.j, s.L);
        },
        py::arg("rho"), py::arg("drho"),
        "returns (J, L) for the symmetrized logarithmic derivative");
    m.def(
        "kmb_fisher",
        [](const Mat& rho, const Mat& drho) {
            KmbResult k = kmb_and_fisher(rho, drho);
            return py::make_tuple(k.j, k.L);
        },
        py::arg("rho"), py::arg("drho"));
    m.def("rld_fisher", &rld_fisher, py::arg("rho"), py::arg("drho"));
    m.def("relative_entropy", &relative_entropy, py::arg("rho"), py::arg("sigma"));
    m.def("bures_distance", &bures_distance, py::arg("rho"), py::arg("sigma"));
    m.def("affinity", &affinity, py::arg("rho"), py::arg("sigma"));
    m.def("fidelity", &trace_norm_product, py::arg("rho"), py::arg("sigma"));

    m.def(
        "limit_table",
        [](const std::string& family, double r, double nbar, int trunc, double theta,
           const std::vector<double>& eps) {
            auto fam = build_family(family, r, nbar, trunc);
            auto rows = limit_table(*fam, theta, eps);
            py::list out;
            for (const auto& row : rows) {
                py::dict d;
                d["eps"] = row.eps;
                d["two_d_over_eps2"] = row.two_d_over_eps2;
                d["four_b2_over_eps2"] = row.four_b2_over_eps2;
                d["i_over_eps2"] = row.i_over_eps2;
                d["j_sld"] = row.j_sld;
                d["j_kmb"] = row.j_kmb;
                out.append(d);
            }
            return out;
        },
        py::arg("family"), py::arg("r"), py::arg("nbar"), py::arg("trunc"),
        py::arg("theta"), py::arg("eps"));

    m.def(
        "sandwich_kl",
        [](double r, double theta0, double theta1, int m) {
            EquatorialFamily fam(r);
            return sandwich_kl(fam, theta0, theta1, m);
        },
        py::arg("r"), py::arg("theta0"), py::arg("theta1"), py::arg("m"));

    m.def(
        "theoretical_bounds",
        [](const std::string& family, double r, double nbar, int trunc, double theta,
           double eps) {
            auto fam = build_family(family, r, nbar, trunc);
            BoundTriple b = theoretical_bounds(*fam, theta, eps);
            py::dict d;
            d["j_half"] = b.j_half;
            d["jt_half"] = b.jt_half;
            d["inf_d"] = b.inf_d;
            d["inf_d_inside"] = b.inf_d_inside;
            return d;
        },
        py::arg("family"), py::arg("r"), py::arg("nbar"), py::arg("trunc"),
        py::arg("theta"), py::arg("eps"));

    m.def(
        "simulate_tail",
        [](const std::string& strategy, const std::string& family, double r,
           double nbar, int trunc, double theta_true, double theta0, double theta1,
           double delta, int madapt_m, const std::vector<int>& n_grid,
           const std::vector<double>& eps_list, long trials, std::uint64_t seed,
           int workers) {
            StrategySpec spec = FixedSLD{theta0};
            if (strategy == "two-stage") spec = TwoStage{delta};
            else if (strategy == "superefficient") spec = Superefficient{theta1};
            else if (strategy == "m-adaptive") spec = MAdaptive{theta0, madapt_m, delta};
            else if (strategy == "gaussian-homodyne") spec = GaussianHomodyne{nbar};
            else if (strategy == "gaussian-number") spec = GaussianNumber{nbar};
            else if (strategy != "fixed-sld")
                throw validation_error("unknown strategy: " + strategy);
            std::unique_ptr<StateFamily> fam;
            if (strategy.rfind("gaussian", 0) != 0)
                fam = build_family(family, r, nbar, trunc);
            SimulationConfig cfg;
            cfg.n_grid = n_grid;
            cfg.eps_list = eps_list;
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.worker_hint = workers;
            auto tails = simulate_tail(spec, fam.get(), theta_true, cfg);
            py::list out;
            for (const auto& t : tails) {
                py::dict d;
                d["n"] = t.n;
                d["eps"] = t.eps;
                d["hits"] = t.hit_count;
                d["trials"] = t.trials;
                d["p_hat"] = t.p_hat;
                d["wilson_lo"] = t.wilson_lo;
                d["wilson_hi"] = t.wilson_hi;
                d["exact"] = t.exact;
                out.append(d);
            }
            return out;
        },
        py::arg("strategy"), py::arg("family") = "equatorial", py::arg("r") = 0.5,
        py::arg("nbar") = 1.0, py::arg("trunc") = 60, py::arg("theta_true") = 0.0,
        py::arg("theta0") = 0.0, py::arg("theta1") = 0.0, py::arg("delta") = 0.25,
        py::arg("m") = 1, py::arg("n_grid") = std::vector<int>{100, 200, 300, 400},
        py::arg("eps_list") = std::vector<double>{0.5}, py::arg("trials") = 10000L,
        py::arg("seed") = std::uint64_t{1}, py::arg("workers") = 0);

    m.def(
        "cramer_rate",
        [](const std::vector<double>& probs, double a, const std::string& side) {
            int k = static_cast<int>(probs.size());
            Eigen::VectorXd base(k);
            Eigen::MatrixXd stats(k, 1);
            for (int i = 0; i < k; ++i) {
                base[i] = probs[i];
                stats(i, 0) = i;
            }
            ExponentialFamily fam = make_expfam(base, stats);
            return cramer_rate(fam, Eigen::VectorXd::Zero(1), 0, a,
                               side == "leq" ? Side::leq : Side::geq);
        },
        py::arg("probs"), py::arg("a"), py::arg("side") = "geq");
}
