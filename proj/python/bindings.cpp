#include "vgtree/errors.hpp"
#include "vgtree/estimation.hpp"
#include "vgtree/lattice.hpp"
#include "vgtree/pide_fd.hpp"
#include "vgtree/reference.hpp"
#include "vgtree/vg_model.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace vgtree;

namespace {

OptionSpec make_spec(double spot, double strike, double maturity, const std::string& type, const std::string& style) {
    OptionSpec s;
    s.spot = spot;
    s.strike = strike;
    s.maturity = maturity;
    if (type == "call") {
        s.type = OptionType::Call;
    } else if (type == "put") {
        s.type = OptionType::Put;
    } else {
        throw DomainError("type must be 'call' or 'put'");
    }
    if (style == "european" || style == "eu") {
        s.style = ExerciseStyle::European;
    } else if (style == "american" || style == "am") {
        s.style = ExerciseStyle::American;
    } else {
        throw DomainError("style must be 'european' or 'american'");
    }
    return s;
}

VgParams make_params(double theta, double sigma, double kappa, double r) { return {theta, sigma, kappa, r}; }

} // namespace

PYBIND11_MODULE(vgtree, m) {
    m.doc() = "Variance-Gamma option pricing: pentanomial lattice, explicit FD scheme, quadrature oracle, fitting";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<UnsupportedError>(m, "UnsupportedError", error.ptr());
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", error.ptr());
    py::register_exception<NegativeProbabilityError>(m, "NegativeProbabilityError", numerical.ptr());
    py::register_exception<InstabilityError>(m, "InstabilityError", numerical.ptr());
    py::register_exception<NotVgFittableError>(m, "NotVgFittableError", domain.ptr());

    py::class_<VgParams>(m, "VgParams")
        .def(py::init(&make_params), py::arg("theta"), py::arg("sigma"), py::arg("kappa"), py::arg("r") = 0.0)
        .def_readwrite("theta", &VgParams::theta)
        .def_readwrite("sigma", &VgParams::sigma)
        .def_readwrite("kappa", &VgParams::kappa)
        .def_readwrite("r", &VgParams::r)
        .def("validate", &VgParams::validate)
        .def("__repr__", [](const VgParams& p) {
            return "VgParams(theta=" + std::to_string(p.theta) + ", sigma=" + std::to_string(p.sigma) +
                   ", kappa=" + std::to_string(p.kappa) + ", r=" + std::to_string(p.r) + ")";
        });

    py::class_<Cumulants>(m, "Cumulants")
        .def_readonly("c1", &Cumulants::c1)
        .def_readonly("c2", &Cumulants::c2)
        .def_readonly("c3", &Cumulants::c3)
        .def_readonly("c4", &Cumulants::c4)
        .def_readonly("t", &Cumulants::t);

    m.def("cumulants", &cumulants, py::arg("params"), py::arg("t"));
    m.def("martingale_correction", &martingale_correction, py::arg("params"));
    m.def("levy_density", &levy_density, py::arg("params"), py::arg("x"));
    m.def("characteristic_function", &characteristic_function, py::arg("params"), py::arg("u"), py::arg("t"));
    m.def("pdf", &pdf, py::arg("params"), py::arg("t"), py::arg("x"));
    m.def("bessel_k", &bessel_k, py::arg("nu"), py::arg("x"));
    m.def("log_bessel_k", &log_bessel_k, py::arg("nu"), py::arg("x"));
    m.def(
        "skew_kurt",
        [](const Cumulants& c) {
            const SkewKurt sk = skew_kurt(c);
            return py::make_tuple(sk.skewness, sk.excess_kurtosis);
        },
        py::arg("cumulants"), "(skewness, excess kurtosis)");

    m.def(
        "transition_probabilities",
        [](const VgParams& p, double dt) {
            const ProbVector v = transition_probabilities(cumulants(p, dt));
            return std::vector<double>(v.p.begin(), v.p.end());
        },
        py::arg("params"), py::arg("dt"), "Branch weights for jumps (4, 2, 0, -2, -4) * alpha over one step dt.");

    m.def(
        "price_lattice",
        [](double spot, double strike, double maturity, const std::string& type, const std::string& style,
           const VgParams& params, int steps) {
            const LatticeResult r =
                price_lattice_detailed(make_spec(spot, strike, maturity, type, style), params, {steps, 0.0});
            py::dict d;
            d["price"] = r.price;
            d["omega"] = r.omega;
            d["dt"] = r.dt;
            d["alpha"] = r.step.alpha;
            d["u"] = r.step.u;
            d["d"] = r.step.d;
            d["probabilities"] = std::vector<double>(r.probabilities.p.begin(), r.probabilities.p.end());
            return d;
        },
        py::arg("spot"), py::arg("strike"), py::arg("maturity"), py::arg("type"), py::arg("style"), py::arg("params"),
        py::arg("steps") = 2000, "Pentanomial lattice price with step metadata.");

    m.def(
        "price_fd",
        [](double spot, double strike, double maturity, const std::string& type, const std::string& style,
           const VgParams& params, int steps, std::optional<double> h, double half_width_sd) {
            const OptionSpec spec = make_spec(spot, strike, maturity, type, style);
            const FdResult r = price_fd_detailed(spec, params, default_grid(spec, params, steps, h, half_width_sd));
            py::dict d;
            d["price"] = r.price;
            d["h"] = r.grid.h();
            d["n_space"] = r.grid.n_space;
            d["all_nonnegative"] = r.coefficients.all_nonnegative();
            d["warnings"] = r.warnings;
            return d;
        },
        py::arg("spot"), py::arg("strike"), py::arg("maturity"), py::arg("type"), py::arg("style"), py::arg("params"),
        py::arg("steps") = 2000, py::arg("h") = py::none(), py::arg("half_width_sd") = 10.0,
        "Explicit finite-difference price on the default grid.");

    m.def(
        "price_quadrature",
        [](double spot, double strike, double maturity, const std::string& type, const VgParams& params,
           double tolerance) {
            QuadratureConfig q;
            q.tolerance = tolerance;
            return quadrature_european_price(make_spec(spot, strike, maturity, type, "european"), params, q);
        },
        py::arg("spot"), py::arg("strike"), py::arg("maturity"), py::arg("type"), py::arg("params"),
        py::arg("tolerance") = 1e-8, "European price by quadrature against the VG density.");

    m.def(
        "black_scholes",
        [](double spot, double strike, double maturity, const std::string& type, double sigma, double r) {
            return black_scholes_price(make_spec(spot, strike, maturity, type, "european"), sigma, r);
        },
        py::arg("spot"), py::arg("strike"), py::arg("maturity"), py::arg("type"), py::arg("sigma"), py::arg("r"));

    m.def(
        "binomial_bs",
        [](double spot, double strike, double maturity, const std::string& type, const std::string& style,
           double sigma, double r, int steps) {
            return binomial_bs_price(make_spec(spot, strike, maturity, type, style), sigma, r, steps);
        },
        py::arg("spot"), py::arg("strike"), py::arg("maturity"), py::arg("type"), py::arg("style"), py::arg("sigma"),
        py::arg("r"), py::arg("steps") = 2000);

    m.def(
        "fd_coefficients",
        [](const VgParams& p, double dt, double h) {
            const FdCoefficients c = fd_coefficients(p, dt, h);
            return std::vector<double>{c.p_plus_2h, c.p_plus_h, c.p_0, c.p_minus_h, c.p_minus_2h};
        },
        py::arg("params"), py::arg("dt"), py::arg("h"), "Weights for offsets (+2h, +h, 0, -h, -2h).");

    m.def(
        "p3_curve",
        [](const std::vector<double>& kbar, double c2, double dt) {
            std::vector<std::tuple<double, double, double>> out;
            for (const P3Point& p : p3_curve(kbar, c2, dt)) out.emplace_back(p.kbar, p.p3_mm, p.p3_pde);
            return out;
        },
        py::arg("kbar"), py::arg("c2"), py::arg("dt"), "Rows (kbar, p3_mm, p3_pde).");

    m.def(
        "fit",
        [](const std::vector<double>& returns) {
            const SampleMoments sm = sample_moments({returns, "period"});
            py::dict d;
            d["mean"] = sm.mean;
            d["variance"] = sm.variance;
            d["skewness"] = sm.skewness;
            d["kurtosis"] = sm.kurtosis;
            const NormalFit n = fit_normal(sm);
            d["normal"] = py::make_tuple(n.mu, n.sigma);
            try {
                const VgFit f = fit_vg_moments(sm);
                py::dict vg;
                vg["theta"] = f.theta;
                vg["sigma"] = f.sigma;
                vg["kappa"] = f.kappa;
                vg["drift"] = f.drift;
                vg["refined"] = f.refined;
                d["vg"] = vg;
            } catch (const NotVgFittableError& e) {
                d["vg"] = py::none();
                d["fallback_reason"] = std::string(e.what());
            }
            return d;
        },
        py::arg("returns"), "Method-of-moments VG fit (Normal fallback) of per-period log-returns.");
}
