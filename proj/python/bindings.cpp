#include "fracrd/cli_io.hpp"
#include "fracrd/diagnostics.hpp"
#include "fracrd/eigen.hpp"
#include "fracrd/errors.hpp"
#include "fracrd/evolution.hpp"
#include "fracrd/fractional_time.hpp"
#include "fracrd/special_functions.hpp"
#include "fracrd/verify.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fracrd;

namespace {

py::array_t<double> as_array(const Field& f) {
    std::vector<py::ssize_t> shape{f.grid.n};
    if (f.grid.dim == 2) {
        shape.push_back(f.grid.n);
    }
    py::array_t<double> a(shape);
    std::copy(f.values.begin(), f.values.end(), a.mutable_data());
    return a;
}

Field from_array(const Grid& g, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (static_cast<std::size_t>(a.size()) != g.size()) {
        throw DataError("array size does not match the grid");
    }
    return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

}  // namespace

PYBIND11_MODULE(_fracrd, m) {
    m.doc() = "Space-time fractional reaction-diffusion solver";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<RegimeError>(m, "RegimeError", base.ptr());
    py::register_exception<StabilityError>(m, "StabilityError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    m.def("mittag_leffler", py::vectorize([](double alpha, double z) { return mittag_leffler(alpha, z); }),
          py::arg("alpha"), py::arg("z"));
    m.def("mittag_leffler2",
          py::vectorize([](double alpha, double beta, double z) { return mittag_leffler2(alpha, beta, z); }),
          py::arg("alpha"), py::arg("beta"), py::arg("z"));
    m.def("l1_weights", &l1_weights, py::arg("alpha"), py::arg("n"));
    m.def(
        "caputo_l1",
        [](double alpha, double dt, const std::vector<double>& samples) {
            const auto b = l1_weights(alpha, static_cast<int>(samples.size()));
            return caputo_l1(alpha, dt, samples, b);
        },
        py::arg("alpha"), py::arg("dt"), py::arg("samples"));
    m.def(
        "solve_relaxation_fde",
        [](double alpha, double u0, double dt, int steps, bool corrections) {
            ScalarSolveOptions o;
            o.starting_corrections = corrections;
            return solve_scalar_fde(alpha, u0, [](double x) { return -x; }, dt, steps, o);
        },
        py::arg("alpha"), py::arg("u0"), py::arg("dt"), py::arg("steps"),
        py::arg("starting_corrections") = true, "Samples of D^alpha u = -u.");

    py::class_<Grid>(m, "Grid")
        .def(py::init(&Grid::make), py::arg("dim"), py::arg("L"), py::arg("n"))
        .def_readonly("dim", &Grid::dim)
        .def_readonly("L", &Grid::L)
        .def_readonly("n", &Grid::n)
        .def_readonly("h", &Grid::h)
        .def("coords", [](const Grid& g) {
            std::vector<double> x(g.n);
            for (int i = 0; i < g.n; ++i) {
                x[i] = g.coord(i);
            }
            return x;
        })
        .def("__repr__", [](const Grid& g) {
            return "Grid(dim=" + std::to_string(g.dim) + ", L=" + std::to_string(g.L) +
                   ", n=" + std::to_string(g.n) + ")";
        });

    py::class_<OperatorParams>(m, "OperatorParams")
        .def(py::init<>())
        .def_readwrite("s", &OperatorParams::s)
        .def_readwrite("p", &OperatorParams::p);

    py::class_<SimParams>(m, "SimParams")
        .def(py::init<>())
        .def_readwrite("alpha", &SimParams::alpha)
        .def_readwrite("op", &SimParams::op)
        .def_readwrite("mu", &SimParams::mu)
        .def_readwrite("k", &SimParams::k)
        .def_readwrite("gamma", &SimParams::gamma)
        .def_readwrite("m", &SimParams::m)
        .def_readwrite("dt", &SimParams::dt)
        .def_readwrite("t_end", &SimParams::t_end)
        .def_readwrite("blowup_threshold", &SimParams::blowup_threshold)
        .def_readwrite("stability_factor", &SimParams::stability_factor)
        .def_readwrite("diffusion", &SimParams::diffusion)
        .def_readwrite("store_stride", &SimParams::store_stride);

    py::enum_<KernelShape>(m, "KernelShape")
        .value("box", KernelShape::box)
        .value("gaussian", KernelShape::gaussian)
        .value("delta", KernelShape::delta);

    py::class_<Kernel>(m, "Kernel")
        .def(py::init(&Kernel::make), py::arg("grid"), py::arg("shape"), py::arg("width"),
             py::arg("delta0"), py::arg("eta"))
        .def("mass", &Kernel::mass);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("scheme", &Trajectory::scheme)
        .def_readonly("times", &Trajectory::times)
        .def_readonly("sup_norm", &Trajectory::sup_norm)
        .def_readonly("l1", &Trajectory::l1)
        .def_readonly("l2", &Trajectory::l2)
        .def_readonly("mass", &Trajectory::mass)
        .def_readonly("field_times", &Trajectory::field_times)
        .def_property_readonly("fields",
                               [](const Trajectory& t) {
                                   py::list out;
                                   for (const Field& f : t.fields) {
                                       out.append(as_array(f));
                                   }
                                   return out;
                               })
        .def_property_readonly("status", [](const Trajectory& t) { return to_string(t.status); })
        .def_readonly("t_star", &Trajectory::t_star)
        .def_readonly("negative_steps", &Trajectory::negative_steps)
        .def_readonly("warnings", &Trajectory::warnings);

    m.def(
        "run",
        [](const Grid& g, py::array_t<double> u0, const SimParams& p, const Kernel& J) {
            const Field f = from_array(g, u0);
            py::gil_scoped_release release;
            return run(f, p, J);
        },
        py::arg("grid"), py::arg("u0"), py::arg("params"), py::arg("kernel"));
    m.def(
        "run_porous",
        [](const Grid& g, py::array_t<double> u0, const SimParams& p) {
            const Field f = from_array(g, u0);
            py::gil_scoped_release release;
            return run_porous(f, p);
        },
        py::arg("grid"), py::arg("u0"), py::arg("params"));
    m.def(
        "spectral_duhamel_run",
        [](const Grid& g, py::array_t<double> u0, const SimParams& p, const Kernel& J) {
            const Field f = from_array(g, u0);
            py::gil_scoped_release release;
            return spectral_duhamel_run(f, p, J);
        },
        py::arg("grid"), py::arg("u0"), py::arg("params"), py::arg("kernel"));

    py::class_<EigenPair>(m, "EigenPair")
        .def_readonly("lambda1", &EigenPair::lambda1)
        .def_readonly("method", &EigenPair::method)
        .def_readonly("iterations", &EigenPair::iterations)
        .def_property_readonly("e1", [](const EigenPair& e) { return as_array(e.e1); });
    m.def("first_eigenpair_linear", &first_eigenpair_linear, py::arg("grid"), py::arg("s"));

    py::class_<SteadyRoots>(m, "SteadyRoots")
        .def_readonly("a", &SteadyRoots::a)
        .def_readonly("A", &SteadyRoots::A);
    m.def("steady_roots", &steady_roots, py::arg("mu"), py::arg("k"), py::arg("gamma"));
    m.def(
        "blowup_window",
        [](double alpha, double H0) {
            const BlowupWindow w = blowup_window(alpha, H0);
            return py::make_tuple(w.t_lo, w.t_hi);
        },
        py::arg("alpha"), py::arg("H0"));

    py::class_<DecayFit>(m, "DecayFit")
        .def_readonly("rejected", &DecayFit::rejected)
        .def_readonly("reason", &DecayFit::reason)
        .def_readonly("envelope", &DecayFit::envelope)
        .def_readonly("sigma_hat", &DecayFit::sigma_hat)
        .def_readonly("c_hat", &DecayFit::c_hat)
        .def_readonly("residual", &DecayFit::residual);
    m.def(
        "decay_fit",
        [](const std::vector<double>& t, const std::vector<double>& v, double alpha) {
            return decay_fit(t, v, alpha);
        },
        py::arg("times"), py::arg("values"), py::arg("alpha"));

    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("sim", &RunConfig::sim)
        .def_property_readonly("grid", &RunConfig::grid)
        .def_property_readonly("mode", [](const RunConfig& c) { return to_string(c.mode); })
        .def("echo", &RunConfig::echo)
        .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; });
    m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
    m.def("make_initial", [](const RunConfig& c) { return as_array(make_initial(c)); }, py::arg("config"));
    m.def("make_kernel", &make_kernel, py::arg("config"));

    py::class_<CriterionResult>(m, "CriterionResult")
        .def_readonly("id", &CriterionResult::id)
        .def_readonly("name", &CriterionResult::name)
        .def_readonly("passed", &CriterionResult::pass)
        .def_readonly("detail", &CriterionResult::detail)
        .def_readonly("seconds", &CriterionResult::seconds);
    m.def("criterion_names", &criterion_names);
    m.def(
        "run_criterion",
        [](int id, std::uint64_t seed) {
            py::gil_scoped_release release;
            return run_criterion(id, seed);
        },
        py::arg("id"), py::arg("seed") = 7);

    m.attr("__version__") = FRACRD_VERSION;
}
