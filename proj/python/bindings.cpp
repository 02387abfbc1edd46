#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "diracgap/cli.hpp"
#include "diracgap/errors.hpp"
#include "diracgap/kernel.hpp"
#include "diracgap/minimax.hpp"

namespace py = pybind11;
using namespace diracgap;

namespace {

// keyword arguments become config keys, so the Python side shares the CLI's defaults
cli::RunConfig config_of(const py::dict& kw) {
    cli::Json j = cli::Json::object();
    py::object dumps = py::module_::import("json").attr("dumps");
    if (!kw.empty()) j = cli::Json::parse(dumps(kw).cast<std::string>());
    return cli::apply_config_json(j, cli::RunConfig{});
}

std::string run_command(cli::CommandOutput (*cmd)(const cli::RunConfig&), const py::dict& kw) {
    cli::RunConfig cfg = config_of(kw);
    cli::CommandOutput out;
    {
        py::gil_scoped_release nogil;
        out = cmd(cfg);
    }
    cli::Json doc = out.doc;
    doc["exit_code"] = out.exit_code;
    return doc.dump();
}

}  // namespace

PYBIND11_MODULE(_diracgap, m) {
    m.doc() = "Dirac-Coulomb gap eigenvalues and inequality checks";

    py::register_exception<Error>(m, "DiracGapError");

    m.def("kato_constant", &kato_constant, py::arg("dim"));
    m.def(
        "legendre_q", [](double j, double z) { return legendre_q(HalfInt::from_twice(static_cast<int>(std::lround(2 * j))), z); },
        py::arg("j"), py::arg("z"));
    m.def(
        "channels",
        [](int dim, double kappa_max) {
            std::vector<py::dict> out;
            for (const Channel& c : enumerate_channels(dim, kappa_max)) {
                py::dict d;
                d["label"] = c.label();
                d["kappa"] = c.kappa.value();
                d["degeneracy"] = c.degeneracy;
                out.push_back(d);
            }
            return out;
        },
        py::arg("dim"), py::arg("kappa_max") = 1.0);

    m.def("_eigenvalues", [](const py::dict& kw) { return run_command(&cli::cmd_eigenvalues, kw); });
    m.def("_hardy_check", [](const py::dict& kw) { return run_command(&cli::cmd_hardy_check, kw); });
    m.def("_kernel_check", [](const py::dict& kw) { return run_command(&cli::cmd_kernel_check, kw); });
    m.def("_core_check", [](const py::dict& kw) { return run_command(&cli::cmd_core_check, kw); });
    m.def("_certificate", [](const py::dict& kw) { return run_command(&cli::cmd_certificate, kw); });
    m.def("_sweep", [](const py::dict& kw) { return run_command(&cli::cmd_sweep, kw); });

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv{"diracgap"};
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release nogil;
                code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
