#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mapmrf/bench.hpp"
#include "mapmrf/errors.hpp"
#include "mapmrf/io.hpp"
#include "mapmrf/oracle.hpp"
#include "mapmrf/projection.hpp"
#include "mapmrf/solvers.hpp"
#include "mapmrf/tensor.hpp"

namespace py = pybind11;

namespace {

using namespace mapmrf;

ContinuousAssignment blocks_to_assignment(const MrfModel& model,
                                          const std::vector<std::vector<double>>& blocks) {
    if (blocks.size() != static_cast<std::size_t>(model.num_nodes)) {
        throw DimensionMismatch("need one block per node");
    }
    ContinuousAssignment x(model);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        auto dst = x.block(i);
        if (blocks[i].size() != dst.size()) {
            throw DimensionMismatch("block " + std::to_string(i) + " has the wrong length");
        }
        std::copy(blocks[i].begin(), blocks[i].end(), dst.begin());
    }
    return x;
}

std::vector<std::vector<double>> assignment_to_blocks(const ContinuousAssignment& x) {
    std::vector<std::vector<double>> blocks(x.num_blocks());
    for (std::size_t i = 0; i < x.num_blocks(); ++i) {
        auto src = x.block(i);
        blocks[i].assign(src.begin(), src.end());
    }
    return blocks;
}

SolverReport run_solver(const MrfModel& model, const std::string& solver,
                        const SolverConfig& cfg, int inits) {
    validate_or_throw(model);
    return solve_with_inits(model, solver_kind_from_string(solver), cfg, inits);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "MAP inference for discrete MRFs via a tight nonconvex relaxation";
    m.attr("__version__") = kLibraryVersion;

    py::register_exception<Error>(m, "MapMrfError");

    py::class_<PotentialTensor>(m, "PotentialTensor")
        .def(py::init<std::vector<int>, std::vector<double>>(), py::arg("dims"),
             py::arg("values"))
        .def_readwrite("dims", &PotentialTensor::dims)
        .def_readwrite("values", &PotentialTensor::values)
        .def_property_readonly("rank", &PotentialTensor::rank);

    py::class_<Clique>(m, "Clique")
        .def(py::init([](std::vector<int> nodes, PotentialTensor potential) {
                 return Clique{std::move(nodes), std::move(potential)};
             }),
             py::arg("nodes"), py::arg("potential"))
        .def_readwrite("nodes", &Clique::nodes)
        .def_readwrite("potential", &Clique::potential);

    py::class_<MrfModel>(m, "MrfModel")
        .def(py::init<>())
        .def_readwrite("num_nodes", &MrfModel::num_nodes)
        .def_readwrite("label_counts", &MrfModel::label_counts)
        .def_readwrite("cliques", &MrfModel::cliques)
        .def_property_readonly("degree", &MrfModel::degree)
        .def("add_clique",
             [](MrfModel& model, std::vector<int> nodes, std::vector<double> values) {
                 Clique clique;
                 for (int node : nodes) {
                     clique.potential.dims.push_back(
                         model.label_counts.at(static_cast<std::size_t>(node)));
                 }
                 clique.nodes = std::move(nodes);
                 clique.potential.values = std::move(values);
                 model.cliques.push_back(std::move(clique));
             },
             py::arg("nodes"), py::arg("values"),
             "Append a clique; values are row-major with the last node fastest.");

    m.def("validate", [](const MrfModel& model) -> py::object {
        if (auto err = validate(model)) return py::str(err->message);
        return py::none();
    });
    m.def("energy_discrete", &energy_discrete, py::arg("model"), py::arg("labeling"));
    m.def(
        "energy_continuous",
        [](const MrfModel& model, const std::vector<std::vector<double>>& blocks) {
            return energy_continuous(model, blocks_to_assignment(model, blocks));
        },
        py::arg("model"), py::arg("blocks"));
    m.def(
        "energy_gradient",
        [](const MrfModel& model, const std::vector<std::vector<double>>& blocks) {
            return assignment_to_blocks(
                energy_gradient(model, blocks_to_assignment(model, blocks)));
        },
        py::arg("model"), py::arg("blocks"));

    m.def("init_homogeneous",
          [](const MrfModel& model) { return assignment_to_blocks(init_homogeneous(model)); });
    m.def("init_unary",
          [](const MrfModel& model) { return assignment_to_blocks(init_unary(model)); });
    m.def(
        "init_random",
        [](const MrfModel& model, std::uint64_t seed) {
            return assignment_to_blocks(init_random(model, seed));
        },
        py::arg("model"), py::arg("seed"));

    py::class_<AdmmConfig>(m, "AdmmConfig")
        .def(py::init<>())
        .def_readwrite("rho0", &AdmmConfig::rho0)
        .def_readwrite("rho_max", &AdmmConfig::rho_max)
        .def_readwrite("beta", &AdmmConfig::beta)
        .def_readwrite("stabilization", &AdmmConfig::stabilization)
        .def_readwrite("patience", &AdmmConfig::patience)
        .def_readwrite("residual_tol", &AdmmConfig::residual_tol);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("max_iters", &SolverConfig::max_iters)
        .def_readwrite("energy_tol", &SolverConfig::energy_tol)
        .def_readwrite("stationarity_tol", &SolverConfig::stationarity_tol)
        .def_readwrite("admm", &SolverConfig::admm)
        .def_readwrite("linesearch_delta", &SolverConfig::linesearch_delta)
        .def_readwrite("seed", &SolverConfig::seed);

    py::class_<SolverReport>(m, "SolverReport")
        .def_readonly("final_labeling", &SolverReport::final_labeling)
        .def_readonly("discrete_energy", &SolverReport::discrete_energy)
        .def_readonly("continuous_energy", &SolverReport::continuous_energy)
        .def_readonly("energy_trace", &SolverReport::energy_trace)
        .def_readonly("residual_trace", &SolverReport::residual_trace)
        .def_readonly("iterations", &SolverReport::iterations)
        .def_readonly("wall_time_s", &SolverReport::wall_time_s)
        .def_property_readonly("termination", [](const SolverReport& r) {
            return to_string(r.termination);
        });

    m.def("solve", &run_solver, py::arg("model"), py::arg("solver"),
          py::arg("config") = SolverConfig{}, py::arg("inits") = 1,
          "Run one solver (bcd|pgd|fw|admm|cqp) under the standard protocol.");
    m.def(
        "round_bcd",
        [](const MrfModel& model, const std::vector<std::vector<double>>& blocks) {
            return round_bcd(model, blocks_to_assignment(model, blocks));
        },
        py::arg("model"), py::arg("blocks"));
    m.def(
        "check_stationarity",
        [](const MrfModel& model, const std::vector<std::vector<double>>& blocks) {
            return check_stationarity(model, blocks_to_assignment(model, blocks));
        },
        py::arg("model"), py::arg("blocks"));

    m.def(
        "brute_force_map",
        [](const MrfModel& model, std::uint64_t cap) { return brute_force_map(model, cap); },
        py::arg("model"), py::arg("cap") = kDefaultOracleCap);

    m.def("parse_uai", &parse_uai, py::arg("text"));
    m.def("parse_native", &parse_native, py::arg("text"));
    m.def("serialize_native", &serialize_native, py::arg("model"));

    m.def(
        "gen_grid",
        [](int rows, int cols, int labels, const std::string& connectivity,
           const std::string& potential, double lambda, std::uint64_t seed) {
            return gen_grid(rows, cols, labels,
                            connectivity == "N8" ? GridConnectivity::N8 : GridConnectivity::N4,
                            potential == "potts" ? GridPotential::Potts : GridPotential::Random,
                            lambda, seed);
        },
        py::arg("rows"), py::arg("cols"), py::arg("labels"), py::arg("connectivity") = "N4",
        py::arg("potential") = "random", py::arg("lambda") = 1.0, py::arg("seed") = 0);
    m.def("gen_higher_order", &gen_higher_order, py::arg("nodes"), py::arg("labels"),
          py::arg("num_triples"), py::arg("seed") = 0);

    m.def(
        "project_simplex",
        [](const std::vector<double>& v) { return project_simplex(v); },
        py::arg("v"));
}
