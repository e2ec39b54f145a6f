#include "mapmrf/bench.hpp"

#include <algorithm>
#include <array>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mapmrf/errors.hpp"
#include "mapmrf/io.hpp"
#include "mapmrf/rng.hpp"

namespace mapmrf {

namespace {

using nlohmann::json;

PotentialTensor random_tensor(std::vector<int> dims, Rng& rng) {
    std::size_t size = 1;
    for (int d : dims) size *= static_cast<std::size_t>(d);
    std::vector<double> values(size);
    for (double& v : values) v = rng.uniform(-1.0, 1.0);
    return {std::move(dims), std::move(values)};
}

PotentialTensor potts_tensor(int labels, double lambda) {
    std::vector<double> values(static_cast<std::size_t>(labels) *
                               static_cast<std::size_t>(labels));
    for (int s = 0; s < labels; ++s) {
        for (int t = 0; t < labels; ++t) {
            values[static_cast<std::size_t>(s * labels + t)] = s == t ? 0.0 : lambda;
        }
    }
    return {{labels, labels}, std::move(values)};
}

}  // namespace

MrfModel gen_grid(int rows, int cols, int labels, GridConnectivity connectivity,
                  GridPotential potential, double potts_lambda, std::uint64_t seed) {
    if (rows < 1 || cols < 1 || labels < 1) throw Error("grid dimensions must be positive");
    Rng rng(seed);
    MrfModel model;
    model.num_nodes = rows * cols;
    model.label_counts.assign(static_cast<std::size_t>(model.num_nodes), labels);

    const auto at = [cols](int r, int c) { return r * cols + c; };
    for (int i = 0; i < model.num_nodes; ++i) {
        model.cliques.push_back({{i}, random_tensor({labels}, rng)});
    }
    // Edge order: per cell, right / down / down-right / down-left.
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            std::vector<std::pair<int, int>> targets;
            if (c + 1 < cols) targets.emplace_back(r, c + 1);
            if (r + 1 < rows) targets.emplace_back(r + 1, c);
            if (connectivity == GridConnectivity::N8 && r + 1 < rows) {
                if (c + 1 < cols) targets.emplace_back(r + 1, c + 1);
                if (c - 1 >= 0) targets.emplace_back(r + 1, c - 1);
            }
            for (const auto& [tr, tc] : targets) {
                Clique edge;
                edge.nodes = {at(r, c), at(tr, tc)};
                edge.potential = potential == GridPotential::Potts
                                     ? potts_tensor(labels, potts_lambda)
                                     : random_tensor({labels, labels}, rng);
                model.cliques.push_back(std::move(edge));
            }
        }
    }
    return model;
}

MrfModel gen_higher_order(int nodes, int labels, int num_triples, std::uint64_t seed) {
    if (nodes < 1 || labels < 1 || num_triples < 0) {
        throw Error("generator arguments must be positive");
    }
    const long available = nodes >= 3
                               ? static_cast<long>(nodes) * (nodes - 1) * (nodes - 2) / 6
                               : 0;
    if (num_triples > available) {
        throw Error("more triples requested than distinct node triples exist");
    }
    Rng rng(seed);
    MrfModel model;
    model.num_nodes = nodes;
    model.label_counts.assign(static_cast<std::size_t>(nodes), labels);
    for (int i = 0; i < nodes; ++i) {
        model.cliques.push_back({{i}, random_tensor({labels}, rng)});
    }
    std::set<std::array<int, 3>> used;
    while (static_cast<int>(used.size()) < num_triples) {
        int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(nodes)));
        int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(nodes)));
        int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(nodes)));
        if (a == b || a == c || b == c) continue;
        std::array<int, 3> key{a, b, c};
        std::sort(key.begin(), key.end());
        if (!used.insert(key).second) continue;
        model.cliques.push_back(
            {{key[0], key[1], key[2]}, random_tensor({labels, labels, labels}, rng)});
    }
    return model;
}

SolverReport solve_with_inits(const MrfModel& model, SolverKind kind, const SolverConfig& cfg,
                              int inits) {
    if (kind == SolverKind::Admm) return admm_solve(model, cfg);
    if (kind == SolverKind::Cqp) return cqp_solve(model, init_homogeneous(model), cfg);

    SolverReport best;
    bool have = false;
    for (int attempt = 0; attempt < std::max(inits, 1); ++attempt) {
        const ContinuousAssignment x0 =
            attempt == 0 ? init_unary(model)
                         : init_random(model, cfg.seed + static_cast<std::uint64_t>(attempt));
        SolverReport report;
        switch (kind) {
            case SolverKind::Bcd: report = bcd_solve(model, x0, cfg); break;
            case SolverKind::Pgd: report = pgd_solve(model, x0, cfg); break;
            case SolverKind::Fw: report = fw_solve(model, x0, cfg); break;
            default: throw Error("unreachable solver kind");
        }
        if (!have || report.discrete_energy < best.discrete_energy) {
            best = std::move(report);
            have = true;
        }
    }
    return best;
}

namespace {

MrfModel instance_model(const json& spec, std::uint64_t base_seed) {
    if (spec.contains("file")) {
        return load_model(spec.at("file").get<std::string>());
    }
    const std::string generator = spec.at("generator").get<std::string>();
    const std::uint64_t seed =
        spec.contains("seed") ? spec.at("seed").get<std::uint64_t>() : base_seed;
    if (generator == "grid") {
        const std::string conn = spec.value("connectivity", "N4");
        const std::string pot = spec.value("potential", "random");
        return gen_grid(spec.at("rows").get<int>(), spec.at("cols").get<int>(),
                        spec.at("labels").get<int>(),
                        conn == "N8" ? GridConnectivity::N8 : GridConnectivity::N4,
                        pot == "potts" ? GridPotential::Potts : GridPotential::Random,
                        spec.value("lambda", 1.0), seed);
    }
    if (generator == "higher_order") {
        return gen_higher_order(spec.at("nodes").get<int>(), spec.at("labels").get<int>(),
                                spec.at("triples").get<int>(), seed);
    }
    throw Error("unknown generator: " + generator);
}

}  // namespace

SuiteSummary run_suite_json(const std::string& spec_json, const std::string& out_dir) {
    json spec;
    try {
        spec = json::parse(spec_json);
    } catch (const json::exception& e) {
        throw ParseError(1, std::string("bad suite spec: ") + e.what());
    }

    namespace fs = std::filesystem;
    const fs::path out(out_dir);
    fs::create_directories(out / "runs");

    const std::uint64_t base_seed = spec.value("seed", std::uint64_t{0});
    const bool want_oracle = spec.value("oracle", true);
    const std::uint64_t cap = spec.value("oracle_cap", kDefaultOracleCap);

    // Expand `count` shorthands: a generator entry with count N becomes N
    // instances with consecutive seeds.
    std::vector<std::pair<std::string, json>> instances;
    {
        int instance_no = 0;
        for (const json& inst : spec.at("instances")) {
            const std::string name =
                inst.value("name", "instance-" + std::to_string(instance_no));
            ++instance_no;
            const int count = inst.value("count", 1);
            if (count <= 1) {
                instances.emplace_back(name, inst);
                continue;
            }
            const std::uint64_t first_seed = inst.value("seed", base_seed);
            for (int k = 0; k < count; ++k) {
                json expanded = inst;
                expanded.erase("count");
                expanded["seed"] = first_seed + static_cast<std::uint64_t>(k);
                instances.emplace_back(name + "-" + std::to_string(k + 1), expanded);
            }
        }
    }

    SuiteSummary summary;
    for (const auto& [name, inst] : instances) {

        MrfModel model;
        bool model_ok = true;
        std::string model_error;
        try {
            model = instance_model(inst, base_seed);
            validate_or_throw(model);
        } catch (const std::exception& e) {
            model_ok = false;
            model_error = e.what();
        }

        bool has_oracle = false;
        double oracle_energy = 0.0;
        if (model_ok && want_oracle) {
            try {
                oracle_energy = brute_force_map(model, cap).second;
                has_oracle = true;
            } catch (const SearchSpaceTooLarge&) {
                has_oracle = false;  // reported as unavailable, like a missing bound
            }
        }

        for (const json& solver_spec : spec.at("solvers")) {
            SuiteRun run;
            run.instance = name;
            run.solver = solver_spec.at("solver").get<std::string>();
            if (!model_ok) {
                run.failed = true;
                run.error = model_error;
                summary.runs.push_back(run);
                continue;
            }
            try {
                SolverConfig cfg;
                cfg.seed = solver_spec.value("seed", base_seed);
                cfg.max_iters = solver_spec.value("max_iters", cfg.max_iters);
                const int inits = solver_spec.value("inits", 5);
                const SolverKind kind = solver_kind_from_string(run.solver);

                RunRecord record;
                record.model_id = name;
                record.solver = run.solver;
                record.config = cfg;
                record.inits = kind == SolverKind::Bcd || kind == SolverKind::Pgd ||
                                       kind == SolverKind::Fw
                                   ? inits
                                   : 1;
                record.report = solve_with_inits(model, kind, cfg, inits);

                const fs::path record_path =
                    out / "runs" /
                    (name + "__" + run.solver + "__seed" + std::to_string(cfg.seed) + ".json");
                write_run_record(record, record_path.string());

                run.value = record.report.discrete_energy;
                run.has_oracle = has_oracle;
                if (has_oracle) run.oracle_gap = run.value - oracle_energy;
                run.iterations = record.report.iterations;
                run.wall_time_s = record.report.wall_time_s;
                run.record_path = record_path.string();
            } catch (const std::exception& e) {
                run.failed = true;
                run.error = e.what();
            }
            summary.runs.push_back(run);
        }
    }

    json jruns = json::array();
    for (const SuiteRun& run : summary.runs) {
        jruns.push_back(json{{"instance", run.instance},
                             {"solver", run.solver},
                             {"value", run.value},
                             {"has_oracle", run.has_oracle},
                             {"oracle_gap", run.oracle_gap},
                             {"iterations", run.iterations},
                             {"wall_time_s", run.wall_time_s},
                             {"failed", run.failed},
                             {"error", run.error},
                             {"record", run.record_path}});
    }
    const fs::path json_path = out / "summary.json";
    std::ofstream(json_path) << json{{"runs", jruns}}.dump(2) << "\n";
    summary.summary_json_path = json_path.string();

    std::ostringstream text;
    char line[256];
    std::snprintf(line, sizeof(line), "%-20s %-6s %14s %14s %8s %10s\n", "instance", "solver",
                  "value", "oracle gap", "iters", "time (s)");
    text << line;
    for (const SuiteRun& run : summary.runs) {
        if (run.failed) {
            std::snprintf(line, sizeof(line), "%-20s %-6s %14s %14s %8s %10s  # %s\n",
                          run.instance.c_str(), run.solver.c_str(), "failed", "-", "-", "-",
                          run.error.c_str());
        } else {
            char gap[32];
            if (run.has_oracle) {
                std::snprintf(gap, sizeof(gap), "%14.6g", run.oracle_gap);
            } else {
                std::snprintf(gap, sizeof(gap), "%14s", "unavailable");
            }
            std::snprintf(line, sizeof(line), "%-20s %-6s %14.6g %s %8d %10.3f\n",
                          run.instance.c_str(), run.solver.c_str(), run.value, gap,
                          run.iterations, run.wall_time_s);
        }
        text << line;
    }
    const fs::path text_path = out / "summary.txt";
    std::ofstream(text_path) << text.str();
    summary.summary_text_path = text_path.string();
    return summary;
}

SuiteSummary run_suite(const std::string& spec_path, const std::string& out_dir) {
    std::ifstream in(spec_path);
    if (!in) throw IoError("cannot open suite spec: " + spec_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return run_suite_json(buffer.str(), out_dir);
}

}  // namespace mapmrf
