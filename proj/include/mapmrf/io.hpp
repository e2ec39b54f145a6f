#pragma once

#include <string>

#include "mapmrf/model.hpp"
#include "mapmrf/oracle.hpp"
#include "mapmrf/solvers.hpp"

namespace mapmrf {

inline constexpr const char* kLibraryName = "mapmrf";
inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kRunRecordSchema = 1;

/// Parses the UAI MARKOV text format. Factor tables hold probabilities with
/// the last scope variable fastest; entries are converted to energies by
/// -log, so nonpositive values are rejected. Evidence sections are rejected.
MrfModel parse_uai(const std::string& text);

/// Parses the native `MRF-E v1` energy format.
MrfModel parse_native(const std::string& text);

/// Serializes to the native format with 17 significant digits, so
/// parse(serialize(m)) reproduces every value exactly.
std::string serialize_native(const MrfModel& model);

/// Reads a model file, dispatching on the header (MARKOV vs MRF-E).
MrfModel load_model(const std::string& path);

struct RunRecord {
    std::string model_id;
    std::string solver;
    SolverConfig config;
    int inits = 1;
    SolverReport report;
    std::string library = std::string(kLibraryName) + " " + kLibraryVersion;
};

std::string run_record_to_json(const RunRecord& record);
RunRecord run_record_from_json(const std::string& text);

void write_run_record(const RunRecord& record, const std::string& path);
RunRecord read_run_record(const std::string& path);

/// True when the two records agree on every numeric field except wall time
/// (which is never reproducible).
bool run_records_equivalent(const RunRecord& a, const RunRecord& b);

/// Command-line entry point; exposed so tests can drive the CLI in-process.
/// Returns 0 on success, 1 on usage errors, 2 on solve failures.
int cli_main(int argc, const char* const* argv);

}  // namespace mapmrf
