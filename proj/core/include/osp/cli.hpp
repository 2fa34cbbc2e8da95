#pragma once

#include <optional>
#include <string>
#include <vector>

#include "osp/discretize.hpp"
#include "osp/types.hpp"

namespace osp {

struct RunConfig {
    enum class Command { spectrum, curves, counts, sweep, portrait };

    Command command = Command::spectrum;
    QuadraticProfile profile;
    std::vector<double> reynolds_list;  // single entry for `spectrum`
    Scheme scheme = Scheme::chebyshev;
    int n = 0;                          // 0: scheme/R-dependent default
    double filter_tol = 1e-6;
    std::string registry_path;          // empty: bundled default registry
    std::string out_path;               // file (spectrum/curves) or directory
    std::optional<Rect> window;
    std::string condition_id;           // counts: which registry condition
    double arc_from = 0.1;              // counts arc as arclength fractions
    double arc_to = 0.7;
    double tube = 0.05;
    bool conjugate = false;             // spectrum: emit conjugated eigenvalues
    bool want_vectors = false;
    bool no_filter = false;             // spectrum: skip the two-grid filter
};

// Parses command-line arguments (without argv[0]). Throws UsageError naming
// the offending flag.
RunConfig parse_args(const std::vector<std::string>& args);

// Executes a validated config; returns the process exit code (0 on success).
// Computational failures propagate as Error.
int run_command(const RunConfig& cfg);

// Full entry point: parse, run, map errors to exit codes (0 success, 2 usage
// errors, 1 computational failures) with diagnostics on stderr.
int cli_main(const std::vector<std::string>& args);

}  // namespace osp
