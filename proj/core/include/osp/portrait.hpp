#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "osp/eigensolve.hpp"
#include "osp/graph.hpp"
#include "osp/io.hpp"

namespace osp {

// Re in [min q - 0.1, max q + 0.1], Im in [-1.5*(max q - min q) - 0.1, 0]:
// the spectral window where the limit structure lives.
Rect default_window(const QuadraticProfile& p);

struct SweepConfig {
    QuadraticProfile profile;
    std::vector<double> reynolds_list;  // strictly increasing
    Scheme scheme = Scheme::chebyshev;
    std::map<double, int> n_for;        // per-R override of the resolution
    int n_override = 0;                 // global override (0 = defaults)
    double filter_tol = 1e-6;
    bool want_vectors = false;
    std::filesystem::path out_dir;      // empty: no persistence
};

// One filtered spectrum per Reynolds number: the working resolution n is
// cross-checked against ceil(1.5 n) and spurious eigenvalues dropped.
// Completed spectra are persisted to out_dir/spectrum_R<value>.json and
// reloaded on rerun, so an interrupted sweep resumes. Per-R jobs run
// concurrently when OS_PORTRAIT_WORKERS > 1.
std::vector<LoadedSpectrum> run_sweep(const SweepConfig& cfg);

struct ConcentrationStats {
    double reynolds = 0.0;
    std::optional<double> max_distance;   // absent when no eigenvalue in window
    std::optional<double> mean_distance;
    int counted = 0;
};

// Distance statistics of the windowed eigenvalues to the limit graph
// (minimum point-to-segment distance over all curve polylines).
// Throws EmptyGraph.
ConcentrationStats distance_to_graph(const Spectrum& spec, double reynolds,
                                     const LimitGraph& graph, const Rect& window);

double min_distance_to_graph(Complex lambda, const LimitGraph& graph);

// Number of eigenvalues whose nearest point on the curve falls on the arc
// [from_idx, to_idx] (by arclength) within tube_radius.
int empirical_count(const Spectrum& spec, const LimitCurve& curve,
                    std::size_t from_idx, std::size_t to_idx, double tube_radius);

struct CountingRow {
    double reynolds = 0.0;
    int empirical = 0;
    double predicted = 0.0;
};

struct CountingReport {
    std::string condition_id;
    std::size_t arc_from = 0;
    std::size_t arc_to = 0;
    std::vector<CountingRow> rows;          // ordered by reynolds
    std::optional<double> fit_slope;        // present when >= 3 rows
    std::optional<double> fit_r2;
};

// Empirical vs predicted counts along one arc over a sweep. The prediction
// and the regression use the semiclassical parameter h = sqrt(epsilon) of
// each spectrum: counts grow linearly in 1/h, and the through-origin fit of
// empirical against 1/h reports slope and R^2.
CountingReport counting_report(const std::vector<LoadedSpectrum>& sweep,
                               const LimitCurve& curve, const CountingLaw& law,
                               std::size_t from_idx, std::size_t to_idx,
                               double tube_radius);

struct Trajectory {
    std::size_t first_index = 0;      // sweep index where the path starts
    std::vector<Complex> lambdas;     // one per consecutive sweep entry
};

// Greedy nearest-neighbor matching of windowed eigenvalues between
// consecutive sweep entries; unmatched eigenvalues start or end paths.
std::vector<Trajectory> track_trajectories(const std::vector<LoadedSpectrum>& sweep,
                                           const Rect& window);

// OS_PORTRAIT_WORKERS (default 1, clamped to [1, 64]).
int worker_count();

void write_concentration_csv(const std::filesystem::path& path,
                             const std::vector<ConcentrationStats>& rows);
void write_counting_csv(const std::filesystem::path& path,
                        const CountingReport& report);

}  // namespace osp
