#include "osp/portrait.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "osp/errors.hpp"

extern "C" void openblas_set_num_threads(int);

namespace osp {

Rect default_window(const QuadraticProfile& p) {
    const auto [lo, hi] = range_on_interval(p);
    return Rect{lo - 0.1, hi + 0.1, -1.5 * (hi - lo) - 0.1, 0.0};
}

int worker_count() {
    const char* env = std::getenv("OS_PORTRAIT_WORKERS");
    if (env == nullptr || *env == '\0') return 1;
    const long v = std::strtol(env, nullptr, 10);
    if (v < 1) return 1;
    return static_cast<int>(std::min<long>(v, 64));
}

namespace {

int resolve_n(const SweepConfig& cfg, double reynolds) {
    const auto it = cfg.n_for.find(reynolds);
    if (it != cfg.n_for.end()) return it->second;
    if (cfg.n_override > 0) return cfg.n_override;
    return default_resolution(cfg.scheme, reynolds);
}

DiscretizedOperator build_operator(const QuadraticProfile& p, Scheme scheme,
                                   double epsilon, int n) {
    return scheme == Scheme::chebyshev ? build_chebyshev(p, epsilon, n)
                                       : build_finite_difference(p, epsilon, n);
}

LoadedSpectrum sweep_one(const SweepConfig& cfg, double reynolds) {
    const int n = resolve_n(cfg, reynolds);
    const double epsilon = 1.0 / reynolds;
    std::filesystem::path file;
    if (!cfg.out_dir.empty()) {
        file = cfg.out_dir / ("spectrum_R" + format_float(reynolds) + ".json");
        if (std::filesystem::exists(file)) {
            try {
                LoadedSpectrum cached = read_spectrum_json(file);
                if (cached.spectrum.profile == cfg.profile &&
                    cached.spectrum.scheme == cfg.scheme &&
                    cached.spectrum.epsilon == epsilon && cached.spectrum.n == n &&
                    cached.reynolds == reynolds) {
                    return cached;
                }
            } catch (const Error&) {
                // Stale or truncated file: recompute and overwrite.
            }
        }
    }

    const DiscretizedOperator op_lo = build_operator(cfg.profile, cfg.scheme, epsilon, n);
    const Spectrum lo = compute_spectrum(op_lo, cfg.want_vectors);
    const int n_hi = (3 * n + 1) / 2;  // >= 1.5 n
    const DiscretizedOperator op_hi = build_operator(cfg.profile, cfg.scheme, epsilon, n_hi);
    const Spectrum hi = compute_spectrum(op_hi, false);
    LoadedSpectrum out;
    out.spectrum = filter_spurious(lo, hi, cfg.filter_tol);
    out.reynolds = reynolds;
    if (!file.empty()) {
        write_spectrum_json(file, out.spectrum, reynolds);
    }
    return out;
}

}  // namespace

std::vector<LoadedSpectrum> run_sweep(const SweepConfig& cfg) {
    if (cfg.reynolds_list.empty()) {
        raise("InvalidConfig", "reynolds list must not be empty");
    }
    for (std::size_t k = 0; k + 1 < cfg.reynolds_list.size(); ++k) {
        if (!(cfg.reynolds_list[k] < cfg.reynolds_list[k + 1])) {
            raise("InvalidConfig", "reynolds list must be strictly increasing");
        }
    }
    for (double r : cfg.reynolds_list) {
        if (!(r > 0.0)) raise("InvalidConfig", "reynolds values must be positive");
    }
    if (!cfg.out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.out_dir, ec);
        if (ec) raise("IoError", "cannot create sweep directory " + cfg.out_dir.string());
    }

    const std::size_t count = cfg.reynolds_list.size();
    std::vector<LoadedSpectrum> results(count);
    const int workers = std::min<int>(worker_count(), static_cast<int>(count));

    auto run_one = [&](std::size_t idx) {
        try {
            results[idx] = sweep_one(cfg, cfg.reynolds_list[idx]);
        } catch (const Error& e) {
            raise(e.name(), "while sweeping R=" + format_float(cfg.reynolds_list[idx]) +
                                ": " + e.what());
        }
    };

    if (workers <= 1) {
        for (std::size_t idx = 0; idx < count; ++idx) run_one(idx);
        return results;
    }

    openblas_set_num_threads(1);  // the pool owns the parallelism
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t idx = next.fetch_add(1); idx < count;
                     idx = next.fetch_add(1)) {
                    run_one(idx);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    openblas_set_num_threads(0);  // restore the library default
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

namespace {

struct NearestOnCurve {
    double distance = std::numeric_limits<double>::infinity();
    double position = 0.0;  // arclength of the nearest point
};

NearestOnCurve nearest_on_curve(Complex pt, const LimitCurve& curve) {
    NearestOnCurve best;
    const std::vector<Complex>& poly = curve.points;
    if (poly.empty()) return best;
    if (poly.size() == 1) {
        return {std::abs(pt - poly[0]), 0.0};
    }
    for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
        const Complex a = poly[k], b = poly[k + 1];
        const Complex ab = b - a;
        const double len2 = std::norm(ab);
        double t = len2 > 0.0 ? ((pt - a) * std::conj(ab)).real() / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double d = std::abs(pt - (a + t * ab));
        if (d < best.distance) {
            best.distance = d;
            best.position = curve.arclength[k] + t * std::abs(ab);
        }
    }
    return best;
}

}  // namespace

double min_distance_to_graph(Complex lambda, const LimitGraph& graph) {
    double best = std::numeric_limits<double>::infinity();
    for (const LimitCurve& c : graph.curves) {
        best = std::min(best, nearest_on_curve(lambda, c).distance);
    }
    return best;
}

ConcentrationStats distance_to_graph(const Spectrum& spec, double reynolds,
                                     const LimitGraph& graph, const Rect& window) {
    if (graph.curves.empty()) {
        raise("EmptyGraph", "limit graph has no curves");
    }
    ConcentrationStats stats;
    stats.reynolds = reynolds;
    double sum = 0.0, worst = 0.0;
    for (const EigenPair& e : spec.pairs) {
        if (!window.contains(e.lambda)) continue;
        const double d = min_distance_to_graph(e.lambda, graph);
        ++stats.counted;
        sum += d;
        worst = std::max(worst, d);
    }
    if (stats.counted > 0) {
        stats.max_distance = worst;
        stats.mean_distance = sum / stats.counted;
    }
    return stats;
}

int empirical_count(const Spectrum& spec, const LimitCurve& curve,
                    std::size_t from_idx, std::size_t to_idx, double tube_radius) {
    if (curve.points.empty() || to_idx >= curve.points.size() || from_idx > to_idx) {
        raise("IndexOutOfRange", "arc indices must satisfy from <= to < size");
    }
    const double s_from = curve.arclength[from_idx];
    const double s_to = curve.arclength[to_idx];
    int count = 0;
    for (const EigenPair& e : spec.pairs) {
        const NearestOnCurve near = nearest_on_curve(e.lambda, curve);
        if (near.distance <= tube_radius && near.position >= s_from &&
            near.position <= s_to) {
            ++count;
        }
    }
    return count;
}

CountingReport counting_report(const std::vector<LoadedSpectrum>& sweep,
                               const LimitCurve& curve, const CountingLaw& law,
                               std::size_t from_idx, std::size_t to_idx,
                               double tube_radius) {
    if (sweep.empty()) raise("InvalidConfig", "counting report needs at least one spectrum");
    CountingReport report;
    report.condition_id = law.condition_id;
    report.arc_from = from_idx;
    report.arc_to = to_idx;
    for (const LoadedSpectrum& ls : sweep) {
        CountingRow row;
        row.reynolds = ls.reynolds;
        // Counts scale with the semiclassical parameter h = sqrt(epsilon).
        const double h = std::sqrt(ls.spectrum.epsilon);
        row.empirical = empirical_count(ls.spectrum, curve, from_idx, to_idx, tube_radius);
        row.predicted = predicted_count(law, curve, from_idx, to_idx, h);
        report.rows.push_back(row);
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const CountingRow& a, const CountingRow& b) {
                  return a.reynolds < b.reynolds;
              });
    if (report.rows.size() >= 3) {
        double sxx = 0.0, sxy = 0.0, sy = 0.0;
        for (const CountingRow& r : report.rows) {
            const double x = std::sqrt(r.reynolds);  // 1/h
            sxx += x * x;
            sxy += x * r.empirical;
            sy += r.empirical;
        }
        const double slope = sxy / sxx;
        const double mean = sy / report.rows.size();
        double ss_res = 0.0, ss_tot = 0.0;
        for (const CountingRow& r : report.rows) {
            const double x = std::sqrt(r.reynolds);
            ss_res += (r.empirical - slope * x) * (r.empirical - slope * x);
            ss_tot += (r.empirical - mean) * (r.empirical - mean);
        }
        report.fit_slope = slope;
        report.fit_r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    }
    return report;
}

std::vector<Trajectory> track_trajectories(const std::vector<LoadedSpectrum>& sweep,
                                           const Rect& window) {
    std::vector<Trajectory> paths;
    if (sweep.empty()) return paths;

    std::vector<std::vector<Complex>> frames;
    for (const LoadedSpectrum& ls : sweep) {
        std::vector<Complex> frame;
        for (const EigenPair& e : ls.spectrum.pairs) {
            if (window.contains(e.lambda)) frame.push_back(e.lambda);
        }
        frames.push_back(std::move(frame));
    }

    // open[k] = index into paths of the trajectory currently ending at
    // frames[f][k].
    std::vector<std::size_t> open;
    for (std::size_t k = 0; k < frames[0].size(); ++k) {
        paths.push_back(Trajectory{0, {frames[0][k]}});
        open.push_back(paths.size() - 1);
    }
    for (std::size_t f = 0; f + 1 < frames.size(); ++f) {
        const std::vector<Complex>& cur = frames[f];
        const std::vector<Complex>& nxt = frames[f + 1];
        struct Cand {
            double d;
            std::size_t i, j;
        };
        std::vector<Cand> cands;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            for (std::size_t j = 0; j < nxt.size(); ++j) {
                cands.push_back({std::abs(cur[i] - nxt[j]), i, j});
            }
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.d != b.d) return a.d < b.d;
            if (a.i != b.i) return a.i < b.i;
            return a.j < b.j;
        });
        std::vector<char> used_i(cur.size(), 0), used_j(nxt.size(), 0);
        std::vector<std::size_t> next_open(nxt.size(), SIZE_MAX);
        for (const Cand& c : cands) {
            if (used_i[c.i] || used_j[c.j]) continue;
            used_i[c.i] = used_j[c.j] = 1;
            paths[open[c.i]].lambdas.push_back(nxt[c.j]);
            next_open[c.j] = open[c.i];
        }
        for (std::size_t j = 0; j < nxt.size(); ++j) {
            if (next_open[j] == SIZE_MAX) {  // unmatched: a new path is born
                paths.push_back(Trajectory{f + 1, {nxt[j]}});
                next_open[j] = paths.size() - 1;
            }
        }
        open = std::move(next_open);
    }
    return paths;
}

void write_concentration_csv(const std::filesystem::path& path,
                             const std::vector<ConcentrationStats>& rows) {
    std::ostringstream out;
    out << "reynolds,max_distance,mean_distance,counted\n";
    for (const ConcentrationStats& r : rows) {
        out << format_float(r.reynolds) << ","
            << (r.max_distance ? format_float(*r.max_distance) : "nan") << ","
            << (r.mean_distance ? format_float(*r.mean_distance) : "nan") << ","
            << r.counted << "\n";
    }
    write_text_file(path, out.str());
}

void write_counting_csv(const std::filesystem::path& path,
                        const CountingReport& report) {
    std::ostringstream out;
    out << "reynolds,empirical,predicted\n";
    for (const CountingRow& r : report.rows) {
        out << format_float(r.reynolds) << "," << r.empirical << ","
            << format_float(r.predicted) << "\n";
    }
    write_text_file(path, out.str());
}

}  // namespace osp
