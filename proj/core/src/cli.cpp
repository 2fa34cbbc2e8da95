#include "osp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <CLI11.hpp>

#include "osp/eigensolve.hpp"
#include "osp/errors.hpp"
#include "osp/graph.hpp"
#include "osp/io.hpp"
#include "osp/portrait.hpp"
#include "osp/registry.hpp"
#include "osp/svg.hpp"

namespace osp {

namespace {

QuadraticProfile parse_profile(const std::string& text) {
    QuadraticProfile p;
    double vals[3];
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
        std::size_t used = 0;
        try {
            vals[k] = std::stod(text.substr(pos), &used);
        } catch (const std::exception&) {
            raise("UsageError", "--profile needs three comma-separated numbers");
        }
        pos += used;
        if (k < 2) {
            if (pos >= text.size() || text[pos] != ',') {
                raise("UsageError", "--profile needs three comma-separated numbers");
            }
            ++pos;
        }
    }
    if (pos != text.size()) {
        raise("UsageError", "--profile needs three comma-separated numbers");
    }
    p.a = vals[0];
    p.b = vals[1];
    p.c = vals[2];
    return p;
}

std::vector<double> parse_reynolds_list(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t used = 0;
        try {
            out.push_back(std::stod(text.substr(pos), &used));
        } catch (const std::exception&) {
            raise("UsageError", "--reynolds needs comma-separated positive numbers");
        }
        pos += used;
        if (pos < text.size()) {
            if (text[pos] != ',') {
                raise("UsageError", "--reynolds needs comma-separated positive numbers");
            }
            ++pos;
        }
    }
    if (out.empty()) raise("UsageError", "--reynolds needs at least one value");
    for (double r : out) {
        if (!(r > 0.0)) raise("UsageError", "--reynolds values must be positive");
    }
    return out;
}

Rect parse_window(const std::string& text) {
    double vals[4];
    std::size_t pos = 0;
    for (int k = 0; k < 4; ++k) {
        std::size_t used = 0;
        try {
            vals[k] = std::stod(text.substr(pos), &used);
        } catch (const std::exception&) {
            raise("UsageError", "--window needs re_min,re_max,im_min,im_max");
        }
        pos += used;
        if (k < 3) {
            if (pos >= text.size() || text[pos] != ',') {
                raise("UsageError", "--window needs re_min,re_max,im_min,im_max");
            }
            ++pos;
        }
    }
    if (pos != text.size() || !(vals[0] < vals[1]) || !(vals[2] < vals[3])) {
        raise("UsageError", "--window needs re_min < re_max and im_min < im_max");
    }
    return Rect{vals[0], vals[1], vals[2], vals[3]};
}

Scheme parse_scheme(const std::string& s) {
    if (s == "chebyshev") return Scheme::chebyshev;
    if (s == "fd2") return Scheme::fd2;
    raise("UsageError", "--scheme must be 'chebyshev' or 'fd2'");
}

Registry load_effective_registry(const std::string& path) {
    if (path.empty()) return parse_registry(default_registry_text());
    return load_registry(path);
}

DiscretizedOperator build_operator(const QuadraticProfile& p, Scheme scheme,
                                   double epsilon, int n) {
    return scheme == Scheme::chebyshev ? build_chebyshev(p, epsilon, n)
                                       : build_finite_difference(p, epsilon, n);
}

int command_spectrum(const RunConfig& cfg) {
    const double reynolds = cfg.reynolds_list.front();
    const double epsilon = 1.0 / reynolds;
    const int n = cfg.n > 0 ? cfg.n : default_resolution(cfg.scheme, reynolds);

    const DiscretizedOperator op = build_operator(cfg.profile, cfg.scheme, epsilon, n);
    Spectrum spec = compute_spectrum(op, cfg.want_vectors);
    if (!cfg.no_filter) {
        const int n_hi = (3 * n + 1) / 2;
        const DiscretizedOperator op_hi =
            build_operator(cfg.profile, cfg.scheme, epsilon, n_hi);
        spec = filter_spurious(spec, compute_spectrum(op_hi, false), cfg.filter_tol);
    }
    if (cfg.conjugate) {
        for (EigenPair& e : spec.pairs) e.lambda = std::conj(e.lambda);
        detail::sort_and_flag(spec.pairs);
    }
    if (cfg.out_path.empty()) {
        std::cout << spectrum_to_json(spec, reynolds);
    } else {
        write_spectrum_json(cfg.out_path, spec, reynolds);
    }
    return 0;
}

int command_curves(const RunConfig& cfg) {
    const Registry reg = load_effective_registry(cfg.registry_path);
    AssembleOptions opts;
    opts.window = cfg.window ? *cfg.window : default_window(cfg.profile);
    const LimitGraph graph = assemble_graph(reg.conditions, cfg.profile, opts);
    const std::string out = cfg.out_path.empty() ? "graph.json" : cfg.out_path;
    write_graph_json(out, graph);
    return 0;
}

// Maps an arclength fraction of the curve to the nearest point index.
std::size_t index_at_fraction(const LimitCurve& curve, double frac) {
    const double target = std::clamp(frac, 0.0, 1.0) * curve.arclength.back();
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < curve.arclength.size(); ++k) {
        const double d = std::abs(curve.arclength[k] - target);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

const LimitCurve* longest_curve_of(const LimitGraph& graph, const std::string& id) {
    const LimitCurve* best = nullptr;
    for (const LimitCurve& c : graph.curves) {
        if (c.condition_id != id) continue;
        if (best == nullptr || c.arclength.back() > best->arclength.back()) best = &c;
    }
    return best;
}

std::vector<LoadedSpectrum> load_sweep_dir(const std::filesystem::path& dir) {
    std::vector<LoadedSpectrum> sweep;
    if (!std::filesystem::is_directory(dir)) {
        raise("IoError", "no sweep directory '" + dir.string() + "'");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("spectrum_R", 0) == 0 && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) sweep.push_back(read_spectrum_json(f));
    std::sort(sweep.begin(), sweep.end(),
              [](const LoadedSpectrum& a, const LoadedSpectrum& b) {
                  return a.reynolds < b.reynolds;
              });
    if (sweep.empty()) {
        raise("IoError", "no spectrum_R*.json files in '" + dir.string() + "'");
    }
    return sweep;
}

int command_counts(const RunConfig& cfg) {
    const Registry reg = load_effective_registry(cfg.registry_path);
    const std::filesystem::path dir = cfg.out_path.empty() ? "." : cfg.out_path;
    const std::vector<LoadedSpectrum> sweep = load_sweep_dir(dir);
    const LimitGraph graph = read_graph_json(dir / "graph.json");

    std::vector<std::string> ids;
    if (!cfg.condition_id.empty()) {
        ids.push_back(cfg.condition_id);
    } else {
        for (const CountingLaw& law : reg.laws) ids.push_back(law.condition_id);
    }
    bool wrote = false;
    for (const std::string& id : ids) {
        const CountingLaw* law = reg.find_law(id);
        if (law == nullptr) {
            raise("UsageError", "no counting law for condition '" + id + "'");
        }
        const LimitCurve* curve = longest_curve_of(graph, id);
        if (curve == nullptr || curve->points.size() < 2) continue;
        const std::size_t from = index_at_fraction(*curve, cfg.arc_from);
        const std::size_t to = index_at_fraction(*curve, cfg.arc_to);
        if (from >= to) continue;
        const CountingReport report =
            counting_report(sweep, *curve, *law, from, to, cfg.tube);
        write_counting_csv(dir / ("counting_" + id + ".csv"), report);
        wrote = true;
    }
    if (!wrote) {
        raise("EmptyGraph", "no counting law had a traced curve to count along");
    }
    return 0;
}

int command_sweep(const RunConfig& cfg) {
    SweepConfig scfg;
    scfg.profile = cfg.profile;
    scfg.reynolds_list = cfg.reynolds_list;
    scfg.scheme = cfg.scheme;
    scfg.n_override = cfg.n;
    scfg.filter_tol = cfg.filter_tol;
    scfg.want_vectors = cfg.want_vectors;
    scfg.out_dir = cfg.out_path.empty() ? "sweep" : cfg.out_path;
    run_sweep(scfg);
    return 0;
}

int command_portrait(const RunConfig& cfg) {
    const std::filesystem::path dir = cfg.out_path.empty() ? "portrait" : cfg.out_path;
    SweepConfig scfg;
    scfg.profile = cfg.profile;
    scfg.reynolds_list = cfg.reynolds_list;
    scfg.scheme = cfg.scheme;
    scfg.n_override = cfg.n;
    scfg.filter_tol = cfg.filter_tol;
    scfg.want_vectors = cfg.want_vectors;
    scfg.out_dir = dir;
    const std::vector<LoadedSpectrum> sweep = run_sweep(scfg);

    const Registry reg = load_effective_registry(cfg.registry_path);
    const Rect window = cfg.window ? *cfg.window : default_window(cfg.profile);
    AssembleOptions opts;
    opts.window = window;
    const LimitGraph graph = assemble_graph(reg.conditions, cfg.profile, opts);
    write_graph_json(dir / "graph.json", graph);

    std::vector<ConcentrationStats> rows;
    for (const LoadedSpectrum& ls : sweep) {
        rows.push_back(distance_to_graph(ls.spectrum, ls.reynolds, graph, window));
    }
    write_concentration_csv(dir / "concentration.csv", rows);

    for (const CountingLaw& law : reg.laws) {
        const LimitCurve* curve = longest_curve_of(graph, law.condition_id);
        if (curve == nullptr || curve->points.size() < 2) continue;
        const std::size_t from = index_at_fraction(*curve, cfg.arc_from);
        const std::size_t to = index_at_fraction(*curve, cfg.arc_to);
        if (from >= to) continue;
        const CountingReport report =
            counting_report(sweep, *curve, law, from, to, cfg.tube);
        write_counting_csv(dir / ("counting_" + law.condition_id + ".csv"), report);
    }

    write_svg(dir / "portrait.svg", sweep, &graph, window);
    return 0;
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
    CLI::App app{"Spectral portraits of the Orr-Sommerfeld model operator", "portrait"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string profile_text, reynolds_text = "1000", window_text, scheme_text = "chebyshev";

    auto add_common = [&](CLI::App* cmd, bool needs_reynolds) {
        cmd->add_option("--profile", profile_text,
                        "profile coefficients a,b,c of q(x) = a*x^2 + b*x + c")
            ->required();
        if (needs_reynolds) {
            cmd->add_option("--reynolds", reynolds_text,
                            "Reynolds number(s), comma-separated");
        }
        cmd->add_option("--scheme", scheme_text, "discretization: chebyshev | fd2");
        cmd->add_option("--n", cfg.n, "matrix size override");
        cmd->add_option("--filter-tol", cfg.filter_tol,
                        "two-grid spurious filter tolerance");
        cmd->add_option("--out", cfg.out_path, "output file or directory");
    };

    CLI::App* spectrum = app.add_subcommand(
        "spectrum", "compute one spectrum and write spectrum JSON");
    add_common(spectrum, true);
    spectrum->add_flag("--want-vectors", cfg.want_vectors,
                       "compute eigenvectors and residuals");
    spectrum->add_flag("--conjugate", cfg.conjugate, "emit conjugated eigenvalues");
    spectrum->add_flag("--no-filter", cfg.no_filter, "skip the two-grid filter");

    CLI::App* curves = app.add_subcommand(
        "curves", "trace the limit curves of a registry and write graph JSON");
    curves->add_option("--profile", profile_text, "profile coefficients a,b,c")
        ->required();
    curves->add_option("--registry", cfg.registry_path,
                       "registry file (default: bundled registry)");
    curves->add_option("--window", window_text, "re_min,re_max,im_min,im_max");
    curves->add_option("--out", cfg.out_path, "output graph.json path");

    CLI::App* counts = app.add_subcommand(
        "counts", "counting reports for a persisted sweep directory");
    counts->add_option("--dir", cfg.out_path, "sweep directory with spectra + graph")
        ->required();
    counts->add_option("--registry", cfg.registry_path, "registry file");
    counts->add_option("--condition", cfg.condition_id,
                       "condition id (default: every law in the registry)");
    counts->add_option("--arc", [&cfg](const std::vector<std::string>& vals) {
        const std::string& v = vals.back();
        const std::size_t comma = v.find(',');
        if (comma == std::string::npos) return false;
        try {
            cfg.arc_from = std::stod(v.substr(0, comma));
            cfg.arc_to = std::stod(v.substr(comma + 1));
        } catch (const std::exception&) {
            return false;
        }
        return true;
    }, "arc as arclength fractions from,to (default 0.1,0.7)");
    counts->add_option("--tube", cfg.tube, "counting tube radius");

    CLI::App* sweep = app.add_subcommand(
        "sweep", "run a Reynolds sweep and persist filtered spectra");
    add_common(sweep, true);
    sweep->add_flag("--want-vectors", cfg.want_vectors,
                    "compute eigenvectors and residuals");

    CLI::App* portrait = app.add_subcommand(
        "portrait", "sweep + curves + counts + SVG portrait in one directory");
    add_common(portrait, true);
    portrait->add_option("--registry", cfg.registry_path, "registry file");
    portrait->add_option("--window", window_text, "re_min,re_max,im_min,im_max");
    portrait->add_option("--tube", cfg.tube, "counting tube radius");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // CLI11 reports --help (and friends) as a zero-code ParseError;
            // print the contextual help text and unwind as a non-error.
            app.exit(e);
            raise("HelpRequest", "help requested");
        }
        raise("UsageError", e.what());
    }

    if (spectrum->parsed()) cfg.command = RunConfig::Command::spectrum;
    if (curves->parsed()) cfg.command = RunConfig::Command::curves;
    if (counts->parsed()) cfg.command = RunConfig::Command::counts;
    if (sweep->parsed()) cfg.command = RunConfig::Command::sweep;
    if (portrait->parsed()) cfg.command = RunConfig::Command::portrait;

    if (cfg.command != RunConfig::Command::counts) {
        cfg.profile = parse_profile(profile_text);
    }
    if (cfg.command == RunConfig::Command::spectrum ||
        cfg.command == RunConfig::Command::sweep ||
        cfg.command == RunConfig::Command::portrait) {
        cfg.reynolds_list = parse_reynolds_list(reynolds_text);
        cfg.scheme = parse_scheme(scheme_text);
        std::sort(cfg.reynolds_list.begin(), cfg.reynolds_list.end());
        cfg.reynolds_list.erase(
            std::unique(cfg.reynolds_list.begin(), cfg.reynolds_list.end()),
            cfg.reynolds_list.end());
    }
    if (cfg.command == RunConfig::Command::spectrum && cfg.reynolds_list.size() != 1) {
        raise("UsageError", "spectrum takes a single --reynolds value");
    }
    if (!window_text.empty()) cfg.window = parse_window(window_text);
    if (cfg.n != 0 && cfg.n < 4) raise("UsageError", "--n must be at least 4");
    if (!(cfg.tube > 0.0)) raise("UsageError", "--tube must be positive");
    return cfg;
}

int run_command(const RunConfig& cfg) {
    switch (cfg.command) {
        case RunConfig::Command::spectrum: return command_spectrum(cfg);
        case RunConfig::Command::curves: return command_curves(cfg);
        case RunConfig::Command::counts: return command_counts(cfg);
        case RunConfig::Command::sweep: return command_sweep(cfg);
        case RunConfig::Command::portrait: return command_portrait(cfg);
    }
    return 2;
}

int cli_main(const std::vector<std::string>& args) {
    try {
        return run_command(parse_args(args));
    } catch (const Error& e) {
        const std::string& name = e.name();
        if (name == "HelpRequest") return 0;
        std::cerr << e.what() << "\n";
        if (name == "UsageError" || name == "RegistryParse" || name == "InvalidConfig") {
            return 2;
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "InternalError: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace osp
