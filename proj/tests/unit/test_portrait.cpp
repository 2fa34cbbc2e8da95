#include <doctest.h>

#include <complex>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "osp/errors.hpp"
#include "osp/io.hpp"
#include "osp/portrait.hpp"

namespace fs = std::filesystem;
using osp::Complex;

namespace {

// A vertical segment from the origin to -2i with unit-speed arclength and an
// action whose imaginary part equals the arclength, so counting predictions
// have the closed form (kappa / h) * |s_to - s_from|.
osp::LimitCurve vertical_curve() {
    osp::LimitCurve c;
    c.condition_id = "stem";
    c.points = {Complex(0.0, 0.0), Complex(0.0, -1.0), Complex(0.0, -2.0)};
    c.arclength = {0.0, 1.0, 2.0};
    c.action = {Complex(0.0, 0.0), Complex(0.0, 1.0), Complex(0.0, 2.0)};
    return c;
}

osp::LimitGraph graph_around(const osp::LimitCurve& curve) {
    osp::LimitGraph g;
    g.profile = {1.0, 0.0, 0.0};
    g.curves.push_back(curve);
    return g;
}

osp::Spectrum spectrum_of(const std::vector<Complex>& lambdas, double epsilon) {
    osp::Spectrum s;
    s.profile = {1.0, 0.0, 0.0};
    s.scheme = osp::Scheme::fd2;
    s.epsilon = epsilon;
    s.n = static_cast<int>(lambdas.size());
    for (Complex l : lambdas) {
        osp::EigenPair e;
        e.lambda = l;
        s.pairs.push_back(e);
    }
    osp::detail::sort_and_flag(s.pairs);
    return s;
}

template <typename Fn>
std::string error_name_of(Fn&& fn) {
    try {
        fn();
    } catch (const osp::Error& e) {
        return e.name();
    }
    return "";
}

fs::path fresh_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / "osp_portrait_tests" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("default window brackets the profile range with fixed margins") {
    const osp::Rect sq = osp::default_window({1.0, 0.0, 0.0});  // q = x^2 on [0, 1]
    CHECK(sq.re_min == doctest::Approx(-0.1).epsilon(1e-15));
    CHECK(sq.re_max == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(sq.im_min == doctest::Approx(-1.6).epsilon(1e-15));
    CHECK(sq.im_max == 0.0);

    const osp::Rect lin = osp::default_window({0.0, 1.0, 0.0});  // q = x on [-1, 1]
    CHECK(lin.re_min == doctest::Approx(-1.1).epsilon(1e-15));
    CHECK(lin.re_max == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(lin.im_min == doctest::Approx(-3.1).epsilon(1e-15));

    const osp::Rect flat = osp::default_window({0.0, 0.0, 2.0});  // constant q = 2
    CHECK(flat.re_min == doctest::Approx(1.9).epsilon(1e-15));
    CHECK(flat.re_max == doctest::Approx(2.1).epsilon(1e-15));
    CHECK(flat.im_min == doctest::Approx(-0.1).epsilon(1e-15));
}

TEST_CASE("distance_to_graph reports statistics over the windowed eigenvalues") {
    const osp::LimitGraph graph = graph_around(vertical_curve());
    const osp::Rect window{-1.0, 1.0, -2.0, 0.0};
    // In window: distances 0.3 and 0.01. Outside: one far, one above the axis.
    const osp::Spectrum spec = spectrum_of(
        {Complex(0.3, -0.5), Complex(0.01, -1.5), Complex(5.0, -5.0),
         Complex(0.0, 0.5)},
        0.01);

    const osp::ConcentrationStats stats =
        osp::distance_to_graph(spec, 100.0, graph, window);
    CHECK(stats.reynolds == 100.0);
    CHECK(stats.counted == 2);
    REQUIRE(stats.max_distance.has_value());
    REQUIRE(stats.mean_distance.has_value());
    CHECK(*stats.max_distance == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(*stats.mean_distance == doctest::Approx(0.155).epsilon(1e-12));

    SUBCASE("empty window leaves the optional statistics absent") {
        const osp::ConcentrationStats none =
            osp::distance_to_graph(spec, 100.0, graph, {10.0, 11.0, -1.0, 0.0});
        CHECK(none.counted == 0);
        CHECK_FALSE(none.max_distance.has_value());
        CHECK_FALSE(none.mean_distance.has_value());
    }

    SUBCASE("a graph without curves is rejected") {
        osp::LimitGraph empty;
        empty.profile = {1.0, 0.0, 0.0};
        CHECK(error_name_of([&] {
                  osp::distance_to_graph(spec, 100.0, empty, window);
              }) == "EmptyGraph");
    }
}

TEST_CASE("min_distance_to_graph measures point-to-polyline distance") {
    const osp::LimitGraph graph = graph_around(vertical_curve());
    CHECK(osp::min_distance_to_graph(Complex(0.3, -0.5), graph) ==
          doctest::Approx(0.3).epsilon(1e-12));
    // Beyond the last point the distance is to the endpoint, not the line.
    CHECK(osp::min_distance_to_graph(Complex(0.0, -3.0), graph) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(osp::min_distance_to_graph(Complex(0.5, -2.5), graph) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("empirical_count respects the tube radius and the arc bounds") {
    const osp::LimitCurve curve = vertical_curve();
    // Nearest positions: 1.5, 0.5, 1.0, and 2.0 (clamped to the endpoint);
    // distances: 0.01, 0.04, 0.2, 0.4.
    const osp::Spectrum spec = spectrum_of(
        {Complex(0.01, -1.5), Complex(0.04, -0.5), Complex(0.2, -1.0),
         Complex(0.0, -2.4)},
        0.01);

    CHECK(osp::empirical_count(spec, curve, 0, 2, 0.05) == 2);
    CHECK(osp::empirical_count(spec, curve, 1, 2, 0.05) == 1);  // arc s in [1, 2]
    CHECK(osp::empirical_count(spec, curve, 0, 2, 0.25) == 3);
    CHECK(osp::empirical_count(spec, curve, 0, 2, 0.5) == 4);
    // A single-point arc still counts eigenvalues projecting exactly there.
    CHECK(osp::empirical_count(spec, curve, 2, 2, 0.5) == 1);

    CHECK(error_name_of([&] { osp::empirical_count(spec, curve, 0, 3, 0.1); }) ==
          "IndexOutOfRange");
    CHECK(error_name_of([&] { osp::empirical_count(spec, curve, 2, 1, 0.1); }) ==
          "IndexOutOfRange");
}

TEST_CASE("counting_report fits empirical counts against sqrt(R)") {
    const osp::LimitCurve curve = vertical_curve();
    const osp::CountingLaw law{"stem", M_1_PI, osp::CountPart::imag};

    // Eigenvalues sit exactly on the curve, m per sweep entry, with
    // m ~ predicted = 2 kappa / h. Passed out of order on purpose.
    auto frame = [](int m, double reynolds) {
        std::vector<Complex> lambdas;
        for (int j = 0; j < m; ++j) {
            lambdas.emplace_back(0.0, -2.0 * (j + 0.5) / m);
        }
        return osp::LoadedSpectrum{spectrum_of(lambdas, 1.0 / reynolds), reynolds};
    };
    const std::vector<osp::LoadedSpectrum> sweep = {
        frame(19, 900.0), frame(6, 100.0), frame(13, 400.0)};

    const osp::CountingReport report =
        osp::counting_report(sweep, curve, law, 0, 2, 0.01);
    CHECK(report.condition_id == "stem");
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].reynolds == 100.0);  // rows come back sorted by R
    CHECK(report.rows[1].reynolds == 400.0);
    CHECK(report.rows[2].reynolds == 900.0);
    CHECK(report.rows[0].empirical == 6);
    CHECK(report.rows[1].empirical == 13);
    CHECK(report.rows[2].empirical == 19);
    for (const osp::CountingRow& row : report.rows) {
        const double h = std::sqrt(1.0 / row.reynolds);
        CHECK(row.predicted == doctest::Approx(2.0 * M_1_PI / h).epsilon(1e-12));
    }
    REQUIRE(report.fit_slope.has_value());
    REQUIRE(report.fit_r2.has_value());
    CHECK(*report.fit_slope == doctest::Approx(2.0 / M_PI).epsilon(0.01));
    CHECK(*report.fit_r2 > 0.99);

    SUBCASE("fewer than three rows yields no fit") {
        const std::vector<osp::LoadedSpectrum> two = {frame(6, 100.0),
                                                      frame(13, 400.0)};
        const osp::CountingReport short_report =
            osp::counting_report(two, curve, law, 0, 2, 0.01);
        CHECK(short_report.rows.size() == 2);
        CHECK_FALSE(short_report.fit_slope.has_value());
        CHECK_FALSE(short_report.fit_r2.has_value());
    }

    SUBCASE("an empty sweep is rejected") {
        CHECK(error_name_of([&] {
                  osp::counting_report({}, curve, law, 0, 2, 0.01);
              }) == "InvalidConfig");
    }
}

TEST_CASE("run_sweep validates its configuration") {
    osp::SweepConfig cfg;
    cfg.profile = {1.0, 0.0, 0.0};
    cfg.n_override = 48;

    cfg.reynolds_list = {};
    CHECK(error_name_of([&] { osp::run_sweep(cfg); }) == "InvalidConfig");
    cfg.reynolds_list = {100.0, 100.0};
    CHECK(error_name_of([&] { osp::run_sweep(cfg); }) == "InvalidConfig");
    cfg.reynolds_list = {-5.0};
    CHECK(error_name_of([&] { osp::run_sweep(cfg); }) == "InvalidConfig");
}

TEST_CASE("run_sweep persists spectra and reruns are byte-identical") {
    osp::SweepConfig cfg;
    cfg.profile = {1.0, 0.0, 0.0};
    cfg.scheme = osp::Scheme::chebyshev;
    cfg.n_override = 48;
    cfg.reynolds_list = {50.0, 80.0};

    cfg.out_dir = fresh_dir("a");
    const std::vector<osp::LoadedSpectrum> results = osp::run_sweep(cfg);
    REQUIRE(results.size() == 2);
    CHECK(results[0].reynolds == 50.0);
    CHECK(results[1].reynolds == 80.0);
    CHECK(results[0].spectrum.n == 48);
    CHECK(results[0].spectrum.epsilon == 1.0 / 50.0);
    CHECK(results[0].spectrum.pairs.size() > 0);

    const fs::path file50 = cfg.out_dir / "spectrum_R50.json";
    const fs::path file80 = cfg.out_dir / "spectrum_R80.json";
    REQUIRE(fs::exists(file50));
    REQUIRE(fs::exists(file80));
    const osp::LoadedSpectrum reread = osp::read_spectrum_json(file50);
    CHECK(reread.reynolds == 50.0);
    CHECK(reread.spectrum.pairs.size() == results[0].spectrum.pairs.size());

    osp::SweepConfig again = cfg;
    again.out_dir = fresh_dir("b");
    osp::run_sweep(again);
    CHECK(osp::read_text_file(file50) ==
          osp::read_text_file(again.out_dir / "spectrum_R50.json"));
    CHECK(osp::read_text_file(file80) ==
          osp::read_text_file(again.out_dir / "spectrum_R80.json"));
}

TEST_CASE("run_sweep resumes from matching cached spectra and replaces stale ones") {
    osp::SweepConfig cfg;
    cfg.profile = {1.0, 0.0, 0.0};
    cfg.scheme = osp::Scheme::chebyshev;
    cfg.n_override = 48;
    cfg.reynolds_list = {50.0};

    SUBCASE("a cache entry with matching metadata short-circuits the solve") {
        cfg.out_dir = fresh_dir("c");
        osp::Spectrum fake;
        fake.profile = cfg.profile;
        fake.scheme = cfg.scheme;
        fake.epsilon = 1.0 / 50.0;
        fake.n = 48;
        osp::EigenPair marker;
        marker.lambda = Complex(42.0, -42.0);
        fake.pairs.push_back(marker);
        osp::write_spectrum_json(cfg.out_dir / "spectrum_R50.json", fake, 50.0);

        const std::vector<osp::LoadedSpectrum> out = osp::run_sweep(cfg);
        REQUIRE(out.size() == 1);
        REQUIRE(out[0].spectrum.pairs.size() == 1);
        CHECK(out[0].spectrum.pairs[0].lambda == Complex(42.0, -42.0));
    }

    SUBCASE("a cache entry with the wrong resolution is recomputed and overwritten") {
        cfg.out_dir = fresh_dir("d");
        osp::Spectrum stale;
        stale.profile = cfg.profile;
        stale.scheme = cfg.scheme;
        stale.epsilon = 1.0 / 50.0;
        stale.n = 12;  // does not match n_override
        osp::EigenPair marker;
        marker.lambda = Complex(42.0, -42.0);
        stale.pairs.push_back(marker);
        osp::write_spectrum_json(cfg.out_dir / "spectrum_R50.json", stale, 50.0);

        const std::vector<osp::LoadedSpectrum> out = osp::run_sweep(cfg);
        REQUIRE(out.size() == 1);
        CHECK(out[0].spectrum.n == 48);
        CHECK(out[0].spectrum.pairs.size() > 1);
        const osp::LoadedSpectrum on_disk =
            osp::read_spectrum_json(cfg.out_dir / "spectrum_R50.json");
        CHECK(on_disk.spectrum.n == 48);
    }
}

TEST_CASE("track_trajectories follows eigenvalues across sweep entries") {
    const osp::Rect window{-1.0, 1.0, -2.0, 0.0};
    const std::vector<osp::LoadedSpectrum> sweep = {
        {spectrum_of({Complex(0.0, -0.5), Complex(0.5, -1.0)}, 1.0 / 100.0), 100.0},
        {spectrum_of({Complex(0.02, -0.52), Complex(0.5, -1.01), Complex(-0.5, -1.5)},
                     1.0 / 200.0),
         200.0},
        {spectrum_of({Complex(0.04, -0.54), Complex(0.5, -1.02), Complex(-0.5, -1.49),
                      Complex(3.0, -3.0)},
                     1.0 / 400.0),
         400.0},
    };

    const std::vector<osp::Trajectory> paths =
        osp::track_trajectories(sweep, window);
    REQUIRE(paths.size() == 3);  // the out-of-window eigenvalue starts nothing

    auto path_starting = [&](Complex first) -> const osp::Trajectory* {
        for (const osp::Trajectory& t : paths) {
            if (std::abs(t.lambdas.front() - first) < 1e-12) return &t;
        }
        return nullptr;
    };

    const osp::Trajectory* near_axis = path_starting(Complex(0.0, -0.5));
    REQUIRE(near_axis != nullptr);
    CHECK(near_axis->first_index == 0);
    REQUIRE(near_axis->lambdas.size() == 3);
    CHECK(near_axis->lambdas[1] == Complex(0.02, -0.52));
    CHECK(near_axis->lambdas[2] == Complex(0.04, -0.54));

    const osp::Trajectory* steady = path_starting(Complex(0.5, -1.0));
    REQUIRE(steady != nullptr);
    CHECK(steady->lambdas.size() == 3);

    const osp::Trajectory* newborn = path_starting(Complex(-0.5, -1.5));
    REQUIRE(newborn != nullptr);
    CHECK(newborn->first_index == 1);
    REQUIRE(newborn->lambdas.size() == 2);
    CHECK(newborn->lambdas[1] == Complex(-0.5, -1.49));
}

TEST_CASE("worker_count reads OS_PORTRAIT_WORKERS with clamping") {
    const char* saved = std::getenv("OS_PORTRAIT_WORKERS");
    const std::string saved_value = saved != nullptr ? saved : "";

    unsetenv("OS_PORTRAIT_WORKERS");
    CHECK(osp::worker_count() == 1);
    setenv("OS_PORTRAIT_WORKERS", "", 1);
    CHECK(osp::worker_count() == 1);
    setenv("OS_PORTRAIT_WORKERS", "0", 1);
    CHECK(osp::worker_count() == 1);
    setenv("OS_PORTRAIT_WORKERS", "8", 1);
    CHECK(osp::worker_count() == 8);
    setenv("OS_PORTRAIT_WORKERS", "100", 1);
    CHECK(osp::worker_count() == 64);
    setenv("OS_PORTRAIT_WORKERS", "junk", 1);
    CHECK(osp::worker_count() == 1);

    if (saved != nullptr) {
        setenv("OS_PORTRAIT_WORKERS", saved_value.c_str(), 1);
    } else {
        unsetenv("OS_PORTRAIT_WORKERS");
    }
}

TEST_CASE("csv writers emit fixed headers and nan placeholders") {
    const fs::path dir = fresh_dir("csv");

    std::vector<osp::ConcentrationStats> stats(2);
    stats[0].reynolds = 100.0;
    stats[0].max_distance = 0.5;
    stats[0].mean_distance = 0.25;
    stats[0].counted = 3;
    stats[1].reynolds = 200.0;  // optionals left empty
    osp::write_concentration_csv(dir / "concentration.csv", stats);
    CHECK(osp::read_text_file(dir / "concentration.csv") ==
          "reynolds,max_distance,mean_distance,counted\n"
          "100,0.5,0.25,3\n"
          "200,nan,nan,0\n");

    osp::CountingReport report;
    report.condition_id = "stem";
    report.rows.push_back({100.0, 6, 6.5});
    report.rows.push_back({400.0, 13, 12.75});
    osp::write_counting_csv(dir / "counting.csv", report);
    CHECK(osp::read_text_file(dir / "counting.csv") ==
          "reynolds,empirical,predicted\n"
          "100,6,6.5\n"
          "400,13,12.75\n");
}
