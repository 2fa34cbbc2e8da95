#include "osp/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "osp/errors.hpp"

namespace osp {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Tick positions at a "nice" spacing (1/2/5 times a power of ten).
std::vector<double> nice_ticks(double lo, double hi, int target) {
    std::vector<double> ticks;
    if (!(hi > lo) || target < 2) return ticks;
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    const double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + 0.5 * step; t += step) {
        const double v = (std::abs(t) < 1e-12 * step) ? 0.0 : t;
        ticks.push_back(v);
        if (ticks.size() > 32) break;
    }
    return ticks;
}

}  // namespace

std::string render_svg(const std::vector<LoadedSpectrum>& spectra,
                       const LimitGraph* graph, const Rect& window,
                       const SvgOptions& opts) {
    bool any_spectrum = false;
    for (const LoadedSpectrum& s : spectra) any_spectrum |= !s.spectrum.pairs.empty();
    const bool any_graph = graph != nullptr && !graph->curves.empty();
    if (!any_spectrum && !any_graph) {
        raise("IoError", "nothing to draw: no eigenvalues and no curves");
    }
    if (!(window.re_max > window.re_min) || !(window.im_max > window.im_min)) {
        raise("IoError", "degenerate window");
    }

    const double ml = 72, mr = 24, mt = 24, mb = 56;
    const double pw = opts.width - ml - mr;
    const double ph = opts.height - mt - mb;
    auto map_x = [&](double re) {
        return ml + (re - window.re_min) / (window.re_max - window.re_min) * pw;
    };
    auto map_y = [&](double im) {
        return mt + (window.im_max - im) / (window.im_max - window.im_min) * ph;
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width
        << "\" height=\"" << opts.height << "\" viewBox=\"0 0 " << opts.width << " "
        << opts.height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << opts.width << "\" height=\""
        << opts.height << "\" fill=\"#ffffff\"/>\n";
    out << "<clipPath id=\"plot\"><rect x=\"" << px(ml) << "\" y=\"" << px(mt)
        << "\" width=\"" << px(pw) << "\" height=\"" << px(ph)
        << "\"/></clipPath>\n";

    // Axes frame and ticks.
    out << "<rect x=\"" << px(ml) << "\" y=\"" << px(mt) << "\" width=\"" << px(pw)
        << "\" height=\"" << px(ph)
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    for (double t : nice_ticks(window.re_min, window.re_max, 8)) {
        const double x = map_x(t);
        out << "<line x1=\"" << px(x) << "\" y1=\"" << px(mt + ph) << "\" x2=\""
            << px(x) << "\" y2=\"" << px(mt + ph + 5)
            << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << px(x) << "\" y=\"" << px(mt + ph + 18)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\" "
               "text-anchor=\"middle\">"
            << tick_label(t) << "</text>\n";
    }
    for (double t : nice_ticks(window.im_min, window.im_max, 8)) {
        const double y = map_y(t);
        out << "<line x1=\"" << px(ml - 5) << "\" y1=\"" << px(y) << "\" x2=\""
            << px(ml) << "\" y2=\"" << px(y)
            << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << px(ml - 8) << "\" y=\"" << px(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\" "
               "text-anchor=\"end\">"
            << tick_label(t) << "</text>\n";
    }
    out << "<text x=\"" << px(ml + pw / 2) << "\" y=\"" << px(mt + ph + 40)
        << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#333333\" "
           "text-anchor=\"middle\">Re &#955;</text>\n";
    out << "<text x=\"" << px(16) << "\" y=\"" << px(mt + ph / 2)
        << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#333333\" "
           "text-anchor=\"middle\" transform=\"rotate(-90 16 " << px(mt + ph / 2)
        << ")\">Im &#955;</text>\n";

    out << "<g clip-path=\"url(#plot)\">\n";
    if (any_graph) {
        for (const LimitCurve& c : graph->curves) {
            if (c.points.size() < 2) continue;
            out << "<polyline fill=\"none\" stroke=\"#222222\" stroke-width=\"1.5\" "
                   "points=\"";
            for (std::size_t k = 0; k < c.points.size(); ++k) {
                if (k) out << " ";
                out << px(map_x(c.points[k].real())) << ","
                    << px(map_y(c.points[k].imag()));
            }
            out << "\"><title>" << xml_escape(c.condition_id) << "</title></polyline>\n";
        }
        for (const Complex& v : graph->vertices) {
            const double x = map_x(v.real()), y = map_y(v.imag());
            out << "<line x1=\"" << px(x - 5) << "\" y1=\"" << px(y) << "\" x2=\""
                << px(x + 5) << "\" y2=\"" << px(y)
                << "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
            out << "<line x1=\"" << px(x) << "\" y1=\"" << px(y - 5) << "\" x2=\""
                << px(x) << "\" y2=\"" << px(y + 5)
                << "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
        }
    }
    for (std::size_t s = 0; s < spectra.size(); ++s) {
        const char* color = kPalette[s % kPaletteSize];
        for (const EigenPair& e : spectra[s].spectrum.pairs) {
            if (!window.contains(e.lambda)) continue;
            out << "<circle cx=\"" << px(map_x(e.lambda.real())) << "\" cy=\""
                << px(map_y(e.lambda.imag())) << "\" r=\"2.5\" fill=\"" << color
                << "\" fill-opacity=\"0.85\"/>\n";
        }
    }
    out << "</g>\n";

    // Legend: one row per spectrum.
    for (std::size_t s = 0; s < spectra.size(); ++s) {
        const char* color = kPalette[s % kPaletteSize];
        const double y = mt + 16 + 18 * static_cast<double>(s);
        out << "<circle cx=\"" << px(ml + pw - 120) << "\" cy=\"" << px(y - 4)
            << "\" r=\"4\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << px(ml + pw - 110) << "\" y=\"" << px(y)
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">R = "
            << tick_label(spectra[s].reynolds) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_svg(const std::filesystem::path& path,
               const std::vector<LoadedSpectrum>& spectra, const LimitGraph* graph,
               const Rect& window, const SvgOptions& opts) {
    write_text_file(path, render_svg(spectra, graph, window, opts));
}

}  // namespace osp
