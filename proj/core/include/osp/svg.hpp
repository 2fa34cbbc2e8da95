#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "osp/io.hpp"

namespace osp {

struct SvgOptions {
    int width = 960;
    int height = 720;
};

// Standalone deterministic SVG: eigenvalues as filled circles (one color per
// Reynolds number, with a legend), limit curves as polylines, vertices as
// crosses, axes with tick labels in lambda-plane coordinates. At least one of
// spectra/graph must be non-empty (IoError otherwise). `graph` may be null.
std::string render_svg(const std::vector<LoadedSpectrum>& spectra,
                       const LimitGraph* graph, const Rect& window,
                       const SvgOptions& opts = {});

void write_svg(const std::filesystem::path& path,
               const std::vector<LoadedSpectrum>& spectra, const LimitGraph* graph,
               const Rect& window, const SvgOptions& opts = {});

}  // namespace osp
