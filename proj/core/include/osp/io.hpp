#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "osp/eigensolve.hpp"
#include "osp/graph.hpp"

namespace osp {

// Deterministic float formatting: 17 significant digits, lossless round-trip.
std::string format_float(double v);

struct LoadedSpectrum {
    Spectrum spectrum;
    double reynolds = 0.0;
};

// Schema "os-portrait/spectrum/1". Eigenvalue residuals are serialized as
// null when the eigenvector (and hence the backward error) was not computed.
std::string spectrum_to_json(const Spectrum& s, double reynolds);
LoadedSpectrum parse_spectrum_json(const std::string& text);
void write_spectrum_json(const std::filesystem::path& path, const Spectrum& s,
                         double reynolds);
LoadedSpectrum read_spectrum_json(const std::filesystem::path& path);

// Schema "os-portrait/graph/1".
std::string graph_to_json(const LimitGraph& g);
LimitGraph parse_graph_json(const std::string& text);
void write_graph_json(const std::filesystem::path& path, const LimitGraph& g);
LimitGraph read_graph_json(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace osp
