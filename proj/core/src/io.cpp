#include "osp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "osp/errors.hpp"

namespace osp {

namespace {

constexpr const char* kSpectrumSchema = "os-portrait/spectrum/1";
constexpr const char* kGraphSchema = "os-portrait/graph/1";

const char* scheme_name(Scheme s) {
    return s == Scheme::chebyshev ? "chebyshev" : "fd2";
}

Scheme scheme_from(const std::string& s) {
    if (s == "chebyshev") return Scheme::chebyshev;
    if (s == "fd2") return Scheme::fd2;
    raise("SchemaMismatch", "unknown scheme '" + s + "'");
}

using nlohmann::json;

json must_parse(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        raise("SchemaMismatch", std::string("not valid JSON: ") + what);
    }
    return j;
}

void check_schema(const json& j, const char* tag, const char* what) {
    if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string() ||
        j["schema"].get<std::string>() != tag) {
        raise("SchemaMismatch", std::string("expected schema \"") + tag + "\" in " + what);
    }
}

double num(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        raise("SchemaMismatch", std::string("missing numeric field '") + key + "'");
    }
    return j[key].get<double>();
}

}  // namespace

std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string spectrum_to_json(const Spectrum& s, double reynolds) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"schema\": \"" << kSpectrumSchema << "\",\n";
    out << "  \"profile\": {\"a\": " << format_float(s.profile.a)
        << ", \"b\": " << format_float(s.profile.b)
        << ", \"c\": " << format_float(s.profile.c) << "},\n";
    out << "  \"epsilon\": " << format_float(s.epsilon) << ",\n";
    out << "  \"reynolds\": " << format_float(reynolds) << ",\n";
    out << "  \"scheme\": \"" << scheme_name(s.scheme) << "\",\n";
    out << "  \"n\": " << s.n << ",\n";
    out << "  \"eigenvalues\": [";
    for (std::size_t k = 0; k < s.pairs.size(); ++k) {
        out << (k == 0 ? "\n" : ",\n");
        const EigenPair& e = s.pairs[k];
        out << "    {\"re\": " << format_float(e.lambda.real())
            << ", \"im\": " << format_float(e.lambda.imag()) << ", \"residual\": ";
        if (e.residual) {
            out << format_float(*e.residual);
        } else {
            out << "null";
        }
        out << "}";
    }
    out << (s.pairs.empty() ? "]\n" : "\n  ]\n");
    out << "}\n";
    return out.str();
}

LoadedSpectrum parse_spectrum_json(const std::string& text) {
    const json j = must_parse(text, "spectrum");
    check_schema(j, kSpectrumSchema, "spectrum");

    LoadedSpectrum out;
    if (!j.contains("profile") || !j["profile"].is_object()) {
        raise("SchemaMismatch", "missing profile object");
    }
    out.spectrum.profile.a = num(j["profile"], "a");
    out.spectrum.profile.b = num(j["profile"], "b");
    out.spectrum.profile.c = num(j["profile"], "c");
    out.spectrum.epsilon = num(j, "epsilon");
    out.reynolds = num(j, "reynolds");
    if (!j.contains("scheme") || !j["scheme"].is_string()) {
        raise("SchemaMismatch", "missing scheme");
    }
    out.spectrum.scheme = scheme_from(j["scheme"].get<std::string>());
    out.spectrum.n = static_cast<int>(num(j, "n"));
    if (!j.contains("eigenvalues") || !j["eigenvalues"].is_array()) {
        raise("SchemaMismatch", "missing eigenvalues array");
    }
    for (const json& e : j["eigenvalues"]) {
        EigenPair pair;
        pair.lambda = Complex(num(e, "re"), num(e, "im"));
        if (e.contains("residual") && e["residual"].is_number()) {
            pair.residual = e["residual"].get<double>();
        }
        out.spectrum.pairs.push_back(std::move(pair));
    }
    detail::sort_and_flag(out.spectrum.pairs);
    return out;
}

void write_spectrum_json(const std::filesystem::path& path, const Spectrum& s,
                         double reynolds) {
    write_text_file(path, spectrum_to_json(s, reynolds));
}

LoadedSpectrum read_spectrum_json(const std::filesystem::path& path) {
    return parse_spectrum_json(read_text_file(path));
}

namespace {

void emit_complex_array(std::ostringstream& out, const std::vector<Complex>& pts,
                        const char* indent) {
    out << "[";
    for (std::size_t k = 0; k < pts.size(); ++k) {
        out << (k == 0 ? "\n" : ",\n") << indent << "[" << format_float(pts[k].real())
            << ", " << format_float(pts[k].imag()) << "]";
    }
    out << "]";
}

std::vector<Complex> parse_complex_array(const json& arr, const char* what) {
    if (!arr.is_array()) raise("SchemaMismatch", std::string(what) + " must be an array");
    std::vector<Complex> out;
    for (const json& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            raise("SchemaMismatch", std::string(what) + " entries must be [re, im]");
        }
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
}

}  // namespace

std::string graph_to_json(const LimitGraph& g) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"schema\": \"" << kGraphSchema << "\",\n";
    out << "  \"profile\": {\"a\": " << format_float(g.profile.a)
        << ", \"b\": " << format_float(g.profile.b)
        << ", \"c\": " << format_float(g.profile.c) << "},\n";
    out << "  \"curves\": [";
    for (std::size_t k = 0; k < g.curves.size(); ++k) {
        const LimitCurve& c = g.curves[k];
        out << (k == 0 ? "\n" : ",\n");
        out << "    {\n      \"condition\": \"" << c.condition_id << "\",\n";
        out << "      \"points\": ";
        emit_complex_array(out, c.points, "        ");
        out << ",\n      \"arclength\": [";
        for (std::size_t m = 0; m < c.arclength.size(); ++m) {
            out << (m == 0 ? "" : ", ") << format_float(c.arclength[m]);
        }
        out << "],\n      \"action\": ";
        emit_complex_array(out, c.action, "        ");
        out << "\n    }";
    }
    out << (g.curves.empty() ? "],\n" : "\n  ],\n");
    out << "  \"vertices\": ";
    {
        std::ostringstream tmp;
        emit_complex_array(tmp, g.vertices, "    ");
        out << tmp.str();
    }
    out << ",\n  \"untraced\": [";
    for (std::size_t k = 0; k < g.untraced.size(); ++k) {
        out << (k == 0 ? "" : ", ") << "\"" << g.untraced[k] << "\"";
    }
    out << "]\n}\n";
    return out.str();
}

LimitGraph parse_graph_json(const std::string& text) {
    const json j = must_parse(text, "graph");
    check_schema(j, kGraphSchema, "graph");

    LimitGraph g;
    if (!j.contains("profile") || !j["profile"].is_object()) {
        raise("SchemaMismatch", "missing profile object");
    }
    g.profile.a = num(j["profile"], "a");
    g.profile.b = num(j["profile"], "b");
    g.profile.c = num(j["profile"], "c");
    if (!j.contains("curves") || !j["curves"].is_array()) {
        raise("SchemaMismatch", "missing curves array");
    }
    for (const json& c : j["curves"]) {
        LimitCurve curve;
        if (!c.contains("condition") || !c["condition"].is_string()) {
            raise("SchemaMismatch", "curve missing condition id");
        }
        curve.condition_id = c["condition"].get<std::string>();
        curve.points = parse_complex_array(c.value("points", json::array()), "points");
        curve.action = parse_complex_array(c.value("action", json::array()), "action");
        if (!c.contains("arclength") || !c["arclength"].is_array()) {
            raise("SchemaMismatch", "curve missing arclength");
        }
        for (const json& a : c["arclength"]) {
            if (!a.is_number()) raise("SchemaMismatch", "arclength entries must be numbers");
            curve.arclength.push_back(a.get<double>());
        }
        if (curve.arclength.size() != curve.points.size() ||
            curve.action.size() != curve.points.size()) {
            raise("SchemaMismatch", "curve arrays must have equal length");
        }
        g.curves.push_back(std::move(curve));
    }
    g.vertices = parse_complex_array(j.value("vertices", json::array()), "vertices");
    if (j.contains("untraced")) {
        for (const json& u : j["untraced"]) {
            if (!u.is_string()) raise("SchemaMismatch", "untraced entries must be strings");
            g.untraced.push_back(u.get<std::string>());
        }
    }
    return g;
}

void write_graph_json(const std::filesystem::path& path, const LimitGraph& g) {
    write_text_file(path, graph_to_json(g));
}

LimitGraph read_graph_json(const std::filesystem::path& path) {
    return parse_graph_json(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise("IoError", "cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) raise("IoError", "read failure on '" + path.string() + "'");
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise("IoError", "cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) raise("IoError", "write failure on '" + path.string() + "'");
}

}  // namespace osp
