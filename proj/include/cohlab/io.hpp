#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cohlab/channels.hpp"
#include "cohlab/complex_matrix.hpp"
#include "cohlab/errors.hpp"
#include "cohlab/states.hpp"

namespace cohlab {

using nlohmann::json;

/// Matrix wire format: {"rows": r, "cols": c, "entries": [[re, im], ...]},
/// entries row-major, numbers as IEEE-754 doubles.
inline json matrix_to_json(const ComplexMatrix& m) {
    json entries = json::array();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            entries.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline ComplexMatrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
        throw IoError("matrix JSON needs fields rows, cols, entries");
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    const json& entries = j.at("entries");
    if (rows < 0 || cols < 0 || !entries.is_array() ||
        static_cast<int>(entries.size()) != rows * cols)
        throw IoError("matrix JSON entry count does not match rows*cols");
    ComplexMatrix m(rows, cols);
    int idx = 0;
    for (int i = 0; i < rows; ++i)
        for (int j2 = 0; j2 < cols; ++j2, ++idx) {
            const json& e = entries.at(static_cast<size_t>(idx));
            if (!e.is_array() || e.size() != 2) throw IoError("matrix JSON entries must be [re, im]");
            m(i, j2) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
        }
    return m;
}

/// State wire format: the matrix schema plus "kind". Density states carry the
/// full d x d matrix; pure states a d x 1 amplitude column; diagonal states a
/// d x 1 probability column.
inline json state_to_json(const DensityMatrix& rho) {
    json j = matrix_to_json(rho.matrix());
    j["kind"] = "density";
    return j;
}

inline json state_to_json(const PureState& psi) {
    ComplexMatrix col(psi.dim(), 1);
    for (int i = 0; i < psi.dim(); ++i) col(i, 0) = psi.amplitudes()[static_cast<size_t>(i)];
    json j = matrix_to_json(col);
    j["kind"] = "pure";
    return j;
}

inline json state_to_json(const DiagonalState& d) {
    ComplexMatrix col(d.dim(), 1);
    for (int i = 0; i < d.dim(); ++i) col(i, 0) = d[i];
    json j = matrix_to_json(col);
    j["kind"] = "diagonal";
    return j;
}

/// A parsed state file: always usable as a density matrix; the pure-state
/// view survives when the file carried one.
struct LoadedState {
    std::string kind;
    DensityMatrix rho;
    std::optional<PureState> pure;
};

inline LoadedState state_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw IoError("state JSON needs field kind");
    const std::string kind = j.at("kind").get<std::string>();
    const ComplexMatrix m = matrix_from_json(j);
    if (kind == "density") {
        return {kind, DensityMatrix(m), std::nullopt};
    }
    if (kind == "pure") {
        if (m.cols() != 1) throw IoError("pure state JSON must be a column (cols = 1)");
        std::vector<cplx> amps(static_cast<size_t>(m.rows()));
        for (int i = 0; i < m.rows(); ++i) amps[static_cast<size_t>(i)] = m(i, 0);
        PureState psi(amps);
        return {kind, pure_to_density(psi), psi};
    }
    if (kind == "diagonal") {
        if (m.cols() != 1) throw IoError("diagonal state JSON must be a column (cols = 1)");
        std::vector<double> p(static_cast<size_t>(m.rows()));
        for (int i = 0; i < m.rows(); ++i) {
            if (std::abs(m(i, 0).imag()) > 0.0)
                throw IoError("diagonal state JSON entries must be real");
            p[static_cast<size_t>(i)] = m(i, 0).real();
        }
        DiagonalState d(p);
        return {kind, DensityMatrix(d.matrix()), std::nullopt};
    }
    throw IoError("state JSON kind must be density|pure|diagonal, got '" + kind + "'");
}

/// Channel wire format: {"d_in": d, "kraus": [matrix, ...]}.
inline json channel_to_json(const IncoherentChannel& ch) {
    json ops = json::array();
    for (const KrausOperator& k : ch.kraus) ops.push_back(matrix_to_json(k.m));
    return json{{"d_in", ch.d_in}, {"kraus", std::move(ops)}};
}

inline IncoherentChannel channel_from_json(const json& j) {
    if (!j.is_object() || !j.contains("d_in") || !j.contains("kraus"))
        throw IoError("channel JSON needs fields d_in, kraus");
    IncoherentChannel ch;
    ch.d_in = j.at("d_in").get<int>();
    for (const json& op : j.at("kraus")) ch.kraus.push_back({matrix_from_json(op)});
    validate_channel(ch);
    return ch;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IoError("failed to parse JSON from '" + path + "': " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write to '" + path + "' failed");
}

/// Floats in reports: 12 significant digits, shortest form ("%.12g").
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// One CSV line from preformatted cells.
inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string line;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ",";
        line += cells[i];
    }
    line += "\n";
    return line;
}

}  // namespace cohlab
