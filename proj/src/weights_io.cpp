#include "paravect/weights_io.hpp"

#include "paravect/vect.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace paravect::io {

using nlohmann::json;

std::string formatDouble(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

json loadJson(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

Index requireInt(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_number_integer())
        throw ParseError(field + ": missing or not an integer");
    return j[field].get<Index>();
}

Matrix requireMatrix(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_object())
        throw ParseError(field + ": missing or not a matrix object");
    const json& m = j[field];
    if (!m.contains("rows") || !m["rows"].is_number_integer())
        throw ParseError(field + ".rows: missing or not an integer");
    if (!m.contains("cols") || !m["cols"].is_number_integer())
        throw ParseError(field + ".cols: missing or not an integer");
    if (!m.contains("data") || !m["data"].is_array())
        throw ParseError(field + ".data: missing or not an array");
    std::vector<double> data;
    data.reserve(m["data"].size());
    for (const auto& v : m["data"]) {
        if (!v.is_number()) throw ParseError(field + ".data: non-numeric entry");
        data.push_back(v.get<double>());
    }
    try {
        return vect::matrixFromRowMajor(m["rows"].get<Index>(), m["cols"].get<Index>(), data);
    } catch (const std::exception& e) {
        throw ParseError(field + ": " + e.what());
    }
}

void writeMatrix(std::ostream& out, const Matrix& m) {
    out << "{\"rows\": " << m.rows() << ", \"cols\": " << m.cols() << ", \"data\": [";
    for (Index i = 0; i < m.size(); ++i) {
        if (i) out << ", ";
        out << formatDouble(m.data()[i]);
    }
    out << "]}";
}

} // namespace

circuits::ToyModel readToyModel(const std::string& path) {
    const json j = loadJson(path);
    circuits::ToyModel m;
    m.d_model = requireInt(j, "d_model");
    m.d_vocab = requireInt(j, "d_vocab");
    m.n = requireInt(j, "n");
    m.W_E = requireMatrix(j, "W_E");
    m.W_U = requireMatrix(j, "W_U");
    if (!j.contains("layers") || !j["layers"].is_array())
        throw ParseError("layers: missing or not an array");
    for (std::size_t l = 0; l < j["layers"].size(); ++l) {
        const json& layer = j["layers"][l];
        if (!layer.is_array())
            throw ParseError("layers[" + std::to_string(l) + "]: not an array");
        std::vector<circuits::AttachedHead> heads;
        for (std::size_t h = 0; h < layer.size(); ++h) {
            const std::string prefix =
                "layers[" + std::to_string(l) + "][" + std::to_string(h) + "].";
            const json& head = layer[h];
            if (!head.is_object())
                throw ParseError("layers[" + std::to_string(l) + "][" + std::to_string(h) +
                                 "]: not an object");
            circuits::AttachedHead ah;
            ah.head.W_Q = requireMatrix(head, "W_Q");
            ah.head.W_K = requireMatrix(head, "W_K");
            ah.head.W_V = requireMatrix(head, "W_V");
            ah.head.W_O = requireMatrix(head, "W_O");
            ah.mixer = requireMatrix(head, "mixer");
            // Re-key nested matrix errors onto the layer path.
            try {
                circuits::makeHead(ah.head.W_Q, ah.head.W_K, ah.head.W_V, ah.head.W_O);
            } catch (const std::exception& e) {
                throw ParseError(prefix + "W_Q/W_K/W_V/W_O: " + e.what());
            }
            heads.push_back(std::move(ah));
        }
        m.layers.push_back(std::move(heads));
    }
    circuits::validateModel(m);
    return m;
}

void writeToyModel(const std::string& path, const circuits::ToyModel& m) {
    circuits::validateModel(m);
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << "{\n";
    out << "  \"d_model\": " << m.d_model << ",\n";
    out << "  \"d_vocab\": " << m.d_vocab << ",\n";
    out << "  \"n\": " << m.n << ",\n";
    out << "  \"W_E\": ";
    writeMatrix(out, m.W_E);
    out << ",\n  \"W_U\": ";
    writeMatrix(out, m.W_U);
    out << ",\n  \"layers\": [";
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        if (l) out << ",";
        out << "\n    [";
        for (std::size_t h = 0; h < m.layers[l].size(); ++h) {
            if (h) out << ",";
            const auto& ah = m.layers[l][h];
            out << "\n      {\"W_Q\": ";
            writeMatrix(out, ah.head.W_Q);
            out << ",\n       \"W_K\": ";
            writeMatrix(out, ah.head.W_K);
            out << ",\n       \"W_V\": ";
            writeMatrix(out, ah.head.W_V);
            out << ",\n       \"W_O\": ";
            writeMatrix(out, ah.head.W_O);
            out << ",\n       \"mixer\": ";
            writeMatrix(out, ah.mixer);
            out << "}";
        }
        out << "\n    ]";
    }
    out << "\n  ]\n}\n";
}

namespace {

std::string sidecarPath(const std::string& descriptor_path, const std::string& data_file) {
    if (!data_file.empty() && data_file.front() == '/') return data_file;
    const auto slash = descriptor_path.find_last_of('/');
    return slash == std::string::npos ? data_file
                                      : descriptor_path.substr(0, slash + 1) + data_file;
}

std::vector<Vector> readRawTable(const std::string& path, const json& j) {
    const Index rows = requireInt(j, "rows");
    const Index cols = requireInt(j, "cols");
    if (rows < 1 || cols < 1) throw ParseError("rows/cols: must be positive");
    if (!j["data_file"].is_string()) throw ParseError("data_file: not a string");
    const std::string bin = sidecarPath(path, j["data_file"].get<std::string>());
    std::ifstream in(bin, std::ios::binary);
    if (!in) throw ParseError("data_file: cannot open " + bin);
    std::vector<double> data(static_cast<std::size_t>(rows * cols));
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(data.size() * sizeof(double)))
        throw ParseError("data_file: " + bin + " holds fewer than rows*cols doubles");
    std::vector<Vector> table;
    table.reserve(static_cast<std::size_t>(rows));
    for (Index r = 0; r < rows; ++r) {
        Vector v(cols);
        for (Index c = 0; c < cols; ++c) {
            const double x = data[static_cast<std::size_t>(r * cols + c)];
            if (!std::isfinite(x))
                throw ParseError("data_file: non-finite entry at row " + std::to_string(r));
            v[c] = x;
        }
        table.push_back(std::move(v));
    }
    return table;
}

} // namespace

std::vector<Vector> readEncodingTable(const std::string& path) {
    const json j = loadJson(path);
    if (j.is_object() && j.contains("data_file")) return readRawTable(path, j);
    if (!j.is_array() || j.empty()) throw ParseError(path + ": expected a nonempty array of rows");
    std::vector<Vector> rows;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& row = j[i];
        if (!row.is_array())
            throw ParseError("row " + std::to_string(i) + ": not an array");
        Vector v(static_cast<Index>(row.size()));
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!row[c].is_number())
                throw ParseError("row " + std::to_string(i) + ": non-numeric entry");
            v[static_cast<Index>(c)] = row[c].get<double>();
            if (!std::isfinite(v[static_cast<Index>(c)]))
                throw ParseError("row " + std::to_string(i) + ": non-finite entry");
        }
        if (!rows.empty() && v.size() != rows.front().size())
            throw ParseError("row " + std::to_string(i) + ": ragged row length");
        rows.push_back(std::move(v));
    }
    return rows;
}

void writeEncodingTable(const std::string& path, const std::vector<Vector>& rows) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << "[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i) out << ",";
        out << "\n  [";
        for (Index c = 0; c < rows[i].size(); ++c) {
            if (c) out << ", ";
            out << formatDouble(rows[i][c]);
        }
        out << "]";
    }
    out << "\n]\n";
}

void writeEncodingTableRaw(const std::string& path, const std::vector<Vector>& rows) {
    if (rows.empty()) throw ParseError("cannot write an empty table");
    const std::string bin = path + ".bin";
    {
        std::ofstream out(bin, std::ios::binary);
        if (!out) throw ParseError("cannot write " + bin);
        for (const auto& row : rows)
            out.write(reinterpret_cast<const char*>(row.data()),
                      static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    const auto slash = bin.find_last_of('/');
    out << "{\"rows\": " << rows.size() << ", \"cols\": " << rows.front().size()
        << ", \"data_file\": \"" << (slash == std::string::npos ? bin : bin.substr(slash + 1))
        << "\"}\n";
}

} // namespace paravect::io
