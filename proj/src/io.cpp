#include "eetsne/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

namespace eetsne {

namespace {

namespace fs = std::filesystem;

// Parses one CSV line into doubles; strict about trailing garbage.
void parse_row(const std::string& line, int lineno, std::vector<double>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::string token =
            line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        // Allow surrounding spaces, nothing else.
        const char* rest = end;
        while (*rest == ' ' || *rest == '\t' || *rest == '\r') ++rest;
        if (end == token.c_str() || *rest != '\0' || errno == ERANGE) {
            throw ParseError("line " + std::to_string(lineno) + ": cannot parse '" + token +
                             "' as a number");
        }
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    std::vector<double> row;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        parse_row(line, lineno, row);
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("line " + std::to_string(lineno) + ": expected " +
                             std::to_string(rows.front().size()) + " columns, got " +
                             std::to_string(row.size()));
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw ParseError("'" + path + "' contains no data rows");
    }
    return rows;
}

bool integral_value(double v) {
    return std::isfinite(v) && v == std::floor(v) && std::abs(v) <= 2147483647.0;
}

std::uint32_t read_be32(std::ifstream& in, const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4)) {
        throw ParseError("'" + path + "' truncated while reading a 32-bit field");
    }
    return (static_cast<std::uint32_t>(buf[0]) << 24) | (static_cast<std::uint32_t>(buf[1]) << 16) |
           (static_cast<std::uint32_t>(buf[2]) << 8) | static_cast<std::uint32_t>(buf[3]);
}

}  // namespace

LoadedCsv load_csv(const std::string& path, LabelMode mode) {
    const auto rows = read_numeric_csv(path);
    const int n = static_cast<int>(rows.size());
    const int cols = static_cast<int>(rows.front().size());

    bool take_labels = false;
    if (mode == LabelMode::LastColumn) {
        if (cols < 2) {
            throw ParseError("'" + path + "' has a single column; no room for a label column");
        }
        for (int i = 0; i < n; ++i) {
            if (!integral_value(rows[i][cols - 1])) {
                throw ParseError("line " + std::to_string(i + 1) +
                                 ": label column value is not an integer");
            }
        }
        take_labels = true;
    } else if (mode == LabelMode::Auto && cols >= 2) {
        take_labels = true;
        for (int i = 0; i < n && take_labels; ++i) {
            if (!integral_value(rows[i][cols - 1])) take_labels = false;
        }
    }

    LoadedCsv out;
    const int d = take_labels ? cols - 1 : cols;
    out.data = Points(n, d);
    if (take_labels) out.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) out.data[i][j] = rows[i][j];
        if (take_labels) out.labels[i] = static_cast<int>(rows[i][cols - 1]);
    }
    validate_points(out.data, 1);
    return out;
}

void save_points_csv(const std::string& path, const Points& pts, const std::vector<int>& labels) {
    if (!labels.empty() && labels.size() != static_cast<std::size_t>(pts.n)) {
        throw InvalidDataset("label count does not match point count");
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    std::string line;
    char buf[64];
    for (int i = 0; i < pts.n; ++i) {
        line.clear();
        for (int j = 0; j < pts.dim; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", pts[i][j]);
            if (j > 0) line += ',';
            line += buf;
        }
        if (!labels.empty()) {
            std::snprintf(buf, sizeof buf, ",%d", labels[i]);
            line += buf;
        }
        line += '\n';
        out << line;
    }
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

Matrix load_matrix_csv(const std::string& path) {
    const auto rows = read_numeric_csv(path);
    const int n = static_cast<int>(rows.size());
    const int cols = static_cast<int>(rows.front().size());
    if (n != cols) {
        throw ParseError("'" + path + "' is " + std::to_string(n) + "x" + std::to_string(cols) +
                         ", expected a square matrix");
    }
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::vector<int> load_labels_file(const std::string& path) {
    const auto rows = read_numeric_csv(path);
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 1 || !integral_value(rows[i][0])) {
            throw ParseError("line " + std::to_string(i + 1) + ": expected one integer label");
        }
        labels.push_back(static_cast<int>(rows[i][0]));
    }
    return labels;
}

Points load_idx_images(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    const std::uint32_t magic = read_be32(in, path);
    if (magic != 0x00000803u) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "0x%08x", magic);
        throw ParseError("'" + path + "' has magic " + buf + ", expected 0x00000803 (images)");
    }
    const std::uint32_t count = read_be32(in, path);
    const std::uint32_t rows = read_be32(in, path);
    const std::uint32_t cols = read_be32(in, path);
    if (count == 0 || rows == 0 || cols == 0) {
        throw ParseError("'" + path + "' declares an empty image set");
    }
    const std::size_t per_image = static_cast<std::size_t>(rows) * cols;
    Points pts(static_cast<int>(count), static_cast<int>(per_image));
    std::vector<unsigned char> raw(per_image);
    for (std::uint32_t i = 0; i < count; ++i) {
        if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(per_image))) {
            throw ParseError("'" + path + "' truncated at image " + std::to_string(i));
        }
        double* row = pts[static_cast<int>(i)];
        for (std::size_t b = 0; b < per_image; ++b) row[b] = raw[b] / 255.0;
    }
    return pts;
}

std::vector<int> load_idx_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    const std::uint32_t magic = read_be32(in, path);
    if (magic != 0x00000801u) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "0x%08x", magic);
        throw ParseError("'" + path + "' has magic " + buf + ", expected 0x00000801 (labels)");
    }
    const std::uint32_t count = read_be32(in, path);
    std::vector<int> labels(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const int c = in.get();
        if (c == EOF) {
            throw ParseError("'" + path + "' truncated at label " + std::to_string(i));
        }
        labels[i] = c;
    }
    return labels;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunDir::RunDir(std::string root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + root_ + "': " + ec.message());
    }
}

std::string RunDir::path(const std::string& rel) const {
    return (fs::path(root_) / rel).string();
}

std::ofstream RunDir::create(const std::string& rel) {
    const fs::path full = fs::path(root_) / rel;
    std::error_code ec;
    fs::create_directories(full.parent_path(), ec);
    if (ec) {
        throw IoError("cannot create directory for '" + full.string() + "': " + ec.message());
    }
    std::ofstream out(full);
    if (!out) {
        throw IoError("cannot open '" + full.string() + "' for writing");
    }
    files_.push_back(rel);
    return out;
}

void RunDir::add(const std::string& rel) {
    files_.push_back(rel);
}

void RunDir::write_manifest() const {
    std::vector<std::string> sorted = files_;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::ofstream out(fs::path(root_) / "manifest.txt");
    if (!out) {
        throw IoError("cannot write manifest in '" + root_ + "'");
    }
    for (const std::string& rel : sorted) out << rel << '\n';
}

void KeyValueWriter::put(const std::string& key, const std::string& value) {
    out_ << key << " = " << value << '\n';
}

void KeyValueWriter::put(const std::string& key, double value) {
    put(key, format_double(value));
}

void KeyValueWriter::put(const std::string& key, int value) {
    put(key, std::to_string(value));
}

void KeyValueWriter::put(const std::string& key, bool value) {
    put(key, std::string(value ? "true" : "false"));
}

std::vector<std::pair<std::string, std::string>> load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t sep = line.find(" = ");
        if (sep == std::string::npos) {
            throw ParseError("'" + path + "': malformed line '" + line + "'");
        }
        out.emplace_back(line.substr(0, sep), line.substr(sep + 3));
    }
    return out;
}

}  // namespace eetsne
