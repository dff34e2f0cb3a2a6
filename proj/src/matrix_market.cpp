#include "lsqkit/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lsqkit {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error("matrix market '" + path + "': " + what);
}

bool next_data_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        std::size_t i = line.find_first_not_of(" \t\r\n");
        if (i == std::string::npos) continue;
        if (line[i] == '%') continue;
        return true;
    }
    return false;
}

}  // namespace

CsrMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open file");

    std::string header;
    if (!std::getline(in, header)) fail(path, "empty file");
    std::istringstream hs(header);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        fail(path, "malformed header (expected '%%MatrixMarket matrix ...')");
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);

    if (field == "complex" || field == "pattern")
        fail(path, "unsupported field '" + field + "'");
    if (field != "real" && field != "integer")
        fail(path, "unknown field '" + field + "'");
    const bool symmetric = symmetry == "symmetric";
    const bool skew = symmetry == "skew-symmetric";
    if (!symmetric && !skew && symmetry != "general")
        fail(path, "unsupported symmetry '" + symmetry + "'");

    std::string line;
    if (!next_data_line(in, line)) fail(path, "missing size line");
    std::istringstream sz(line);

    std::vector<CsrMatrix::Triplet> entries;
    std::size_t nrows = 0, ncols = 0;

    if (format == "coordinate") {
        std::size_t nnz = 0;
        if (!(sz >> nrows >> ncols >> nnz)) fail(path, "malformed size line");
        if ((symmetric || skew) && nrows != ncols) fail(path, "symmetric matrix must be square");
        entries.reserve(nnz * (symmetric || skew ? 2 : 1));
        for (std::size_t k = 0; k < nnz; ++k) {
            if (!next_data_line(in, line)) fail(path, "fewer entries than declared");
            std::istringstream es(line);
            std::size_t i = 0, j = 0;
            double v = 0.0;
            if (!(es >> i >> j >> v)) fail(path, "malformed entry line: " + line);
            if (i < 1 || i > nrows || j < 1 || j > ncols)
                fail(path, "index out of declared bounds: " + line);
            entries.push_back({i - 1, j - 1, v});
            if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
            if (skew && i != j) entries.push_back({j - 1, i - 1, -v});
        }
    } else if (format == "array") {
        if (!(sz >> nrows >> ncols)) fail(path, "malformed size line");
        if ((symmetric || skew) && nrows != ncols) fail(path, "symmetric matrix must be square");
        // Column-major dense listing; symmetric variants store the lower
        // triangle only (skew omits the diagonal).
        for (std::size_t j = 0; j < ncols; ++j) {
            std::size_t i0 = (symmetric || skew) ? j + (skew ? 1 : 0) : 0;
            for (std::size_t i = i0; i < nrows; ++i) {
                if (!next_data_line(in, line)) fail(path, "fewer array values than declared");
                std::istringstream es(line);
                double v = 0.0;
                if (!(es >> v)) fail(path, "malformed array value: " + line);
                if (v != 0.0) {
                    entries.push_back({i, j, v});
                    if (symmetric && i != j) entries.push_back({j, i, v});
                    if (skew && i != j) entries.push_back({j, i, -v});
                }
            }
        }
    } else {
        fail(path, "unknown format '" + format + "'");
    }

    return CsrMatrix::from_triplets(nrows, ncols, std::move(entries));
}

void write_matrix_market(const std::string& path, const CsrMatrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("matrix market '" + path + "': cannot open for writing");
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.nrows << " " << m.ncols << " " << m.nnz() << "\n";
    char buf[64];
    for (std::size_t r = 0; r < m.nrows; ++r) {
        for (std::size_t k = m.row_starts[r]; k < m.row_starts[r + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", r + 1, m.col_indices[k] + 1,
                          m.values[k]);
            out << buf;
        }
    }
    if (!out) throw std::runtime_error("matrix market '" + path + "': write failed");
}

std::vector<double> read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("vector file '" + path + "': cannot open file");
    std::vector<double> v;
    std::string line;
    while (next_data_line(in, line)) {
        std::istringstream es(line);
        double x = 0.0;
        if (!(es >> x))
            throw std::runtime_error("vector file '" + path + "': malformed line: " + line);
        v.push_back(x);
    }
    return v;
}

void write_vector_file(const std::string& path, std::span<const double> v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("vector file '" + path + "': cannot open for writing");
    char buf[48];
    for (double x : v) {
        std::snprintf(buf, sizeof buf, "%.17g\n", x);
        out << buf;
    }
    if (!out) throw std::runtime_error("vector file '" + path + "': write failed");
}

}  // namespace lsqkit
