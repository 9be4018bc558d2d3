#include "qsvd/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "qsvd/error.hpp"
#include "qsvd/random.hpp"

namespace qsvd {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Whitespace-separated tokens of one line, each with its byte offset.
struct Token {
    std::string text;
    std::size_t offset;
};

std::vector<Token> tokenize(const std::string& text, std::size_t begin, std::size_t end) {
    std::vector<Token> out;
    std::size_t i = begin;
    while (i < end) {
        while (i < end && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        const std::size_t start = i;
        while (i < end && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.push_back({text.substr(start, i - start), start});
    }
    return out;
}

std::size_t parse_index(const Token& t) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(t.text, &pos);
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + t.text + "'", t.offset);
    }
    if (pos != t.text.size() || t.text[0] == '-') throw ParseError("expected an integer, got '" + t.text + "'", t.offset);
    return static_cast<std::size_t>(v);
}

double parse_real(const Token& t) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(t.text, &pos);
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + t.text + "'", t.offset);
    }
    if (pos != t.text.size() || !std::isfinite(v)) throw ParseError("expected a finite number, got '" + t.text + "'", t.offset);
    return v;
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t at) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + b])) << (8 * b);
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SparseBlock parse_matrix_market(const std::string& text) {
    std::size_t line_start = 0;
    auto next_line = [&](std::size_t& begin, std::size_t& end) {
        if (line_start >= text.size()) return false;
        begin = line_start;
        end = text.find('\n', begin);
        if (end == std::string::npos) end = text.size();
        line_start = end + 1;
        return true;
    };

    std::size_t b = 0, e = 0;
    if (!next_line(b, e)) throw ParseError("empty Matrix Market file", 0);
    const auto header = tokenize(text, b, e);
    if (header.size() != 5 || header[0].text != "%%MatrixMarket")
        throw ParseError("missing %%MatrixMarket header", b);
    if (lower(header[1].text) != "matrix") throw ParseError("unsupported object '" + header[1].text + "'", header[1].offset);
    if (lower(header[2].text) != "coordinate") throw ParseError("only coordinate format is supported", header[2].offset);
    const std::string field = lower(header[3].text);
    if (field != "real" && field != "integer" && field != "pattern")
        throw ParseError("unsupported field '" + header[3].text + "'", header[3].offset);
    const std::string symmetry = lower(header[4].text);
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
        throw ParseError("unsupported symmetry '" + header[4].text + "'", header[4].offset);
    const bool pattern = field == "pattern";

    std::vector<Token> size_line;
    while (next_line(b, e)) {
        if (b < e && text[b] == '%') continue;
        size_line = tokenize(text, b, e);
        if (!size_line.empty()) break;
    }
    if (size_line.size() != 3) throw ParseError("expected 'rows cols entries' size line", b);
    SparseBlock out;
    out.rows = parse_index(size_line[0]);
    out.cols = parse_index(size_line[1]);
    const std::size_t nnz = parse_index(size_line[2]);

    std::map<std::pair<std::size_t, std::size_t>, double> merged;
    std::size_t seen = 0;
    while (seen < nnz && next_line(b, e)) {
        if (b < e && text[b] == '%') continue;
        const auto tok = tokenize(text, b, e);
        if (tok.empty()) continue;
        if (tok.size() != (pattern ? 2u : 3u)) throw ParseError("malformed entry line", b);
        const std::size_t i = parse_index(tok[0]);
        const std::size_t j = parse_index(tok[1]);
        if (i < 1 || i > out.rows) throw ParseError("row index out of range", tok[0].offset);
        if (j < 1 || j > out.cols) throw ParseError("column index out of range", tok[1].offset);
        const double v = pattern ? 1.0 : parse_real(tok[2]);
        merged[{i - 1, j - 1}] += v;
        if (symmetry != "general" && i != j) merged[{j - 1, i - 1}] += symmetry == "symmetric" ? v : -v;
        ++seen;
    }
    if (seen < nnz) throw ParseError("file ends before all entries were read", text.size());
    while (next_line(b, e)) {
        if (b < e && text[b] == '%') continue;
        if (!tokenize(text, b, e).empty()) throw ParseError("unexpected data after the last entry", b);
    }
    for (const auto& [ij, v] : merged) out.entries.push_back({ij.first, ij.second, v});
    return out;
}

SparseBlock read_matrix_market(const std::filesystem::path& path) { return parse_matrix_market(read_file(path)); }

void write_matrix_market(const SparseBlock& block, const std::filesystem::path& path) {
    std::string s = "%%MatrixMarket matrix coordinate real general\n";
    s += std::to_string(block.rows) + " " + std::to_string(block.cols) + " " + std::to_string(block.entries.size()) + "\n";
    for (const auto& en : block.entries)
        s += std::to_string(en.row + 1) + " " + std::to_string(en.col + 1) + " " + format_double(en.value) + "\n";
    write_file(path, s);
}

QuatMatrix assemble_jrs_blocks(const SparseBlock& b0, const SparseBlock& b1, const SparseBlock& b2,
                               const SparseBlock& b3, std::size_t n) {
    std::array<std::vector<CoordEntry>, 4> parts;
    const std::array<const SparseBlock*, 4> blocks{&b0, &b1, &b2, &b3};
    for (int c = 0; c < 4; ++c) {
        if (blocks[c]->rows < n || blocks[c]->cols < n)
            throw DimensionError("assemble_jrs_blocks: block " + std::to_string(c) + " is smaller than n");
        for (const auto& en : blocks[c]->entries)
            if (en.row < n && en.col < n) parts[c].push_back(en);
    }
    return QuatMatrix::from_coordinates(n, n, parts);
}

RgbImage parse_image_ppm(const std::string& bytes) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        for (;;) {
            while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
            if (pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
                continue;
            }
            return;
        }
    };
    auto read_number = [&] {
        skip_space();
        const std::size_t start = pos;
        std::size_t v = 0;
        while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
            v = v * 10 + static_cast<std::size_t>(bytes[pos] - '0');
            if (v > (1u << 24)) throw ParseError("PPM header value too large", start);
            ++pos;
        }
        if (pos == start) throw ParseError("expected a number in PPM header", start);
        return v;
    };

    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw ParseError("not a binary PPM (magic P6)", 0);
    pos = 2;
    const std::size_t w = read_number();
    const std::size_t h = read_number();
    skip_space();
    const std::size_t maxval_at = pos;
    const std::size_t maxval = read_number();
    if (maxval != 255) throw ParseError("only maxval 255 is supported", maxval_at);
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
        throw ParseError("expected whitespace after maxval", pos);
    ++pos;
    const std::size_t need = 3 * w * h;
    if (bytes.size() - pos < need) throw ParseError("truncated PPM payload", bytes.size());
    if (bytes.size() - pos > need) throw ParseError("trailing bytes after PPM payload", pos + need);

    RgbImage img(w, h);
    for (std::size_t i = 0; i < w * h; ++i) {
        img.r[i] = static_cast<unsigned char>(bytes[pos + 3 * i]);
        img.g[i] = static_cast<unsigned char>(bytes[pos + 3 * i + 1]);
        img.b[i] = static_cast<unsigned char>(bytes[pos + 3 * i + 2]);
    }
    return img;
}

RgbImage read_image_ppm(const std::filesystem::path& path) { return parse_image_ppm(read_file(path)); }

std::string encode_image_ppm(const RgbImage& img) {
    std::string s = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    auto q = [](double v) { return static_cast<char>(static_cast<unsigned char>(std::round(std::clamp(v, 0.0, 255.0)))); };
    s.reserve(s.size() + 3 * img.pixels());
    for (std::size_t i = 0; i < img.pixels(); ++i) {
        s.push_back(q(img.r[i]));
        s.push_back(q(img.g[i]));
        s.push_back(q(img.b[i]));
    }
    return s;
}

void write_image_ppm(const RgbImage& img, const std::filesystem::path& path) { write_file(path, encode_image_ppm(img)); }

void write_triplets(const TripletSet& t, const std::filesystem::path& path) {
    std::string s = "j,sigma,bound,converged\n";
    for (std::size_t j = 0; j < t.size(); ++j)
        s += std::to_string(j + 1) + "," + format_double(t.sigmas[j]) + "," + format_double(t.bounds[j]) + "," +
             (t.converged[j] ? "1" : "0") + "\n";
    write_file(path, s);
}

void write_trace(const ConvergenceTrace& trace, const std::filesystem::path& path) {
    std::string s = "cycle,j,bound,matvecs\n";
    for (const auto& rec : trace.cycles)
        for (std::size_t j = 0; j < rec.bounds.size(); ++j)
            s += std::to_string(rec.cycle) + "," + std::to_string(j + 1) + "," + format_double(rec.bounds[j]) + "," +
                 std::to_string(rec.matvecs) + "\n";
    write_file(path, s);
}

std::vector<TripletRow> read_triplets(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::vector<TripletRow> rows;
    std::size_t at = text.find('\n');
    if (at == std::string::npos || text.substr(0, at) != "j,sigma,bound,converged")
        throw ParseError("missing triplet CSV header", 0);
    ++at;
    while (at < text.size()) {
        std::size_t end = text.find('\n', at);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(at, end - at);
        std::replace(line.begin(), line.end(), ',', ' ');
        const auto tok = tokenize(line, 0, line.size());
        if (!tok.empty()) {
            if (tok.size() != 4) throw ParseError("expected 4 fields", at);
            auto shifted = [&](Token t) { t.offset += at; return t; };
            TripletRow r;
            r.j = parse_index(shifted(tok[0]));
            r.sigma = parse_real(shifted(tok[1]));
            r.bound = parse_real(shifted(tok[2]));
            if (tok[3].text != "0" && tok[3].text != "1") throw ParseError("converged must be 0 or 1", at + tok[3].offset);
            r.converged = tok[3].text == "1";
            rows.push_back(r);
        }
        at = end + 1;
    }
    return rows;
}

void write_qmx(const QuatMatrix& m, const std::filesystem::path& path) {
    std::string s(qmx_magic.begin(), qmx_magic.end());
    put_u64(s, m.rows());
    put_u64(s, m.cols());
    for (int c = 0; c < 4; ++c)
        for (double v : m.block(c)) put_u64(s, std::bit_cast<std::uint64_t>(v));
    write_file(path, s);
}

QuatMatrix read_qmx(const std::filesystem::path& path) {
    const std::string s = read_file(path);
    if (s.size() < 24 || !std::equal(qmx_magic.begin(), qmx_magic.end(), s.begin()))
        throw ParseError("not a .qmx file (bad magic)", 0);
    const std::uint64_t rows = get_u64(s, 8);
    const std::uint64_t cols = get_u64(s, 16);
    if (rows > (1u << 24) || cols > (1u << 24) || rows * cols > (1ull << 32))
        throw ParseError("implausible .qmx dimensions", 8);
    const std::size_t count = static_cast<std::size_t>(rows * cols);
    if (s.size() < 24 + 32 * count) throw ParseError("truncated .qmx payload", s.size());
    if (s.size() > 24 + 32 * count) throw ParseError("trailing bytes in .qmx file", 24 + 32 * count);
    std::array<std::vector<double>, 4> blocks;
    std::size_t at = 24;
    for (int c = 0; c < 4; ++c) {
        blocks[c].resize(count);
        for (std::size_t i = 0; i < count; ++i, at += 8) {
            const double v = std::bit_cast<double>(get_u64(s, at));
            if (!std::isfinite(v)) throw ParseError("non-finite value in .qmx payload", at);
            blocks[c][i] = v;
        }
    }
    return QuatMatrix::from_blocks(rows, cols, std::move(blocks));
}

SparseBlock synthetic_sparse_block(std::size_t n, std::size_t bandwidth, std::size_t extra_per_row,
                                   std::uint64_t seed) {
    Rng rng(seed);
    SparseBlock out;
    out.rows = out.cols = n;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i > bandwidth ? i - bandwidth : 0;
        const std::size_t hi = std::min(n - 1, i + bandwidth);
        for (std::size_t j = lo; j <= hi; ++j) out.entries.push_back({i, j, rng.normal()});
        for (std::size_t e = 0; e < extra_per_row; ++e)
            out.entries.push_back({i, static_cast<std::size_t>(rng.below(n)), rng.normal()});
    }
    return out;
}

std::array<SparseBlock, 4> synthetic_sparse_blocks(std::size_t n, std::uint64_t seed) {
    std::array<SparseBlock, 4> blocks;
    for (int c = 0; c < 4; ++c) {
        blocks[c] = synthetic_sparse_block(n, 1, 2, seed * 4 + static_cast<std::uint64_t>(c));
        for (auto& en : blocks[c].entries) en.value *= 0.25;
    }
    const double step = 9.0 / static_cast<double>(std::max<std::size_t>(n, 2) - 1);
    for (std::size_t i = 0; i < n; ++i) blocks[0].entries.push_back({i, i, 1.0 + step * static_cast<double>(i)});
    return blocks;
}

QuatMatrix synthetic_sparse_quat(std::size_t n, std::uint64_t seed) {
    const auto b = synthetic_sparse_blocks(n, seed);
    return QuatMatrix::from_coordinates(n, n, {b[0].entries, b[1].entries, b[2].entries, b[3].entries});
}

QuatMatrix random_dense_quat(std::size_t m, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::array<std::vector<double>, 4> blocks;
    for (auto& b : blocks) {
        b.resize(m * n);
        for (double& v : b) v = rng.normal();
    }
    return QuatMatrix::from_blocks(m, n, std::move(blocks));
}

RgbImage synthetic_image(std::size_t width, std::size_t height, std::uint64_t seed) {
    Rng rng(seed);
    RgbImage img(width, height);
    const double cx = 0.55 * static_cast<double>(width), cy = 0.45 * static_cast<double>(height);
    const double rad = 0.3 * static_cast<double>(std::min(width, height));
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x) {
            const double u = static_cast<double>(x) / static_cast<double>(std::max<std::size_t>(width, 1));
            const double v = static_cast<double>(y) / static_cast<double>(std::max<std::size_t>(height, 1));
            double r = 200.0 * u + 30.0;
            double g = 180.0 * v + 20.0;
            double b = 120.0 + 80.0 * std::sin(2.0 * std::numbers::pi * (3.0 * u + 2.0 * v));
            const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
            if (dx * dx + dy * dy < rad * rad) {
                r = 0.5 * r + 110.0;
                g = 0.4 * g;
                b = 0.6 * b + 60.0;
            }
            if ((x / 8 + y / 16) % 5 == 0) g += 40.0;
            const std::size_t i = y * width + x;
            img.r[i] = std::round(std::clamp(r + 4.0 * rng.normal(), 0.0, 255.0));
            img.g[i] = std::round(std::clamp(g + 4.0 * rng.normal(), 0.0, 255.0));
            img.b[i] = std::round(std::clamp(b + 4.0 * rng.normal(), 0.0, 255.0));
        }
    return img;
}

}  // namespace qsvd
