#include "bsc/io.h"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace bsc::io {

namespace {

constexpr std::uint8_t kFormatVersion = 1;
constexpr std::uint8_t kDtypeFloat64 = 1;

void put_u8(std::string& out, std::uint8_t v) {
    out.push_back(static_cast<char>(v));
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<char>((v >> shift) & 0xff));
    }
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int shift = 0; shift < 64; shift += 8) {
        out.push_back(static_cast<char>((v >> shift) & 0xff));
    }
}

void put_f64(std::string& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_string(std::string& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.append(s);
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    std::string context;

    void need(std::size_t count) const {
        if (pos + count > buf.size()) {
            throw format_error("truncated file: " + context);
        }
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = 0;
        for (int i = 0; i < 2; ++i) v |= std::uint16_t(std::uint8_t(buf[pos++])) << (8 * i);
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(buf[pos++])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(buf[pos++])) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        std::uint32_t len = u32();
        need(len);
        std::string s = buf.substr(pos, len);
        pos += len;
        return s;
    }
    void done() const {
        if (pos != buf.size()) {
            throw format_error("trailing bytes in file: " + context);
        }
    }
};

void write_file_atomic(const fs::path& path, const std::string& payload) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw format_error("cannot open for writing: " + tmp.string());
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (!out) throw format_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void expect_magic(Reader& r, const char (&magic)[5]) {
    r.need(4);
    if (std::memcmp(r.buf.data() + r.pos, magic, 4) != 0) {
        throw format_error("bad magic (expected " + std::string(magic) + "): " + r.context);
    }
    r.pos += 4;
}

void expect_version(Reader& r) {
    std::uint8_t version = r.u8();
    if (version != kFormatVersion) {
        throw format_error("unsupported format version " + std::to_string(version) + ": " +
                           r.context);
    }
}

void put_matrix_block(std::string& out, const Matrix& m) {
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            put_f64(out, m(i, j));
        }
    }
}

Matrix read_matrix_block(Reader& r) {
    std::uint64_t rows = r.u64();
    std::uint64_t cols = r.u64();
    if (rows > (1u << 24) || cols > (1u << 24)) {
        throw format_error("implausible matrix shape: " + r.context);
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            m(i, j) = r.f64();
        }
    }
    return m;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void check_token(const std::string& token, const char* what) {
    if (token.empty() || token.find_first_of(" \t\n") != std::string::npos) {
        throw data_error(std::string("manifest ") + what + " must be non-empty and contain no whitespace: '" +
                         token + "'");
    }
}

}  // namespace

void write_matrix(const fs::path& path, const Matrix& m) {
    std::string out;
    out.reserve(24 + static_cast<std::size_t>(m.size()) * 8);
    out.append("BSCM");
    put_u8(out, kFormatVersion);
    put_u8(out, kDtypeFloat64);
    put_u16(out, 0);
    put_matrix_block(out, m);
    write_file_atomic(path, out);
}

Matrix read_matrix(const fs::path& path) {
    std::string buf = read_file(path);
    Reader r{buf, 0, path.string()};
    expect_magic(r, "BSCM");
    expect_version(r);
    std::uint8_t dtype = r.u8();
    if (dtype != kDtypeFloat64) {
        throw format_error("unsupported dtype code " + std::to_string(dtype) + ": " + r.context);
    }
    r.u16();  // reserved
    Matrix m = read_matrix_block(r);
    r.done();
    return m;
}

GroundTruth Manifest::ground_truth() const {
    GroundTruth truth;
    for (const ManifestVideo& v : videos) truth.video_category[v.id] = v.category;
    for (const ManifestImage& q : images) truth.query_category[q.id] = q.category;
    return truth;
}

Manifest read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open manifest: " + path.string());

    Manifest manifest;
    manifest.dir = path.parent_path();

    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string kind;
        fields >> kind;
        auto where = [&] { return path.string() + ":" + std::to_string(line_no); };
        if (kind == "video") {
            ManifestVideo v;
            if (!(fields >> v.id >> v.path >> v.category)) {
                throw format_error("malformed video record at " + where());
            }
            if (!seen.insert(v.id).second) {
                throw data_error("duplicate id '" + v.id + "' at " + where());
            }
            manifest.videos.push_back(std::move(v));
        } else if (kind == "image") {
            ManifestImage q;
            if (!(fields >> q.id >> q.path >> q.category >> q.source_video)) {
                throw format_error("malformed image record at " + where());
            }
            if (!seen.insert(q.id).second) {
                throw data_error("duplicate id '" + q.id + "' at " + where());
            }
            manifest.images.push_back(std::move(q));
        } else {
            throw format_error("unknown record kind '" + kind + "' at " + where());
        }
    }

    for (const ManifestVideo& v : manifest.videos) {
        if (!fs::exists(manifest.resolve(v.path))) {
            throw data_error("manifest references missing file: " + manifest.resolve(v.path).string());
        }
    }
    for (const ManifestImage& q : manifest.images) {
        if (!fs::exists(manifest.resolve(q.path))) {
            throw data_error("manifest references missing file: " + manifest.resolve(q.path).string());
        }
    }
    return manifest;
}

void write_manifest(const fs::path& path, const Manifest& manifest) {
    std::string out = "# bsc dataset manifest\n";
    for (const ManifestVideo& v : manifest.videos) {
        check_token(v.id, "video id");
        check_token(v.path, "video path");
        check_token(v.category, "category");
        out += "video " + v.id + " " + v.path + " " + v.category + "\n";
    }
    for (const ManifestImage& q : manifest.images) {
        check_token(q.id, "image id");
        check_token(q.path, "image path");
        check_token(q.category, "category");
        check_token(q.source_video, "source video id");
        out += "image " + q.id + " " + q.path + " " + q.category + " " + q.source_video + "\n";
    }
    write_file_atomic(path, out);
}

void write_subspaces(const fs::path& path, const std::vector<SubspaceEntry>& entries) {
    std::string out;
    out.append("BSCS");
    put_u8(out, kFormatVersion);
    put_u8(out, 0);
    put_u16(out, 0);
    put_u64(out, entries.size());
    for (const SubspaceEntry& entry : entries) {
        put_string(out, entry.video_id);
        put_matrix_block(out, entry.basis);
    }
    write_file_atomic(path, out);
}

std::vector<SubspaceEntry> read_subspaces(const fs::path& path) {
    std::string buf = read_file(path);
    Reader r{buf, 0, path.string()};
    expect_magic(r, "BSCS");
    expect_version(r);
    r.u8();
    r.u16();
    std::uint64_t count = r.u64();
    std::vector<SubspaceEntry> entries;
    entries.reserve(count);
    for (std::uint64_t e = 0; e < count; ++e) {
        SubspaceEntry entry;
        entry.video_id = r.str();
        entry.basis = read_matrix_block(r);
        Eigen::Index rho = entry.basis.cols();
        double residual =
            (entry.basis.transpose() * entry.basis - Matrix::Identity(rho, rho)).norm();
        if (!(residual <= 1e-8)) {
            throw data_error("stored basis is not orthonormal for video '" + entry.video_id +
                             "': " + path.string());
        }
        entry.projector = entry.basis * entry.basis.transpose();
        entries.push_back(std::move(entry));
    }
    r.done();
    return entries;
}

void write_ibc_model(const fs::path& path, const IbcModel& model) {
    std::string out;
    out.append("BSCH");
    put_u8(out, kFormatVersion);
    put_u8(out, static_cast<std::uint8_t>(ModelKind::Ibc));
    put_u16(out, 0);
    put_u32(out, static_cast<std::uint32_t>(model.d));
    put_u32(out, static_cast<std::uint32_t>(model.bits()));
    put_f64(out, model.lambda);
    put_u64(out, model.seed);
    put_matrix_block(out, model.P);
    put_matrix_block(out, model.Q);
    write_file_atomic(path, out);
}

void write_bbc_model(const fs::path& path, const BbcModel& model) {
    std::string out;
    out.append("BSCH");
    put_u8(out, kFormatVersion);
    put_u8(out, static_cast<std::uint8_t>(ModelKind::Bbc));
    put_u16(out, 0);
    put_u32(out, static_cast<std::uint32_t>(model.d));
    put_u32(out, static_cast<std::uint32_t>(model.c1));
    put_u32(out, static_cast<std::uint32_t>(model.c2));
    put_f64(out, model.mu);
    put_u64(out, model.seed);
    put_matrix_block(out, model.P1);
    put_matrix_block(out, model.P2);
    put_matrix_block(out, model.Q1);
    put_matrix_block(out, model.Q2);
    put_matrix_block(out, model.center_V);
    put_matrix_block(out, model.center_U);
    write_file_atomic(path, out);
}

namespace {

ModelKind read_model_header(Reader& r) {
    expect_magic(r, "BSCH");
    expect_version(r);
    std::uint8_t kind = r.u8();
    r.u16();
    if (kind != static_cast<std::uint8_t>(ModelKind::Ibc) &&
        kind != static_cast<std::uint8_t>(ModelKind::Bbc)) {
        throw format_error("unknown model kind " + std::to_string(kind) + ": " + r.context);
    }
    return static_cast<ModelKind>(kind);
}

}  // namespace

ModelKind peek_model_kind(const fs::path& path) {
    std::string buf = read_file(path);
    Reader r{buf, 0, path.string()};
    return read_model_header(r);
}

IbcModel read_ibc_model(const fs::path& path) {
    std::string buf = read_file(path);
    Reader r{buf, 0, path.string()};
    if (read_model_header(r) != ModelKind::Ibc) {
        throw format_error("not an IBC model: " + path.string());
    }
    IbcModel model;
    model.d = static_cast<int>(r.u32());
    std::uint32_t bits = r.u32();
    model.lambda = r.f64();
    model.seed = r.u64();
    model.P = read_matrix_block(r);
    model.Q = read_matrix_block(r);
    r.done();
    if (model.P.cols() != static_cast<Eigen::Index>(bits) ||
        model.P.rows() != model.Q.rows() || model.P.cols() != model.Q.cols()) {
        throw format_error("inconsistent IBC model shapes: " + path.string());
    }
    return model;
}

BbcModel read_bbc_model(const fs::path& path) {
    std::string buf = read_file(path);
    Reader r{buf, 0, path.string()};
    if (read_model_header(r) != ModelKind::Bbc) {
        throw format_error("not a BBC model: " + path.string());
    }
    BbcModel model;
    model.d = static_cast<int>(r.u32());
    model.c1 = static_cast<int>(r.u32());
    model.c2 = static_cast<int>(r.u32());
    model.mu = r.f64();
    model.seed = r.u64();
    model.P1 = read_matrix_block(r);
    model.P2 = read_matrix_block(r);
    model.Q1 = read_matrix_block(r);
    model.Q2 = read_matrix_block(r);
    model.center_V = read_matrix_block(r);
    model.center_U = read_matrix_block(r);
    r.done();
    if (model.P1.rows() != model.d || model.P1.cols() != model.c1 ||
        model.P2.rows() != model.d || model.P2.cols() != model.c2 ||
        model.Q1.rows() != model.d || model.Q1.cols() != model.c1 ||
        model.Q2.rows() != model.d || model.Q2.cols() != model.c2 ||
        model.center_V.rows() != model.d || model.center_U.rows() != model.d) {
        throw format_error("inconsistent BBC model shapes: " + path.string());
    }
    return model;
}

void write_index(const fs::path& path, const BinaryIndex& index) {
    std::string out;
    out.append("BSCI");
    put_u8(out, kFormatVersion);
    put_u8(out, 0);
    put_u16(out, 0);
    put_u32(out, index.nbits);
    put_u64(out, index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        put_string(out, index.ids[i]);
        for (std::uint64_t word : index.codes[i].words) put_u64(out, word);
    }
    write_file_atomic(path, out);
}

BinaryIndex read_index(const fs::path& path) {
    std::string buf = read_file(path);
    Reader r{buf, 0, path.string()};
    expect_magic(r, "BSCI");
    expect_version(r);
    r.u8();
    r.u16();
    BinaryIndex index;
    index.nbits = r.u32();
    std::uint64_t count = r.u64();
    const std::size_t words_per_code = (index.nbits + 63) / 64;
    for (std::uint64_t e = 0; e < count; ++e) {
        std::string id = r.str();
        PackedCode code;
        code.nbits = index.nbits;
        code.words.resize(words_per_code);
        for (std::size_t w = 0; w < words_per_code; ++w) code.words[w] = r.u64();
        index.add(std::move(id), std::move(code));
    }
    r.done();
    return index;
}

void write_run(const fs::path& path, const std::vector<RunEntry>& entries) {
    std::string out = "# query_id rank video_id score\n";
    for (const RunEntry& entry : entries) {
        for (std::size_t rank = 0; rank < entry.ranked.size(); ++rank) {
            out += entry.query_id + " " + std::to_string(rank + 1) + " " +
                   entry.ranked[rank].first + " " + format_double(entry.ranked[rank].second) +
                   "\n";
        }
    }
    write_file_atomic(path, out);
}

std::vector<RunEntry> read_run(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open run file: " + path.string());

    std::vector<RunEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string query_id, video_id;
        std::size_t rank = 0;
        double score = 0.0;
        if (!(fields >> query_id >> rank >> video_id >> score)) {
            throw format_error("malformed run record at " + path.string() + ":" +
                               std::to_string(line_no));
        }
        if (entries.empty() || entries.back().query_id != query_id) {
            entries.push_back({query_id, {}});
        }
        if (rank != entries.back().ranked.size() + 1) {
            throw format_error("non-sequential rank at " + path.string() + ":" +
                               std::to_string(line_no));
        }
        entries.back().ranked.emplace_back(video_id, score);
    }
    return entries;
}

Run to_run(const std::vector<RunEntry>& entries) {
    Run run;
    for (const RunEntry& entry : entries) {
        auto [it, inserted] = run.emplace(entry.query_id, std::vector<std::string>{});
        if (!inserted) throw data_error("duplicate query id in run: " + entry.query_id);
        it->second.reserve(entry.ranked.size());
        for (const auto& [video_id, score] : entry.ranked) it->second.push_back(video_id);
    }
    return run;
}

std::string format_report(const MetricReport& report) {
    std::string out;
    out += "ap_variant=list-local\n";
    out += "k=" + std::to_string(report.k) + "\n";
    out += "queries=" + std::to_string(report.per_query_ap.size()) + "\n";
    out += "zero_relevant_queries=" + std::to_string(report.zero_relevant_queries) + "\n";
    out += "map=" + format_double(report.map) + "\n";
    out += "precision_at_k=" + format_double(report.precision_at_k) + "\n";
    return out;
}

void write_report(const fs::path& path, const MetricReport& report) {
    write_file_atomic(path, format_report(report));
}

void write_report_table(const fs::path& path, const MetricReport& report) {
    std::string out = "query_id\tap\n";
    for (const auto& [query_id, ap] : report.per_query_ap) {
        out += query_id + "\t" + format_double(ap) + "\n";
    }
    write_file_atomic(path, out);
}

}  // namespace bsc::io
