#pragma once

#include "bsc/bbc.h"
#include "bsc/eval.h"
#include "bsc/hamming.h"
#include "bsc/ibc.h"
#include "bsc/subspace.h"
#include "bsc/types.h"

#include <filesystem>
#include <string>
#include <vector>

// Persistence: binary matrix/model/index containers (64-bit floats, little
// endian, magic-tagged headers) and line-oriented manifest/run/report text.
// Byte-level layouts are documented in docs/formats.md. All writes go through
// a temp file + rename.

namespace bsc::io {

void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

struct ManifestVideo {
    std::string id;
    std::string path;  // relative to the manifest directory
    std::string category;
};

struct ManifestImage {
    std::string id;
    std::string path;
    std::string category;
    std::string source_video;
};

struct Manifest {
    std::filesystem::path dir;
    std::vector<ManifestVideo> videos;
    std::vector<ManifestImage> images;

    std::filesystem::path resolve(const std::string& rel_path) const { return dir / rel_path; }
    GroundTruth ground_truth() const;
};

/// Parses and validates: unique ids, known record kinds, referenced files
/// present on disk.
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

void write_subspaces(const std::filesystem::path& path, const std::vector<SubspaceEntry>& entries);
std::vector<SubspaceEntry> read_subspaces(const std::filesystem::path& path);

enum class ModelKind : std::uint8_t { Ibc = 1, Bbc = 2 };

void write_ibc_model(const std::filesystem::path& path, const IbcModel& model);
void write_bbc_model(const std::filesystem::path& path, const BbcModel& model);
ModelKind peek_model_kind(const std::filesystem::path& path);
IbcModel read_ibc_model(const std::filesystem::path& path);
BbcModel read_bbc_model(const std::filesystem::path& path);

void write_index(const std::filesystem::path& path, const BinaryIndex& index);
BinaryIndex read_index(const std::filesystem::path& path);

/// One query's ranked output, highest score first.
struct RunEntry {
    std::string query_id;
    std::vector<std::pair<std::string, double>> ranked;  // (video_id, score)
};

void write_run(const std::filesystem::path& path, const std::vector<RunEntry>& entries);
std::vector<RunEntry> read_run(const std::filesystem::path& path);
Run to_run(const std::vector<RunEntry>& entries);

void write_report(const std::filesystem::path& path, const MetricReport& report);
void write_report_table(const std::filesystem::path& path, const MetricReport& report);
std::string format_report(const MetricReport& report);

}  // namespace bsc::io
