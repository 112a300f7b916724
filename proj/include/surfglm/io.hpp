#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "surfglm/clinical.hpp"
#include "surfglm/hrf.hpp"
#include "surfglm/summary.hpp"

namespace surfglm {

// Binary container formats (little-endian, 8-byte ASCII magic):
//   SGBOLD01  u32 n_volumes, u32 n_vertices, f64 data (volume-major rows)
//   SGVMAP01  u32 n_vertices, f64 values
//   SGAMSK01  u32 n_vertices, u8 flags
void write_bold(const std::string& path, const Eigen::MatrixXd& Y);
Eigen::MatrixXd read_bold(const std::string& path);

void write_vertex_map(const std::string& path, const Eigen::VectorXd& values);
Eigen::VectorXd read_vertex_map(const std::string& path);

void write_active_mask(const std::string& path, const std::vector<bool>& active);
std::vector<bool> read_active_mask(const std::string& path);

// Stimulus schedules as JSON: TR, n_volumes, n_dropped_initial, onsets,
// durations.
void write_schedule(const std::string& path, const StimulusSchedule& sched);
StimulusSchedule read_schedule(const std::string& path);

// Numeric matrix as TSV (no header); empty matrix allowed.
void write_matrix_tsv(const std::string& path, const Eigen::MatrixXd& M);
Eigen::MatrixXd read_matrix_tsv(const std::string& path);

// Clinical table: one row per visit, tab-separated with header
// subject_id group visit_id visit_date enrollment_date onset_date item1..item12
// (onset_date empty for HC rows).
void write_clinical_tsv(const std::string& path,
                        const std::vector<ClinicalVisit>& visits);
std::vector<ClinicalVisit> read_clinical_tsv(const std::string& path);

void write_activation_records(const std::string& path,
                              const std::vector<ActivationRecord>& records);
std::vector<ActivationRecord> read_activation_records(const std::string& path);

/// FNV-1a (64-bit) over a byte buffer.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Checksum of a file's contents, as a fixed-width hex string. Throws
/// DataError if the file cannot be read.
std::string checksum_file(const std::string& path);

/// Per-stage record of inputs/outputs with checksums, for resumable runs.
struct StageManifest {
  std::string stage;
  std::string version;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::map<std::string, std::string> inputs;   // path -> checksum
  std::map<std::string, std::string> outputs;  // path -> checksum
};

void write_manifest(const std::string& path, const StageManifest& m);
StageManifest read_manifest(const std::string& path);

/// True when the manifest at `path` exists, lists exactly these inputs with
/// matching checksums, and every recorded output still exists with a
/// matching checksum — i.e. the stage can be skipped.
bool manifest_satisfied(const std::string& path,
                        const std::map<std::string, std::string>& inputs);

}  // namespace surfglm
