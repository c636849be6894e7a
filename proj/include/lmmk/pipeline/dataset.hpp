#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lmmk/matrix.hpp"

namespace lmmk::pipeline {

/// How base kernels are derived from the input.
///  - PerFeature: one kernel per raw column, |x_i^m - x_j^m| distances.
///  - PerRepresentation: one kernel per column block, Euclidean distances
///    within the block. A column named "name:rest" belongs to block "name";
///    a column without ':' is its own block.
///  - Precomputed: one N x N kernel or distance matrix per file.
enum class KernelMode { PerFeature, PerRepresentation, Precomputed };
enum class PrecomputedKind { Kernel, Distance };

std::string_view to_string(KernelMode mode);
KernelMode parse_kernel_mode(std::string_view text);
std::string_view to_string(PrecomputedKind kind);
PrecomputedKind parse_precomputed_kind(std::string_view text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Headered, comma-separated. Every row must have as many fields as the
/// header; ParseError messages carry line and column.
CsvTable read_csv(const std::filesystem::path& path);

/// Headered CSV of numbers.
Matrix read_numeric_csv(const std::filesystem::path& path, std::vector<std::string>* header = nullptr);

/// Binary matrix block, little-endian:
///   8 bytes  magic "LMMKMAT1"
///   u32      rows
///   u32      cols
///   f64[]    rows * cols values, row-major
inline constexpr char kMatrixMagic[8] = {'L', 'M', 'M', 'K', 'M', 'A', 'T', '1'};
void write_matrix_binary(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_binary(const std::filesystem::path& path);

/// Binary if the file starts with the magic bytes, headered CSV otherwise.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

struct LabelSet {
  Labels ids;                            // 1..c
  std::vector<std::string> class_names;  // class_names[id - 1]
};

/// One label per row from a headered CSV: the column named "label" if
/// present, else the only column. Class ids follow sorted class names.
LabelSet read_labels(const std::filesystem::path& path);

/// Maps names onto an existing class list; throws UnknownLabel.
Labels map_labels(const std::vector<std::string>& names, const std::vector<std::string>& class_names);

struct Block {
  std::string name;
  std::vector<Index> columns;
};

std::vector<Block> blocks_from_header(const std::vector<std::string>& header);

struct Dataset {
  KernelMode mode = KernelMode::PerFeature;
  LabelSet labels;

  // PerFeature / PerRepresentation
  Matrix features;
  std::vector<std::string> feature_names;
  std::vector<Block> blocks;

  // Precomputed: full N x N matrices, kernels already normalized.
  PrecomputedKind kind = PrecomputedKind::Kernel;
  std::vector<Matrix> matrices;
  std::vector<std::string> matrix_names;
  std::vector<Vector> raw_diagonals;  // kernel diagonals before normalization

  Index n_samples() const noexcept;
  Index n_kernels() const noexcept;
  std::vector<std::string> kernel_names() const;
};

struct IngestSpec {
  KernelMode mode = KernelMode::PerFeature;
  std::filesystem::path features;
  std::filesystem::path labels;
  std::vector<std::filesystem::path> matrices;
  PrecomputedKind kind = PrecomputedKind::Kernel;
};

Dataset ingest(const IngestSpec& spec);

/// Precomputed matrices without labels (all must be square and equally
/// sized); kernels are normalized, distances validated.
Dataset read_precomputed(const std::vector<std::filesystem::path>& paths, PrecomputedKind kind);

/// In-memory raw-feature dataset (class names "1".."c").
Dataset dataset_from_features(Matrix features, Labels labels, KernelMode mode,
                              std::vector<std::string> feature_names = {});

}  // namespace lmmk::pipeline
