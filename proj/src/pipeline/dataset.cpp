#include "lmmk/pipeline/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include "lmmk/error.hpp"
#include "lmmk/kernelspace.hpp"

namespace lmmk::pipeline {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string location(const std::filesystem::path& path, std::size_t line, std::size_t column) {
  return path.string() + ":" + std::to_string(line) + ":" + std::to_string(column);
}

double parse_number(const std::string& field, const std::filesystem::path& path, std::size_t line,
                    std::size_t column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    throw Error(ErrorCode::ParseError, location(path, line, column) + ": '" + field + "' is not a finite number");
  return value;
}

std::ifstream open(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
    throw Error(ErrorCode::ParseError, path.string() + ": truncated binary matrix");
  return value;
}

}  // namespace

std::string_view to_string(KernelMode mode) {
  switch (mode) {
    case KernelMode::PerFeature: return "per-feature";
    case KernelMode::PerRepresentation: return "per-representation";
    case KernelMode::Precomputed: return "precomputed";
  }
  return "unknown";
}

KernelMode parse_kernel_mode(std::string_view text) {
  if (text == "per-feature") return KernelMode::PerFeature;
  if (text == "per-representation") return KernelMode::PerRepresentation;
  if (text == "precomputed") return KernelMode::Precomputed;
  throw Error(ErrorCode::ConfigError, "unknown kernel mode '" + std::string(text) +
                                          "' (per-feature, per-representation, precomputed)");
}

std::string_view to_string(PrecomputedKind kind) { return kind == PrecomputedKind::Kernel ? "kernel" : "distance"; }

PrecomputedKind parse_precomputed_kind(std::string_view text) {
  if (text == "kernel") return PrecomputedKind::Kernel;
  if (text == "distance") return PrecomputedKind::Distance;
  throw Error(ErrorCode::ConfigError, "unknown precomputed kind '" + std::string(text) + "' (kernel, distance)");
}

CsvTable read_csv(const std::filesystem::path& path) {
  auto in = open(path);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_line(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size())
      throw Error(ErrorCode::ParseError, location(path, line_no, std::min(fields.size(), table.header.size()) + 1) +
                                             ": row " + std::to_string(table.rows.size() + 1) + " has " +
                                             std::to_string(fields.size()) + " fields, header has " +
                                             std::to_string(table.header.size()));
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
  return table;
}

Matrix read_numeric_csv(const std::filesystem::path& path, std::vector<std::string>* header) {
  auto in = open(path);
  Matrix out;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_line(line);
    if (names.empty()) {
      names = std::move(fields);
      continue;
    }
    if (fields.size() != names.size())
      throw Error(ErrorCode::ParseError, location(path, line_no, std::min(fields.size(), names.size()) + 1) +
                                             ": row " + std::to_string(rows.size() + 1) + " has " +
                                             std::to_string(fields.size()) + " fields, header has " +
                                             std::to_string(names.size()));
    std::vector<double> values;
    values.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) values.push_back(parse_number(fields[c], path, line_no, c + 1));
    rows.push_back(std::move(values));
  }
  if (names.empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
  out.resize(static_cast<Index>(rows.size()), static_cast<Index>(names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < names.size(); ++c) out(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  if (header) *header = std::move(names);
  return out;
}

void write_matrix_binary(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(kMatrixMagic, sizeof(kMatrixMagic));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) write_le<double>(out, m(i, j));
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

Matrix read_matrix_binary(const std::filesystem::path& path) {
  auto in = open(path, std::ios::binary);
  char magic[sizeof(kMatrixMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMatrixMagic, sizeof(magic)) != 0)
    throw Error(ErrorCode::ParseError, path.string() + ": missing LMMKMAT1 magic");
  const auto rows = read_le<std::uint32_t>(in, path);
  const auto cols = read_le<std::uint32_t>(in, path);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = read_le<double>(in, path);
  return m;
}

Matrix read_matrix(const std::filesystem::path& path) {
  {
    auto in = open(path, std::ios::binary);
    char magic[sizeof(kMatrixMagic)] = {};
    in.read(magic, sizeof(magic));
    if (in.gcount() == sizeof(magic) && std::memcmp(magic, kMatrixMagic, sizeof(magic)) == 0)
      return read_matrix_binary(path);
  }
  return read_numeric_csv(path);
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.precision(17);
  for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << 'c' << j;
  out << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

LabelSet read_labels(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  std::size_t column = 0;
  if (table.header.size() > 1) {
    const auto it = std::find(table.header.begin(), table.header.end(), "label");
    if (it == table.header.end())
      throw Error(ErrorCode::ParseError, path.string() + ": several columns and none named 'label'");
    column = static_cast<std::size_t>(it - table.header.begin());
  }
  std::vector<std::string> names;
  names.reserve(table.rows.size());
  for (const auto& row : table.rows) names.push_back(row[column]);
  if (names.empty()) throw Error(ErrorCode::ParseError, path.string() + ": no labels");

  const std::set<std::string> unique(names.begin(), names.end());
  LabelSet out;
  out.class_names.assign(unique.begin(), unique.end());
  out.ids = map_labels(names, out.class_names);
  return out;
}

Labels map_labels(const std::vector<std::string>& names, const std::vector<std::string>& class_names) {
  std::map<std::string, Label> ids;
  for (std::size_t c = 0; c < class_names.size(); ++c) ids[class_names[c]] = static_cast<Label>(c + 1);
  Labels out;
  out.reserve(names.size());
  for (const auto& name : names) {
    const auto it = ids.find(name);
    if (it == ids.end()) throw Error(ErrorCode::UnknownLabel, "label '" + name + "' is not a known class");
    out.push_back(it->second);
  }
  return out;
}

std::vector<Block> blocks_from_header(const std::vector<std::string>& header) {
  std::vector<Block> blocks;
  std::map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto colon = header[c].find(':');
    const std::string name = colon == std::string::npos ? header[c] : header[c].substr(0, colon);
    auto [it, inserted] = position.try_emplace(name, blocks.size());
    if (inserted) blocks.push_back({name, {}});
    blocks[it->second].columns.push_back(static_cast<Index>(c));
  }
  return blocks;
}

Index Dataset::n_samples() const noexcept {
  if (mode == KernelMode::Precomputed) return matrices.empty() ? static_cast<Index>(labels.ids.size()) : matrices.front().rows();
  return features.rows() > 0 ? features.rows() : static_cast<Index>(labels.ids.size());
}

Index Dataset::n_kernels() const noexcept {
  switch (mode) {
    case KernelMode::PerFeature: return features.cols();
    case KernelMode::PerRepresentation: return static_cast<Index>(blocks.size());
    case KernelMode::Precomputed: return static_cast<Index>(matrices.size());
  }
  return 0;
}

std::vector<std::string> Dataset::kernel_names() const {
  switch (mode) {
    case KernelMode::PerFeature: return feature_names;
    case KernelMode::PerRepresentation: {
      std::vector<std::string> names;
      for (const auto& b : blocks) names.push_back(b.name);
      return names;
    }
    case KernelMode::Precomputed: return matrix_names;
  }
  return {};
}

Dataset ingest(const IngestSpec& spec) {
  Dataset data;
  data.mode = spec.mode;
  if (spec.labels.empty()) throw Error(ErrorCode::ConfigError, "a label file is required");
  data.labels = read_labels(spec.labels);
  const Index n = data.n_samples();

  if (spec.mode == KernelMode::Precomputed) {
    if (spec.matrices.empty()) throw Error(ErrorCode::ConfigError, "precomputed mode needs at least one matrix file");
    Dataset pre = read_precomputed(spec.matrices, spec.kind);
    if (pre.n_samples() != n)
      throw Error(ErrorCode::ShapeMismatch, "matrices are " + std::to_string(pre.n_samples()) + "x" +
                                                std::to_string(pre.n_samples()) + " but there are " +
                                                std::to_string(n) + " labels");
    pre.labels = std::move(data.labels);
    return pre;
  }

  if (spec.features.empty()) throw Error(ErrorCode::ConfigError, "a features file is required");
  data.features = read_numeric_csv(spec.features, &data.feature_names);
  if (data.features.rows() != n)
    throw Error(ErrorCode::ShapeMismatch, spec.features.string() + " has " + std::to_string(data.features.rows()) +
                                              " rows but there are " + std::to_string(n) + " labels");
  if (spec.mode == KernelMode::PerRepresentation) data.blocks = blocks_from_header(data.feature_names);
  return data;
}

Dataset read_precomputed(const std::vector<std::filesystem::path>& paths, PrecomputedKind kind) {
  Dataset data;
  data.mode = KernelMode::Precomputed;
  data.kind = kind;
  for (const auto& path : paths) {
    Matrix m = read_matrix(path);
    const Index n = data.matrices.empty() ? m.rows() : data.matrices.front().rows();
    if (m.rows() != n || m.cols() != n)
      throw Error(ErrorCode::ShapeMismatch, path.string() + " is " + std::to_string(m.rows()) + "x" +
                                                std::to_string(m.cols()) + ", expected " + std::to_string(n) + "x" +
                                                std::to_string(n));
    if (kind == PrecomputedKind::Kernel) {
      data.raw_diagonals.push_back(m.diagonal());
      const KernelMatrix k = normalize_kernel(KernelMatrix(std::move(m)));
      check_psd(k, path.stem().string());
      data.matrices.push_back(k.values());
    } else {
      data.matrices.push_back(DistanceMatrix(std::move(m)).values());
    }
    data.matrix_names.push_back(path.stem().string());
  }
  return data;
}

Dataset dataset_from_features(Matrix features, Labels labels, KernelMode mode, std::vector<std::string> feature_names) {
  if (mode == KernelMode::Precomputed) throw Error(ErrorCode::InvalidArgument, "raw features need a raw kernel mode");
  if (features.rows() != static_cast<Index>(labels.size()))
    throw Error(ErrorCode::ShapeMismatch, "features and labels differ in sample count");
  Dataset data;
  data.mode = mode;
  if (feature_names.empty())
    for (Index f = 0; f < features.cols(); ++f) feature_names.push_back("f" + std::to_string(f));
  Label max_label = 0;
  for (Label l : labels) {
    if (l < 1) throw Error(ErrorCode::InvalidArgument, "class ids must be >= 1");
    max_label = std::max(max_label, l);
  }
  for (Label c = 1; c <= max_label; ++c) data.labels.class_names.push_back(std::to_string(c));
  data.labels.ids = std::move(labels);
  data.features = std::move(features);
  data.feature_names = std::move(feature_names);
  if (mode == KernelMode::PerRepresentation) data.blocks = blocks_from_header(data.feature_names);
  return data;
}

}  // namespace lmmk::pipeline
