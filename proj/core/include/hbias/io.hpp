#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hbias/collapse.hpp"
#include "hbias/features.hpp"
#include "hbias/hierarchy.hpp"
#include "hbias/labelspace.hpp"
#include "hbias/manifold.hpp"
#include "hbias/metrics.hpp"

namespace hbias::io {

namespace fs = std::filesystem;

// Binary formats are little-endian: an 8-byte magic followed by 64-bit
// unsigned dimensions and the payload.
//   HBFEAT01  N, p, C; N uint32 labels; N*p float32 row-major
//   HBHEAD01  C, p; C*p float32 weights row-major; C float32 bias
//   HBDMAT01  n; n*n float64 row-major
inline constexpr char kFeatureMagic[] = "HBFEAT01";
inline constexpr char kHeadMagic[] = "HBHEAD01";
inline constexpr char kMatrixMagic[] = "HBDMAT01";

enum class TableFormat { csv, json };

// Paths ending in ".csv" use the CSV form (`label,f0,...`); anything else is
// HBFEAT01. Binary vectors are stored as float32.
FeatureSet read_features(const fs::path& path);
void write_features(const FeatureSet& f, const fs::path& path);

ClassifierHead read_head(const fs::path& path);
void write_head(const ClassifierHead& head, const fs::path& path);

// ".csv": class ids on the first row and column; otherwise HBDMAT01, whose
// labels read back as 0..n-1.
DistanceMatrix read_distance_matrix(const fs::path& path);
void write_distance_matrix(const DistanceMatrix& d, const fs::path& path);
void write_similarity_matrix(const SimilarityMatrix& a, const fs::path& path);

// CSV with header `epoch,example_id,true_label,pred_label` (any column
// order). The label count defaults to the largest label + 1.
PredictionLog read_predictions(const fs::path& path, std::optional<std::size_t> label_count = std::nullopt);
void write_predictions(const PredictionLog& log, const fs::path& path);

Hierarchy read_hierarchy(const fs::path& edges, const fs::path& classes);
void write_hierarchy(const Hierarchy& h, const fs::path& edges, const fs::path& classes);

// `superclass_name<TAB>node[,node...]` per line.
std::vector<GroupSpec> read_groups(std::istream& in);
std::vector<GroupSpec> read_groups(const fs::path& path);

// `class_index<TAB>superclass_index` per line. Names travel in `#` comment
// lines, which readers of the bare two-column format ignore.
LabelSpace read_labelspace(std::istream& in);
LabelSpace read_labelspace(const fs::path& path);
void write_labelspace(const LabelSpace& s, std::ostream& out);
void write_labelspace(const LabelSpace& s, const fs::path& path);

// `epoch,value` with six decimals, or {"scale": ..., "series": [...]}.
void write_table(const MetricSeries& series, const fs::path& path, TableFormat format = TableFormat::csv);
// JSON object, or a CSV of `metric,value` rows.
void write_table(const NCReport& report, const fs::path& path, TableFormat format = TableFormat::json);
void write_table(const DistanceMatrix& d, const fs::path& path, TableFormat format = TableFormat::csv);
void write_table(const ConfusionMatrix& m, const fs::path& path, TableFormat format = TableFormat::csv);

std::string to_json(const NCReport& report);
std::string to_json(const MetricSeries& series);

// Whole file as bytes; throws hbias::Error if unreadable.
std::string read_file(const fs::path& path);
// Replaces the file contents; throws hbias::Error if unwritable.
void write_file(const fs::path& path, const std::string& bytes);

}  // namespace hbias::io
