#include "hbias/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hbias/error.hpp"
#include "text.hpp"

namespace hbias::io {

namespace {

using nlohmann::ordered_json;

bool is_csv(const fs::path& path) { return path.extension() == ".csv"; }

// --- little-endian byte buffers -------------------------------------------

class ByteWriter {
 public:
  void magic(const char* m) { bytes_.append(m, 8); }
  void u64(std::uint64_t v) { put(v, 8); }
  void u32(std::uint32_t v) { put(v, 4); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::string& bytes() { return bytes_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string bytes_;
};

class ByteReader {
 public:
  ByteReader(const std::string& bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

  // Verifies the magic; names the offending magic when it is unknown.
  void expect_magic(const char* expected) {
    if (bytes_.size() < 8) throw Error(source_ + ": file too short for a format header");
    const std::string found = bytes_.substr(0, 8);
    if (found != expected) {
      static const char* known[] = {kFeatureMagic, kHeadMagic, kMatrixMagic};
      for (const char* k : known) {
        if (found == k) {
          throw Error(source_ + ": expected " + expected + " data but file is " + found);
        }
      }
      std::string printable;
      for (char ch : found) printable += (ch >= 32 && ch < 127) ? ch : '?';
      throw Error(source_ + ": unknown format '" + printable + "'");
    }
    pos_ = 8;
  }

  std::uint64_t u64() { return get(8); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  // Checks that exactly `payload` more bytes follow.
  void expect_payload(std::uint64_t payload) {
    const std::uint64_t expected = pos_ + payload;
    if (bytes_.size() < expected) {
      throw Error(source_ + ": truncated payload: expected " + std::to_string(expected) + " bytes, got " +
                  std::to_string(bytes_.size()));
    }
    if (bytes_.size() > expected) {
      throw Error(source_ + ": " + std::to_string(bytes_.size() - expected) + " trailing bytes after payload");
    }
  }

  void need_header(std::size_t n) {
    if (bytes_.size() < pos_ + n) throw Error(source_ + ": truncated header");
  }

 private:
  std::uint64_t get(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += n;
    return v;
  }
  const std::string& bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const std::string& source) {
  if (a != 0 && b > UINT64_MAX / a) throw Error(source + ": header dimensions overflow");
  return a * b;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b, const std::string& source) {
  if (b > UINT64_MAX - a) throw Error(source + ": header dimensions overflow");
  return a + b;
}

std::string g9(double v) { return detail::format_general(v, 9); }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  return in;
}

std::vector<std::string_view> csv_fields(std::string_view line) { return detail::split(line, ','); }

}  // namespace

std::string read_file(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  auto out = open_out(path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

// --- features ---------------------------------------------------------------

FeatureSet read_features(const fs::path& path) {
  const std::string source = path.string();
  if (is_csv(path)) {
    auto in = open_in(path);
    detail::LineReader lines(in, source, false);
    auto header = lines.next();
    if (!header) throw ParseError(source, 0, "empty file");
    const auto cols = csv_fields(*header);
    if (cols.empty() || cols[0] != "label") throw ParseError(source, 1, "header must start with 'label'");
    for (std::size_t j = 1; j < cols.size(); ++j) {
      if (cols[j] != "f" + std::to_string(j - 1)) {
        throw ParseError(source, 1, "expected column 'f" + std::to_string(j - 1) + "'");
      }
    }
    const std::size_t p = cols.size() - 1;
    std::vector<double> values;
    FeatureSet f;
    while (auto line = lines.next()) {
      const auto fields = csv_fields(*line);
      if (fields.size() != cols.size()) {
        throw ParseError(source, lines.number(), "expected " + std::to_string(cols.size()) + " fields");
      }
      std::size_t label = 0;
      if (!detail::parse_uint(fields[0], label) || label > UINT32_MAX) {
        throw ParseError(source, lines.number(), "invalid label '" + std::string(fields[0]) + "'");
      }
      f.labels.push_back(static_cast<Label>(label));
      f.class_count = std::max(f.class_count, label + 1);
      for (std::size_t j = 1; j < fields.size(); ++j) {
        double v = 0.0;
        if (!detail::parse_number(fields[j], v) || !std::isfinite(v)) {
          throw ParseError(source, lines.number(), "non-finite or invalid value in column f" + std::to_string(j - 1));
        }
        values.push_back(v);
      }
    }
    f.vectors = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), static_cast<Eigen::Index>(f.labels.size()), static_cast<Eigen::Index>(p));
    return f;
  }

  const std::string bytes = read_file(path);
  ByteReader r(bytes, source);
  r.expect_magic(kFeatureMagic);
  r.need_header(24);
  const std::uint64_t n = r.u64(), p = r.u64(), c = r.u64();
  r.expect_payload(checked_add(checked_mul(n, 4, source), checked_mul(checked_mul(n, p, source), 4, source), source));
  FeatureSet f;
  f.class_count = c;
  f.labels.resize(n);
  for (auto& l : f.labels) {
    l = r.u32();
    if (l >= c) throw Error(source + ": label " + std::to_string(l) + " >= C=" + std::to_string(c));
  }
  f.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < f.vectors.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.vectors.cols(); ++j) {
      const float v = r.f32();
      if (!std::isfinite(v)) {
        throw Error(source + ": non-finite value at row " + std::to_string(i) + ", column " + std::to_string(j));
      }
      f.vectors(i, j) = v;
    }
  }
  return f;
}

void write_features(const FeatureSet& f, const fs::path& path) {
  f.validate();
  if (is_csv(path)) {
    std::string out = "label";
    for (std::size_t j = 0; j < f.dim(); ++j) out += ",f" + std::to_string(j);
    out += '\n';
    for (Eigen::Index i = 0; i < f.vectors.rows(); ++i) {
      out += std::to_string(f.labels[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < f.vectors.cols(); ++j) out += "," + g9(f.vectors(i, j));
      out += '\n';
    }
    write_file(path, out);
    return;
  }
  ByteWriter w;
  w.magic(kFeatureMagic);
  w.u64(f.size());
  w.u64(f.dim());
  w.u64(f.class_count);
  for (Label l : f.labels) w.u32(l);
  for (Eigen::Index i = 0; i < f.vectors.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.vectors.cols(); ++j) w.f32(static_cast<float>(f.vectors(i, j)));
  }
  write_file(path, w.bytes());
}

// --- classifier head ----------------------------------------------------------

ClassifierHead read_head(const fs::path& path) {
  const std::string source = path.string();
  const std::string bytes = read_file(path);
  ByteReader r(bytes, source);
  r.expect_magic(kHeadMagic);
  r.need_header(16);
  const std::uint64_t c = r.u64(), p = r.u64();
  r.expect_payload(checked_mul(checked_add(checked_mul(c, p, source), c, source), 4, source));
  ClassifierHead head{Matrix(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(p)),
                      Vector(static_cast<Eigen::Index>(c))};
  auto next = [&] {
    const float v = r.f32();
    if (!std::isfinite(v)) throw Error(source + ": non-finite value in classifier head");
    return static_cast<double>(v);
  };
  for (Eigen::Index i = 0; i < head.weights.rows(); ++i) {
    for (Eigen::Index j = 0; j < head.weights.cols(); ++j) head.weights(i, j) = next();
  }
  for (Eigen::Index i = 0; i < head.bias.size(); ++i) head.bias(i) = next();
  return head;
}

void write_head(const ClassifierHead& head, const fs::path& path) {
  if (head.bias.size() != head.weights.rows()) throw Error("classifier head: bias length differs from row count");
  ByteWriter w;
  w.magic(kHeadMagic);
  w.u64(static_cast<std::uint64_t>(head.weights.rows()));
  w.u64(static_cast<std::uint64_t>(head.weights.cols()));
  for (Eigen::Index i = 0; i < head.weights.rows(); ++i) {
    for (Eigen::Index j = 0; j < head.weights.cols(); ++j) w.f32(static_cast<float>(head.weights(i, j)));
  }
  for (Eigen::Index i = 0; i < head.bias.size(); ++i) w.f32(static_cast<float>(head.bias(i)));
  write_file(path, w.bytes());
}

// --- square matrices ------------------------------------------------------------

namespace {

std::string matrix_csv(const std::vector<Label>& labels, const Matrix& values) {
  std::string out = "class";
  for (Label l : labels) out += "," + std::to_string(l);
  out += '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out += std::to_string(labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < values.cols(); ++j) out += "," + g9(values(i, j));
    out += '\n';
  }
  return out;
}

std::string matrix_binary(const Matrix& values) {
  ByteWriter w;
  w.magic(kMatrixMagic);
  w.u64(static_cast<std::uint64_t>(values.rows()));
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) w.f64(values(i, j));
  }
  return std::move(w.bytes());
}

}  // namespace

DistanceMatrix read_distance_matrix(const fs::path& path) {
  const std::string source = path.string();
  DistanceMatrix d;
  if (is_csv(path)) {
    auto in = open_in(path);
    detail::LineReader lines(in, source, false);
    auto header = lines.next();
    if (!header) throw ParseError(source, 0, "empty file");
    const auto cols = csv_fields(*header);
    for (std::size_t j = 1; j < cols.size(); ++j) {
      std::size_t l = 0;
      if (!detail::parse_uint(cols[j], l)) throw ParseError(source, 1, "invalid class id '" + std::string(cols[j]) + "'");
      d.labels.push_back(static_cast<Label>(l));
    }
    const auto n = static_cast<Eigen::Index>(d.labels.size());
    d.values.resize(n, n);
    Eigen::Index row = 0;
    while (auto line = lines.next()) {
      const auto fields = csv_fields(*line);
      if (row >= n || fields.size() != cols.size()) throw ParseError(source, lines.number(), "malformed matrix row");
      std::size_t l = 0;
      if (!detail::parse_uint(fields[0], l) || l != d.labels[static_cast<std::size_t>(row)]) {
        throw ParseError(source, lines.number(), "row id does not match the header");
      }
      for (std::size_t j = 1; j < fields.size(); ++j) {
        double v = 0.0;
        if (!detail::parse_number(fields[j], v)) throw ParseError(source, lines.number(), "invalid number");
        d.values(row, static_cast<Eigen::Index>(j - 1)) = v;
      }
      ++row;
    }
    if (row != n) throw ParseError(source, lines.number(), "expected " + std::to_string(n) + " rows");
  } else {
    const std::string bytes = read_file(path);
    ByteReader r(bytes, source);
    r.expect_magic(kMatrixMagic);
    r.need_header(8);
    const std::uint64_t n = r.u64();
    r.expect_payload(checked_mul(checked_mul(n, n, source), 8, source));
    d.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.labels[i] = static_cast<Label>(i);
    d.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < d.values.rows(); ++i) {
      for (Eigen::Index j = 0; j < d.values.cols(); ++j) d.values(i, j) = r.f64();
    }
  }
  d.validate();
  return d;
}

void write_distance_matrix(const DistanceMatrix& d, const fs::path& path) {
  write_file(path, is_csv(path) ? matrix_csv(d.labels, d.values) : matrix_binary(d.values));
}

void write_similarity_matrix(const SimilarityMatrix& a, const fs::path& path) {
  write_file(path, is_csv(path) ? matrix_csv(a.labels, a.values) : matrix_binary(a.values));
}

// --- prediction logs ----------------------------------------------------------------

PredictionLog read_predictions(const fs::path& path, std::optional<std::size_t> label_count) {
  const std::string source = path.string();
  auto in = open_in(path);
  detail::LineReader lines(in, source, false);
  auto header = lines.next();
  if (!header) throw ParseError(source, 0, "empty file");
  const auto cols = csv_fields(*header);
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < cols.size(); ++j) index[std::string(cols[j])] = j;
  std::size_t col[4];
  const char* required[4] = {"epoch", "example_id", "true_label", "pred_label"};
  for (int k = 0; k < 4; ++k) {
    auto it = index.find(required[k]);
    if (it == index.end()) throw ParseError(source, 1, std::string("missing required column '") + required[k] + "'");
    col[k] = it->second;
  }

  std::vector<PredictionRecord> records;
  std::map<std::pair<Epoch, std::string>, std::size_t> seen;
  std::size_t max_label = 0;
  while (auto line = lines.next()) {
    const auto fields = csv_fields(*line);
    if (fields.size() != cols.size()) {
      throw ParseError(source, lines.number(), "expected " + std::to_string(cols.size()) + " fields");
    }
    PredictionRecord r;
    if (!detail::parse_number(fields[col[0]], r.epoch) || r.epoch < 0) {
      throw ParseError(source, lines.number(), "epoch must be a non-negative integer, got '" +
                                                   std::string(fields[col[0]]) + "'");
    }
    r.example_id = std::string(fields[col[1]]);
    std::size_t labels[2];
    for (int k = 0; k < 2; ++k) {
      if (!detail::parse_uint(fields[col[2 + k]], labels[k]) || labels[k] > UINT32_MAX) {
        throw ParseError(source, lines.number(), std::string("invalid ") + required[2 + k]);
      }
      if (label_count && labels[k] >= *label_count) {
        throw ParseError(source, lines.number(), std::string(required[2 + k]) + " " + std::to_string(labels[k]) +
                                                     " out of range (" + std::to_string(*label_count) + " labels)");
      }
      max_label = std::max(max_label, labels[k]);
    }
    r.true_label = static_cast<Label>(labels[0]);
    r.pred_label = static_cast<Label>(labels[1]);
    auto [it, inserted] = seen.try_emplace({r.epoch, r.example_id}, lines.number());
    if (!inserted) {
      throw ParseError(source, lines.number(), "duplicate (epoch " + std::to_string(r.epoch) + ", example '" +
                                                   r.example_id + "'), first seen on line " +
                                                   std::to_string(it->second));
    }
    records.push_back(std::move(r));
  }
  const std::size_t count = label_count ? *label_count : (records.empty() ? 0 : max_label + 1);
  return PredictionLog(std::move(records), count);
}

void write_predictions(const PredictionLog& log, const fs::path& path) {
  std::string out = "epoch,example_id,true_label,pred_label\n";
  for (const auto& r : log.records()) {
    if (r.example_id.find_first_of(",\n\r") != std::string::npos) {
      throw Error("prediction log: example id '" + r.example_id + "' contains a separator");
    }
    out += std::to_string(r.epoch) + ',' + r.example_id + ',' + std::to_string(r.true_label) + ',' +
           std::to_string(r.pred_label) + '\n';
  }
  write_file(path, out);
}

// --- hierarchy, groups, label spaces ---------------------------------------------

Hierarchy read_hierarchy(const fs::path& edges, const fs::path& classes) {
  auto e = open_in(edges);
  auto c = open_in(classes);
  try {
    return parse_hierarchy(e, c);
  } catch (const ParseError& err) {
    throw Error(std::string(err.what()) + " (" + edges.string() + ", " + classes.string() + ")");
  }
}

void write_hierarchy(const Hierarchy& h, const fs::path& edges, const fs::path& classes) {
  std::string e;
  for (NodeId n = 0; n < h.node_count(); ++n) {
    for (NodeId c : h.children(n)) e += h.name(n) + '\t' + h.name(c) + '\n';
  }
  write_file(edges, e);
  std::string c;
  for (Label l = 0; l < h.class_count(); ++l) c += std::to_string(l) + '\t' + h.name(h.class_node(l)) + '\n';
  write_file(classes, c);
}

std::vector<GroupSpec> read_groups(std::istream& in) {
  std::vector<GroupSpec> out;
  detail::LineReader lines(in, "grouping spec");
  while (auto line = lines.next()) {
    const auto fields = detail::split(*line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("grouping spec", lines.number(), "expected 'superclass_name<TAB>node[,node...]'");
    }
    GroupSpec g{std::string(fields[0]), {}};
    for (auto node : detail::split(fields[1], ',')) {
      if (node.empty()) throw ParseError("grouping spec", lines.number(), "empty node id");
      g.nodes.emplace_back(node);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GroupSpec> read_groups(const fs::path& path) {
  auto in = open_in(path);
  return read_groups(in);
}

LabelSpace read_labelspace(std::istream& in) {
  std::map<std::size_t, Label> table;
  std::map<std::size_t, std::string> names;
  std::string space_name = "labelspace";
  detail::LineReader lines(in, "label space", false);
  while (auto line = lines.next()) {
    if (line->front() == '#') {
      const auto fields = detail::split(line->substr(1), '\t');
      std::size_t idx = 0;
      if (fields.size() == 2 && fields[0] == "label_space") {
        space_name = std::string(fields[1]);
      } else if (fields.size() == 3 && fields[0] == "superclass" && detail::parse_uint(fields[1], idx)) {
        names[idx] = std::string(fields[2]);
      }
      continue;
    }
    const auto fields = detail::split(*line, '\t');
    std::size_t c = 0, s = 0;
    if (fields.size() != 2 || !detail::parse_uint(fields[0], c) || !detail::parse_uint(fields[1], s) ||
        s > UINT32_MAX) {
      throw ParseError("label space", lines.number(), "expected 'class_index<TAB>superclass_index'");
    }
    if (!table.emplace(c, static_cast<Label>(s)).second) {
      throw ParseError("label space", lines.number(), "class " + std::to_string(c) + " listed twice");
    }
  }
  LabelMapping m;
  for (const auto& [c, s] : table) {
    if (c != m.table.size()) throw ParseError("label space", 0, "class " + std::to_string(m.table.size()) + " missing");
    m.table.push_back(s);
  }
  std::size_t count = 0;
  for (Label s : m.table) count = std::max<std::size_t>(count, s + 1);
  std::vector<std::string> name_list;
  if (!names.empty()) {
    for (std::size_t s = 0; s < count; ++s) {
      auto it = names.find(s);
      name_list.push_back(it == names.end() ? std::to_string(s) : it->second);
    }
  }
  return LabelSpace::from_mapping(space_name, std::move(m), std::move(name_list));
}

LabelSpace read_labelspace(const fs::path& path) {
  auto in = open_in(path);
  try {
    return read_labelspace(in);
  } catch (const ParseError& err) {
    throw Error(path.string() + ": " + err.what());
  }
}

void write_labelspace(const LabelSpace& s, std::ostream& out) {
  out << "#label_space\t" << s.name() << '\n';
  for (std::size_t k = 0; k < s.size(); ++k) out << "#superclass\t" << k << '\t' << s[k].name << '\n';
  for (Label c = 0; c < s.class_count(); ++c) out << c << '\t' << s.mapping()[c] << '\n';
}

void write_labelspace(const LabelSpace& s, const fs::path& path) {
  std::ostringstream out;
  write_labelspace(s, out);
  write_file(path, out.str());
}

// --- tables -------------------------------------------------------------------------

namespace {

const char* scale_name(Scale s) {
  switch (s) {
    case Scale::percent: return "percent";
    case Scale::unit: return "unit";
    case Scale::signed_: return "signed";
  }
  return "unknown";
}

// Rounds through the fixed-decimal text form so JSON and CSV agree.
double rounded(double v, int decimals) {
  double out = 0.0;
  const auto text = detail::format_fixed(v, decimals);
  detail::parse_number(std::string_view(text), out);
  return out;
}

}  // namespace

std::string to_json(const MetricSeries& series) {
  ordered_json j;
  j["scale"] = scale_name(series.scale);
  j["series"] = ordered_json::array();
  for (const auto& p : series.points) {
    j["series"].push_back({{"epoch", p.epoch}, {"value", rounded(p.value, 6)}});
  }
  return j.dump(2) + "\n";
}

std::string to_json(const NCReport& r) {
  ordered_json j;
  j["nc1"] = r.nc1;
  j["beta_mu"] = r.beta_mu;
  j["beta_w"] = r.beta_w;
  j["alpha_mu"] = r.alpha_mu;
  j["alpha_w"] = r.alpha_w;
  j["nc3"] = r.nc3;
  j["nc4"] = r.nc4;
  j["label_space"] = r.label_space;
  j["degenerate_flags"] = r.degenerate_flags;
  return j.dump(2) + "\n";
}

void write_table(const MetricSeries& series, const fs::path& path, TableFormat format) {
  if (format == TableFormat::json) {
    write_file(path, to_json(series));
    return;
  }
  std::string out = "epoch,value\n";
  for (const auto& p : series.points) out += std::to_string(p.epoch) + ',' + detail::format_fixed(p.value, 6) + '\n';
  write_file(path, out);
}

void write_table(const NCReport& r, const fs::path& path, TableFormat format) {
  if (format == TableFormat::json) {
    write_file(path, to_json(r));
    return;
  }
  std::string out = "metric,value\n";
  const std::pair<const char*, double> rows[] = {{"nc1", r.nc1},         {"beta_mu", r.beta_mu},
                                                 {"beta_w", r.beta_w},   {"alpha_mu", r.alpha_mu},
                                                 {"alpha_w", r.alpha_w}, {"nc3", r.nc3},
                                                 {"nc4", r.nc4}};
  for (const auto& [name, v] : rows) out += std::string(name) + ',' + g9(v) + '\n';
  write_file(path, out);
}

void write_table(const DistanceMatrix& d, const fs::path& path, TableFormat format) {
  if (format == TableFormat::json) {
    ordered_json j;
    j["labels"] = d.labels;
    j["values"] = ordered_json::array();
    for (Eigen::Index i = 0; i < d.values.rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index k = 0; k < d.values.cols(); ++k) row.push_back(d.values(i, k));
      j["values"].push_back(std::move(row));
    }
    write_file(path, j.dump(2) + "\n");
    return;
  }
  write_file(path, matrix_csv(d.labels, d.values));
}

void write_table(const ConfusionMatrix& m, const fs::path& path, TableFormat format) {
  if (format == TableFormat::json) {
    ordered_json j;
    j["order"] = m.order;
    j["counts"] = ordered_json::array();
    for (Eigen::Index i = 0; i < m.counts.rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index k = 0; k < m.counts.cols(); ++k) row.push_back(m.counts(i, k));
      j["counts"].push_back(std::move(row));
    }
    write_file(path, j.dump(2) + "\n");
    return;
  }
  std::string out = "true\\pred";
  for (Label l : m.order) out += "," + std::to_string(l);
  out += '\n';
  for (Eigen::Index i = 0; i < m.counts.rows(); ++i) {
    out += std::to_string(m.order[static_cast<std::size_t>(i)]);
    for (Eigen::Index k = 0; k < m.counts.cols(); ++k) out += "," + std::to_string(m.counts(i, k));
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace hbias::io
