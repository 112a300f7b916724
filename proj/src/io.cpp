#include "surfglm/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "surfglm/errors.hpp"

namespace surfglm {

using nlohmann::json;

namespace {

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in && !in.eof()) throw DataError("read failed: " + path);
  return ss.str();
}

struct ByteWriter {
  std::string bytes;

  void magic(const char* m8) { bytes.append(m8, 8); }
  void u32(std::uint32_t v) { bytes.append(reinterpret_cast<const char*>(&v), 4); }
  void f64(double v) { bytes.append(reinterpret_cast<const char*>(&v), 8); }
  void f64_array(const double* p, std::size_t n) {
    bytes.append(reinterpret_cast<const char*>(p), 8 * n);
  }
  void u8(std::uint8_t v) { bytes.push_back(static_cast<char>(v)); }
};

struct ByteReader {
  const std::string& bytes;
  std::size_t pos = 0;
  std::string path;

  void need(std::size_t n) const {
    if (pos + n > bytes.size())
      throw DataError("truncated file: " + path);
  }
  void magic(const char* m8) {
    need(8);
    if (bytes.compare(pos, 8, m8, 8) != 0)
      throw DataError("bad magic in " + path + " (expected " + std::string(m8, 8) + ")");
    pos += 8;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
  }
  double f64() {
    need(8);
    double v;
    std::memcpy(&v, bytes.data() + pos, 8);
    pos += 8;
    return v;
  }
  void f64_array(double* p, std::size_t n) {
    need(8 * n);
    std::memcpy(p, bytes.data() + pos, 8 * n);
    pos += 8 * n;
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes[pos++]);
  }
  void expect_end() const {
    if (pos != bytes.size()) throw DataError("trailing bytes in " + path);
  }
};

json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError("invalid JSON in " + path);
  return j;
}

}  // namespace

void write_bold(const std::string& path, const Eigen::MatrixXd& Y) {
  ByteWriter w;
  w.magic("SGBOLD01");
  w.u32(static_cast<std::uint32_t>(Y.rows()));
  w.u32(static_cast<std::uint32_t>(Y.cols()));
  for (Eigen::Index t = 0; t < Y.rows(); ++t)
    for (Eigen::Index v = 0; v < Y.cols(); ++v) w.f64(Y(t, v));
  write_file(path, w.bytes);
}

Eigen::MatrixXd read_bold(const std::string& path) {
  const std::string bytes = read_file(path);
  ByteReader r{bytes, 0, path};
  r.magic("SGBOLD01");
  const std::uint32_t T = r.u32();
  const std::uint32_t V = r.u32();
  if (T == 0 || V == 0) throw DataError("empty BOLD matrix in " + path);
  Eigen::MatrixXd Y(T, V);
  for (std::uint32_t t = 0; t < T; ++t)
    for (std::uint32_t v = 0; v < V; ++v) Y(t, v) = r.f64();
  r.expect_end();
  return Y;
}

void write_vertex_map(const std::string& path, const Eigen::VectorXd& values) {
  ByteWriter w;
  w.magic("SGVMAP01");
  w.u32(static_cast<std::uint32_t>(values.size()));
  w.f64_array(values.data(), static_cast<std::size_t>(values.size()));
  write_file(path, w.bytes);
}

Eigen::VectorXd read_vertex_map(const std::string& path) {
  const std::string bytes = read_file(path);
  ByteReader r{bytes, 0, path};
  r.magic("SGVMAP01");
  const std::uint32_t V = r.u32();
  Eigen::VectorXd values(V);
  r.f64_array(values.data(), V);
  r.expect_end();
  return values;
}

void write_active_mask(const std::string& path, const std::vector<bool>& active) {
  ByteWriter w;
  w.magic("SGAMSK01");
  w.u32(static_cast<std::uint32_t>(active.size()));
  for (bool a : active) w.u8(a ? 1 : 0);
  write_file(path, w.bytes);
}

std::vector<bool> read_active_mask(const std::string& path) {
  const std::string bytes = read_file(path);
  ByteReader r{bytes, 0, path};
  r.magic("SGAMSK01");
  const std::uint32_t V = r.u32();
  std::vector<bool> active(V);
  for (std::uint32_t v = 0; v < V; ++v) {
    const std::uint8_t b = r.u8();
    if (b > 1) throw DataError("active mask byte out of range in " + path);
    active[v] = b != 0;
  }
  r.expect_end();
  return active;
}

void write_schedule(const std::string& path, const StimulusSchedule& sched) {
  json j;
  j["TR"] = sched.TR;
  j["n_volumes"] = sched.n_volumes;
  j["n_dropped_initial"] = sched.n_dropped_initial;
  j["onsets"] = sched.onsets;
  j["durations"] = sched.durations;
  write_file(path, j.dump(2) + "\n");
}

StimulusSchedule read_schedule(const std::string& path) {
  json j = parse_json_file(path);
  StimulusSchedule s;
  try {
    s.TR = j.at("TR").get<double>();
    s.n_volumes = j.at("n_volumes").get<int>();
    s.n_dropped_initial = j.value("n_dropped_initial", 0);
    s.onsets = j.at("onsets").get<std::vector<double>>();
    s.durations = j.at("durations").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw DataError("schedule " + path + ": " + e.what());
  }
  s.validate();
  return s;
}

void write_matrix_tsv(const std::string& path, const Eigen::MatrixXd& M) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out << '\t';
      out << M(i, j);
    }
    out << '\n';
  }
  write_file(path, out.str());
}

Eigen::MatrixXd read_matrix_tsv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof())
      throw DataError(path + ":" + std::to_string(lineno) + ": non-numeric token");
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd M(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      throw DataError(path + ": ragged rows (" + std::to_string(rows[i].size()) +
                      " vs " + std::to_string(cols) + " columns)");
    for (std::size_t j = 0; j < cols; ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return M;
}

void write_clinical_tsv(const std::string& path,
                        const std::vector<ClinicalVisit>& visits) {
  std::ostringstream out;
  out << "subject_id\tgroup\tvisit_id\tvisit_date\tenrollment_date\tonset_date";
  for (int i = 1; i <= 12; ++i) out << "\titem" << i;
  out << '\n';
  for (const auto& v : visits) {
    out << v.subject_id << '\t' << v.group << '\t' << v.visit_id << '\t'
        << format_date(v.visit_date) << '\t' << format_date(v.enrollment_date)
        << '\t' << (v.onset_date ? format_date(*v.onset_date) : std::string());
    for (int item : v.items) out << '\t' << item;
    out << '\n';
  }
  write_file(path, out.str());
}

std::vector<ClinicalVisit> read_clinical_tsv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty clinical table: " + path);

  std::vector<ClinicalVisit> visits;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos
                                              ? std::string::npos
                                              : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 18)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 18 columns, got " +
                      std::to_string(fields.size()));
    ClinicalVisit v;
    v.subject_id = fields[0];
    v.group = fields[1];
    if (v.group != "ALS" && v.group != "HC")
      throw DataError(path + ":" + std::to_string(lineno) + ": group must be ALS or HC");
    v.visit_id = fields[2];
    v.visit_date = parse_date(fields[3]);
    v.enrollment_date = parse_date(fields[4]);
    if (!fields[5].empty()) v.onset_date = parse_date(fields[5]);
    for (int i = 0; i < 12; ++i) {
      const std::string& f = fields[static_cast<std::size_t>(6 + i)];
      try {
        std::size_t used = 0;
        const int val = std::stoi(f, &used);
        if (used != f.size() || val < 0 || val > 4) throw std::invalid_argument(f);
        v.items[static_cast<std::size_t>(i)] = val;
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(lineno) + ": item" +
                        std::to_string(i + 1) + " not an integer in 0..4: '" + f + "'");
      }
    }
    visits.push_back(std::move(v));
  }
  return visits;
}

void write_activation_records(const std::string& path,
                              const std::vector<ActivationRecord>& records) {
  std::ostringstream out;
  out.precision(17);
  out << "subject_id\tvisit_id\tmethod\themisphere\tgamma\tarea_mm2\n";
  for (const auto& r : records)
    out << r.subject_id << '\t' << r.visit_id << '\t' << r.method << '\t'
        << r.hemisphere << '\t' << r.gamma << '\t' << r.area << '\n';
  write_file(path, out.str());
}

std::vector<ActivationRecord> read_activation_records(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty records table: " + path);

  std::vector<ActivationRecord> records;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    ActivationRecord r;
    if (!(ls >> r.subject_id >> r.visit_id >> r.method >> r.hemisphere >>
          r.gamma >> r.area))
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed record row");
    records.push_back(std::move(r));
  }
  return records;
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string checksum_file(const std::string& path) {
  const std::string bytes = read_file(path);
  const std::uint64_t h = fnv1a(bytes.data(), bytes.size());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const std::string& path, const StageManifest& m) {
  json j;
  j["stage"] = m.stage;
  j["version"] = m.version;
  j["seed"] = m.seed;
  j["wall_seconds"] = m.wall_seconds;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  write_file(path, j.dump(2) + "\n");
}

StageManifest read_manifest(const std::string& path) {
  json j = parse_json_file(path);
  StageManifest m;
  try {
    m.stage = j.at("stage").get<std::string>();
    m.version = j.value("version", "");
    m.seed = j.value("seed", std::uint64_t{0});
    m.wall_seconds = j.value("wall_seconds", 0.0);
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw DataError("manifest " + path + ": " + e.what());
  }
  return m;
}

bool manifest_satisfied(const std::string& path,
                        const std::map<std::string, std::string>& inputs) {
  StageManifest m;
  try {
    m = read_manifest(path);
  } catch (const DataError&) {
    return false;
  }
  if (m.inputs != inputs) return false;
  for (const auto& [out_path, checksum] : m.outputs) {
    try {
      if (checksum_file(out_path) != checksum) return false;
    } catch (const DataError&) {
      return false;
    }
  }
  return true;
}

}  // namespace surfglm
