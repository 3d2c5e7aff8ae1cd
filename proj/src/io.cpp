#include "modmpc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace modmpc::io {

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

void append_archive_rows(std::string& out, const moo::Archive& archive, bool front_only) {
  const std::vector<int> rank = moo::ranks(archive.objectives());
  for (size_t i = 0; i < archive.records().size(); ++i) {
    if (front_only && rank[i] != 1) continue;
    const moo::EvalRecord& r = archive.records()[i];
    out += std::to_string(r.eval_index);
    out += ',';
    out += format_double(r.p.h);
    out += ',';
    out += std::to_string(r.p.N);
    out += ',';
    out += format_double(r.l.V);
    out += ',';
    out += format_double(r.l.eta);
    out += ',';
    out += std::to_string(rank[i]);
    out += '\n';
  }
}

}  // namespace

std::string archive_csv(const moo::Archive& archive) {
  std::string out = "eval_index,h,N,V,eta,rank\n";
  append_archive_rows(out, archive, false);
  return out;
}

std::string front_csv(const moo::Archive& archive) {
  std::string out = "eval_index,h,N,V,eta,rank\n";
  append_archive_rows(out, archive, true);
  return out;
}

namespace {

double parse_double(const std::string& field, const std::string& path) {
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::runtime_error("malformed CSV field '" + field + "' in " + path);
  }
  return value;
}

}  // namespace

std::vector<ArchiveRow> read_archive_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open: " + path);
  }
  std::vector<ArchiveRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) {
      fields.push_back(field);
    }
    if (fields.size() != 6) {
      throw std::runtime_error("malformed CSV row in " + path);
    }
    ArchiveRow r;
    r.eval_index = static_cast<int>(parse_double(fields[0], path));
    r.h = parse_double(fields[1], path);
    r.N = static_cast<int>(parse_double(fields[2], path));
    r.V = parse_double(fields[3], path);
    r.eta = parse_double(fields[4], path);
    r.rank = static_cast<int>(parse_double(fields[5], path));
    rows.push_back(r);
  }
  return rows;
}

std::string trajectory_csv(const cloop::Trajectory& traj, double U) {
  const int nx = traj.x.empty() ? 0 : static_cast<int>(traj.x.front().size());
  const int nu = traj.u_at.empty() ? 0 : static_cast<int>(traj.u_at.front().size());

  std::string out = "t";
  for (int i = 1; i <= nx; ++i) out += ",x" + std::to_string(i);
  for (int i = 1; i <= nu; ++i) out += ",u" + std::to_string(i);
  out += ",v\n";

  for (size_t k = 0; k < traj.t.size(); ++k) {
    out += format_double(traj.t[k]);
    for (int i = 0; i < nx; ++i) {
      out += ',';
      out += format_double(traj.x[k][i]);
    }
    for (int i = 0; i < nu; ++i) {
      out += ',';
      out += format_double(traj.u_at[k][i]);
    }
    out += ',';
    out += format_double(traj.v[k]);
    out += '\n';
  }
  out += "# status=";
  out += cloop::to_string(traj.status);
  out += " U=";
  out += format_double(U);
  out += '\n';
  return out;
}

std::string timings_csv(const std::vector<resource::TimingSample>& samples) {
  std::string out = "N,h,rep,seconds\n";
  for (const auto& s : samples) {
    for (size_t rep = 0; rep < s.times.size(); ++rep) {
      out += std::to_string(s.N);
      out += ',';
      out += format_double(s.h);
      out += ',';
      out += std::to_string(rep + 1);
      out += ',';
      out += format_double(s.times[rep]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace modmpc::io
