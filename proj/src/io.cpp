#include "kslab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kslab/errors.hpp"

namespace kslab {

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw IoError("short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename " + tmp + " -> " + path + ": " + ec.message());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_profile_csv(const SteadyProfile& p, const std::string& path) {
  std::ostringstream os;
  write_profile_csv(p, os);
  atomic_write(path, os.str());
}

void save_series_csv(const std::vector<SeriesRow>& rows, const std::string& path) {
  std::ostringstream os;
  os << "t,normL,normC1,lyapunov,min_ux,sup_ratio\n";
  for (const auto& r : rows) {
    os << format_double(r.t) << ',' << format_double(r.normL) << ','
       << format_double(r.normC1) << ',' << format_double(r.lyapunov) << ','
       << format_double(r.min_ux) << ',' << format_double(r.sup_ratio) << '\n';
  }
  atomic_write(path, os.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_field(const std::string& s, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad numeric field '" + s + "'", line_no);
  }
}

}  // namespace

std::vector<SeriesRow> read_series_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) throw ParseError("empty series file", 1);
  ++line_no;
  if (split_csv_line(line) !=
      std::vector<std::string>{"t", "normL", "normC1", "lyapunov", "min_ux", "sup_ratio"})
    throw ParseError("unexpected series header '" + line + "'", line_no);
  std::vector<SeriesRow> rows;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 6) throw ParseError("expected 6 fields, got " + std::to_string(f.size()), line_no);
    SeriesRow r;
    r.t = parse_field(f[0], line_no);
    r.normL = parse_field(f[1], line_no);
    r.normC1 = parse_field(f[2], line_no);
    r.lyapunov = parse_field(f[3], line_no);
    r.min_ux = parse_field(f[4], line_no);
    r.sup_ratio = parse_field(f[5], line_no);
    rows.push_back(r);
  }
  return rows;
}

void save_snapshot_csv(const GridFn& u, const std::string& path) {
  std::ostringstream os;
  os << "x,u\n";
  for (std::size_t i = 0; i < u.grid->nodes.size(); ++i)
    os << format_double(u.grid->nodes[i]) << ',' << format_double(u.values[i]) << '\n';
  atomic_write(path, os.str());
}

GridFn read_snapshot_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) throw ParseError("empty snapshot file", 1);
  ++line_no;
  if (split_csv_line(line) != std::vector<std::string>{"x", "u"})
    throw ParseError("unexpected snapshot header '" + line + "'", line_no);
  std::vector<double> xs, vs;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 2) throw ParseError("expected 2 fields, got " + std::to_string(f.size()), line_no);
    xs.push_back(parse_field(f[0], line_no));
    vs.push_back(parse_field(f[1], line_no));
  }
  auto g = std::make_shared<Grid>();
  g->nodes = std::move(xs);
  GridFn u;
  u.grid = g;
  u.values = std::move(vs);
  return u;
}

void save_lambda1_csv(const std::vector<Lambda1Row>& rows, const std::string& path) {
  std::ostringstream os;
  os << "N,a,n,lambda1,gap,iters\n";
  for (const auto& r : rows) {
    os << r.N << ',' << format_double(r.a) << ',' << r.n << ','
       << format_double(r.lambda1) << ',' << format_double(r.gap) << ',' << r.iters << '\n';
  }
  atomic_write(path, os.str());
}

void save_phi1_csv(const GridFn& phi1, const std::string& path) {
  std::ostringstream os;
  os << "x,phi1\n";
  for (std::size_t i = 0; i < phi1.grid->nodes.size(); ++i)
    os << format_double(phi1.grid->nodes[i]) << ',' << format_double(phi1.values[i]) << '\n';
  atomic_write(path, os.str());
}

void save_ratefit_json(const std::vector<RateFitRecord>& records, const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& rec : records) {
    nlohmann::json j;
    j["which"] = (rec.fit.which == WhichNorm::L) ? "L" : "C1";
    j["slope"] = rec.fit.slope;
    j["stderr"] = rec.fit.slope_stderr;
    j["intercept"] = rec.fit.intercept;
    j["r2"] = rec.fit.r_squared;
    j["window"] = {rec.fit.window_lo, rec.fit.window_hi};
    j["samples"] = rec.fit.samples;
    j["comparator"] = rec.comparator;
    j["lambda1"] = rec.lambda1;
    j["dUa1"] = rec.dUa1;
    arr.push_back(j);
  }
  atomic_write(path, arr.dump(2) + "\n");
}

void save_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::json j;
  j["command"] = m.command;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : m.config) cfg[k] = v;
  j["config"] = cfg;
  j["files"] = m.files;
  j["status"] = m.status;
  j["wall_seconds"] = m.wall_seconds;
  atomic_write(path, j.dump(2) + "\n");
}

}  // namespace kslab
