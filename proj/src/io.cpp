#include "densfda/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "densfda/error.hpp"

namespace densfda::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t\"");
    const auto e = s.find_last_not_of(" \t\"");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Io, "line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

std::vector<std::string> default_ids(std::size_t n, std::vector<std::string> ids) {
  if (ids.empty()) {
    for (std::size_t i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i + 1));
  }
  if (ids.size() != n) throw Error(ErrorCode::InvalidArgument, "id count does not match column count");
  return ids;
}

nlohmann::json quartiles_json(const Quartiles& q) {
  return {{"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Table read_table(std::istream& in) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (!header) {
      if (cells.size() < 2) throw Error(ErrorCode::Io, "table needs a grid column and at least one subject");
      t.first_column = cells[0];
      t.ids.assign(cells.begin() + 1, cells.end());
      t.columns.resize(t.ids.size());
      header = true;
      continue;
    }
    if (cells.size() != t.ids.size() + 1) {
      throw Error(ErrorCode::Io, "line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(t.ids.size() + 1) + " fields");
    }
    t.x.push_back(parse_number(cells[0], lineno));
    for (std::size_t c = 0; c < t.ids.size(); ++c) t.columns[c].push_back(parse_number(cells[c + 1], lineno));
  }
  if (!header) throw Error(ErrorCode::Io, "empty table");
  return t;
}

Table read_table(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_table(in);
}

void write_table(std::ostream& out, const Table& t) {
  out << t.first_column;
  for (const auto& id : t.ids) out << ',' << id;
  out << '\n';
  for (std::size_t j = 0; j < t.x.size(); ++j) {
    out << format_double(t.x[j]);
    for (const auto& col : t.columns) out << ',' << format_double(col[j]);
    out << '\n';
  }
}

void write_table(const std::filesystem::path& path, const Table& t) {
  auto out = open_out(path);
  write_table(out, t);
}

Grid grid_from_points(const std::vector<double>& x) {
  if (x.size() < 3) throw Error(ErrorCode::Io, "grid needs at least 3 points");
  const Grid g(x.front(), x.back(), x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (std::abs(x[j] - g[j]) > 1e-9 * g.spacing()) throw Error(ErrorCode::GridMismatch, "grid is not uniform");
  }
  return g;
}

std::vector<DensityFn> densities_from_table(const Table& t) {
  const Grid g = grid_from_points(t.x);
  std::vector<DensityFn> out;
  for (const auto& col : t.columns) out.push_back(DensityFn::from_values(g, col));
  return out;
}

Table table_from_densities(const std::vector<DensityFn>& densities, std::vector<std::string> ids) {
  if (densities.empty()) throw Error(ErrorCode::EmptySample, "no densities to write");
  Table t;
  t.first_column = "x";
  t.ids = default_ids(densities.size(), std::move(ids));
  t.x = densities.front().grid().points();
  for (const auto& f : densities) {
    require_same_grid(f.grid(), densities.front().grid());
    t.columns.push_back(f.values());
  }
  return t;
}

std::vector<DensityFn> read_densities(const std::filesystem::path& path, std::vector<std::string>* ids) {
  Table t = read_table(path);
  if (ids) *ids = t.ids;
  return densities_from_table(t);
}

void write_densities(const std::filesystem::path& path, const std::vector<DensityFn>& densities,
                     std::vector<std::string> ids) {
  write_table(path, table_from_densities(densities, std::move(ids)));
}

std::vector<std::pair<std::string, std::vector<double>>> read_samples(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::pair<std::string, std::vector<double>>> out;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (cells.size() != 2) throw Error(ErrorCode::Io, "line " + std::to_string(lineno) + ": expected subject_id,value");
    if (!header) {
      header = true;
      if (cells[0] == "subject_id") continue;
    }
    auto [it, inserted] = index.emplace(cells[0], out.size());
    if (inserted) out.push_back({cells[0], {}});
    out[it->second].second.push_back(parse_number(cells[1], lineno));
  }
  if (out.empty()) throw Error(ErrorCode::EmptySample, "no samples in " + path.string());
  return out;
}

std::vector<std::pair<std::string, double>> read_responses(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::pair<std::string, double>> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (cells.size() != 2) throw Error(ErrorCode::Io, "line " + std::to_string(lineno) + ": expected subject_id,y");
    if (!header) {
      header = true;
      if (cells[0] == "subject_id") continue;
    }
    const std::string& v = cells[1];
    if (v.empty() || v == "NA" || v == "NaN" || v == "nan") continue;
    const double y = parse_number(v, lineno);
    if (std::isfinite(y)) out.emplace_back(cells[0], y);
  }
  return out;
}

void write_transformed(const std::filesystem::path& path, const std::vector<TransformedFn>& fns,
                       std::vector<std::string> ids) {
  if (fns.empty()) throw Error(ErrorCode::EmptySample, "nothing to write");
  const TransformedFn& first = fns.front();
  Table t;
  t.first_column = "t";
  t.ids = default_ids(fns.size(), std::move(ids));
  t.x = first.tgrid.points();
  for (const auto& f : fns) t.columns.push_back(f.values);
  auto out = open_out(path);
  out << "# transform=" << first.tag.name() << " delta=" << format_double(first.tag.delta)
      << " x_lo=" << format_double(first.xgrid.lo()) << " x_hi=" << format_double(first.xgrid.hi())
      << " x_m=" << first.xgrid.size() << '\n';
  write_table(out, t);
}

std::vector<TransformedFn> read_transformed(const std::filesystem::path& path, std::vector<std::string>* ids) {
  auto in = open_in(path);
  std::string meta;
  std::getline(in, meta);
  if (meta.rfind("# ", 0) != 0) throw Error(ErrorCode::Io, "missing transform metadata line");
  std::map<std::string, std::string> kv;
  std::istringstream ms(meta.substr(2));
  for (std::string tok; ms >> tok;) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  for (const char* key : {"transform", "delta", "x_lo", "x_hi", "x_m"}) {
    if (!kv.count(key)) throw Error(ErrorCode::Io, std::string("metadata lacks ") + key);
  }
  TransformSpec spec = kv["transform"] == "lqd" ? TransformSpec::lqd()
                       : kv["transform"] == "loghazard"
                           ? TransformSpec::log_hazard(parse_number(kv["delta"], 1))
                           : throw Error(ErrorCode::Io, "unknown transform " + kv["transform"]);
  const Grid xgrid(parse_number(kv["x_lo"], 1), parse_number(kv["x_hi"], 1),
                   static_cast<std::size_t>(parse_number(kv["x_m"], 1)));
  const Table t = read_table(in);
  if (ids) *ids = t.ids;
  const Grid tgrid = grid_from_points(t.x);
  std::vector<TransformedFn> out;
  for (const auto& col : t.columns) out.push_back(TransformedFn{tgrid, col, spec, xgrid});
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  auto out = open_out(path);
  out << contents;
}

std::uint64_t file_digest(const std::filesystem::path& path) { return fnv1a64(read_file(path)); }

nlohmann::json to_json(const DensityFn& f) {
  return {{"lo", f.grid().lo()}, {"hi", f.grid().hi()}, {"m", f.grid().size()}, {"values", f.values()}};
}

DensityFn density_from_json(const nlohmann::json& j) {
  try {
    const Grid g(j.at("lo").get<double>(), j.at("hi").get<double>(), j.at("m").get<std::size_t>());
    return DensityFn::from_values(g, j.at("values").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("bad density JSON: ") + e.what());
  }
}

nlohmann::json to_json(const EigenSystem& s, const std::vector<double>& fve_l2) {
  nlohmann::json scores = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.scores.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(s.scores.cols()));
    for (Eigen::Index k = 0; k < s.scores.cols(); ++k) row[static_cast<std::size_t>(k)] = s.scores(i, k);
    scores.push_back(row);
  }
  return {{"eigenvalues", s.eigenvalues},
          {"fve_l2", fve_l2},
          {"mean", {{"lo", s.grid.lo()}, {"hi", s.grid.hi()}, {"m", s.grid.size()}, {"values", s.mean}}},
          {"eigenfunctions", s.eigenfunctions},
          {"scores", scores}};
}

nlohmann::json to_json(const FrechetReport& r) {
  return {{"metric", std::string(to_string(r.metric))},
          {"method", r.method},
          {"v_infinity", r.v_infinity},
          {"v_k", r.v_k},
          {"fve", r.fve},
          {"p", r.p},
          {"selected_k", r.selected_k},
          {"threshold_reached", r.threshold_reached},
          {"source", r.source}};
}

nlohmann::json to_json(const SimulationResult& r) {
  nlohmann::json j;
  j["setting"] = static_cast<int>(r.spec.id);
  j["n"] = r.spec.n;
  j["observed"] = r.spec.observed.sampled ? "sampled" : "full";
  if (r.spec.observed.sampled) {
    j["n_obs"] = r.spec.observed.n_obs;
    j["bandwidth"] = r.spec.observed.bandwidth;
  }
  j["seed"] = r.spec.seed;
  j["grid_points"] = r.spec.grid_points;
  j["K"] = r.K;
  j["metric"] = std::string(to_string(r.metric));
  j["reps"] = r.reps;
  j["methods"] = r.methods;
  j["failed"] = r.failed();
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& rr : r.replications) {
    nlohmann::json e{{"rep", rr.rep}, {"ok", rr.ok}};
    if (!rr.ok) {
      e["error"] = rr.error;
    } else {
      e["fve"] = rr.fve;
      e["mean_dist_w"] = rr.mean_dist_w;
      e["mean_dist_l2"] = rr.mean_dist_l2;
    }
    reps.push_back(std::move(e));
  }
  j["replications"] = std::move(reps);
  nlohmann::json summary;
  for (const auto& [name, q] : r.fve_summary) summary[name] = quartiles_json(q);
  j["fve_summary"] = std::move(summary);
  j["aggregate_dist_w"] = r.aggregate_dist_w;
  nlohmann::json means;
  for (const auto& [kind, f] : r.aggregate_means) means[kind] = to_json(f);
  j["aggregate_means"] = std::move(means);
  if (r.target) j["target"] = to_json(*r.target);
  return j;
}

nlohmann::json to_json(const std::vector<RegressionRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    out.push_back({{"K", row.K}, {"r2", row.r2}, {"cv_mse", row.cv_mse}, {"dropped", row.dropped}});
  }
  return out;
}

}  // namespace densfda::io
