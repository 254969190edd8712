#include "densfda/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "densfda/error.hpp"
#include "densfda/frechet.hpp"
#include "densfda/hilbert_sphere.hpp"
#include "densfda/io.hpp"
#include "densfda/kde.hpp"
#include "densfda/parallel.hpp"
#include "densfda/regression.hpp"
#include "densfda/simulation.hpp"
#include "densfda/transforms.hpp"

#ifndef DENSFDA_VERSION
#define DENSFDA_VERSION "0.0.0"
#endif

namespace densfda {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::size_t threads = 0;
  std::uint64_t seed = 7;
  std::size_t grid_points = 512;
  double floor = kDefaultFloor;
};

// Records inputs and outputs of one invocation, written next to each output.
class Manifest {
 public:
  Manifest(int argc, char** argv, const Globals& g) : globals_(g) {
    for (int i = 0; i < argc; ++i) command_.emplace_back(argv[i]);
  }

  void input(const fs::path& p) { inputs_[p.string()] = hex(io::file_digest(p)); }
  void output(const fs::path& p) { outputs_.push_back(p.string()); }

  void write() const {
    json j;
    j["command"] = command_;
    j["seed"] = globals_.seed;
    j["threads"] = resolve_threads(globals_.threads);
    j["grid_points"] = globals_.grid_points;
    j["floor"] = globals_.floor;
    j["inputs"] = json::object();
    for (const auto& [path, digest] : inputs_) j["inputs"][path] = {{"fnv1a64", digest}};
    j["outputs"] = json::object();
    for (const auto& path : outputs_) j["outputs"][path] = {{"fnv1a64", hex(io::file_digest(path))}};
    j["version"] = DENSFDA_VERSION;
    j["timestamp"] = timestamp();
    for (const auto& path : outputs_) io::write_file(path + ".manifest.json", j.dump(2) + "\n");
  }

 private:
  static std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
  }

  static std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  Globals globals_;
  std::vector<std::string> command_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
};

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension(suffix);
  return p;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw CLI::ValidationError("list", "not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("list", "empty list");
  return out;
}

// "1..4" or "1,2,4".
std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::vector<std::size_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto a = parse_list(text.substr(0, dots));
    const auto b = parse_list(text.substr(dots + 2));
    if (a.size() != 1 || b.size() != 1 || a[0] < 1 || b[0] < a[0]) {
      throw CLI::ValidationError("--K", "bad range '" + text + "'");
    }
    for (auto k = static_cast<std::size_t>(a[0]); k <= static_cast<std::size_t>(b[0]); ++k) out.push_back(k);
    return out;
  }
  for (double v : parse_list(text)) {
    if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw CLI::ValidationError("--K", "K must be a positive integer");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

io::Table modes_table(const RepresentationModel& model, std::size_t count, const std::vector<double>& alphas) {
  io::Table t;
  const std::size_t K = std::min(count, model.components());
  for (std::size_t k = 1; k <= K; ++k) {
    for (double a : alphas) {
      const DensityFn f = model.mode(k, a);
      if (t.x.empty()) t.x = f.grid().points();
      t.ids.push_back("k" + std::to_string(k) + "_a" + io::format_double(a));
      t.columns.push_back(f.values());
    }
  }
  if (t.columns.empty()) throw Error(ErrorCode::KTooLarge, "sample has no modes of variation");
  return t;
}

std::string fve_csv(const FrechetReport& r) {
  std::string s = "K,v_k,fve\n";
  for (std::size_t k = 0; k < r.fve.size(); ++k) {
    s += std::to_string(k + 1) + "," + io::format_double(r.v_k[k]) + "," + io::format_double(r.fve[k]) + "\n";
  }
  return s;
}

MethodKind method_of(const std::string& name, double delta) { return MethodKind::parse(name, delta); }

const std::vector<std::string> kMethods{"lqd", "loghazard", "fpca", "hs"};

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Functional data analysis of samples of densities", "densfda"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", DENSFDA_VERSION);

  Globals g;
  app.add_option("--threads", g.threads, "worker threads (0: DENSFDA_THREADS or 1)");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--grid-points", g.grid_points, "density grid size")->check(CLI::Range(3, 1 << 20));
  app.add_option("--floor", g.floor, "positivity floor for densities")->check(CLI::Range(0.0, 1.0));

  // estimate
  auto* est = app.add_subcommand("estimate", "kernel density estimates from raw samples");
  fs::path est_in, est_out;
  double bandwidth = 0.0, bandwidth_native = 0.0;
  std::string kernel = "gaussian", support;
  est->add_option("--in", est_in, "subject_id,value CSV")->required()->check(CLI::ExistingFile);
  est->add_option("--out", est_out, "density CSV")->required();
  auto* bw_opt = est->add_option("--bandwidth", bandwidth, "bandwidth on the support mapped to [0,1]")
                     ->check(CLI::Range(0.0, 0.5));
  est->add_option("--bandwidth-native", bandwidth_native, "bandwidth in data units")
      ->check(CLI::PositiveNumber)
      ->excludes(bw_opt);
  est->add_option("--kernel", kernel)->check(CLI::IsMember({"gaussian", "epanechnikov", "uniform"}));
  est->add_option("--support", support, "a,b (default: range of all samples)");

  // transform
  auto* tr = app.add_subcommand("transform", "log quantile density or log hazard transform");
  fs::path tr_in, tr_out;
  std::string tr_kind = "lqd";
  double tr_delta = 0.1;
  bool tr_inverse = false;
  tr->add_option("--kind", tr_kind)->check(CLI::IsMember({"lqd", "loghazard"}));
  tr->add_option("--delta", tr_delta, "log hazard cutoff")->check(CLI::Range(0.0, 1.0));
  tr->add_option("--in", tr_in)->required()->check(CLI::ExistingFile);
  tr->add_option("--out", tr_out)->required();
  tr->add_flag("--inverse", tr_inverse, "map transformed functions back to densities");

  // analyze
  auto* an = app.add_subcommand("analyze", "decomposition, FVE and modes of variation");
  fs::path an_in, an_out;
  std::string an_method = "lqd", an_metric = "l2", an_alpha = "-2,-1,0,1,2";
  double an_delta = 0.1, an_p = 0.9;
  std::size_t an_kmax = 0, an_modes = 2;
  an->add_option("--method", an_method)->check(CLI::IsMember(kMethods));
  an->add_option("--delta", an_delta)->check(CLI::Range(0.0, 1.0));
  an->add_option("--metric", an_metric)->check(CLI::IsMember({"l2", "wasserstein"}));
  an->add_option("--p", an_p, "FVE threshold")->check(CLI::Range(0.0, 1.0));
  an->add_option("--k-max", an_kmax, "largest K in the FVE curve (0: automatic)");
  an->add_option("--modes", an_modes, "number of modes to emit");
  an->add_option("--modes-alpha", an_alpha);
  an->add_option("--in", an_in)->required()->check(CLI::ExistingFile);
  an->add_option("--out", an_out, "report JSON")->required();

  // modes
  auto* mo = app.add_subcommand("modes", "modes of variation as density CSV");
  fs::path mo_in, mo_out;
  std::string mo_method = "lqd", mo_alpha = "-2,-1,0,1,2";
  double mo_delta = 0.1;
  std::size_t mo_k = 2;
  mo->add_option("--method", mo_method)->check(CLI::IsMember(kMethods));
  mo->add_option("--delta", mo_delta)->check(CLI::Range(0.0, 1.0));
  mo->add_option("--k", mo_k, "number of modes")->check(CLI::PositiveNumber);
  mo->add_option("--alpha", mo_alpha);
  mo->add_option("--in", mo_in)->required()->check(CLI::ExistingFile);
  mo->add_option("--out", mo_out)->required();

  // mean
  auto* me = app.add_subcommand("mean", "cross-sectional, Wasserstein or Fisher-Rao mean");
  fs::path me_in, me_out;
  std::string me_kind = "wasserstein";
  me->add_option("--kind", me_kind)->check(CLI::IsMember({"l2", "wasserstein", "fisher_rao"}));
  me->add_option("--in", me_in)->required()->check(CLI::ExistingFile);
  me->add_option("--out", me_out)->required();

  // fve
  auto* fv = app.add_subcommand("fve", "fraction of Frechet variance explained by K");
  fs::path fv_in, fv_out;
  std::string fv_method = "lqd", fv_metric = "l2";
  double fv_delta = 0.1, fv_p = 0.9;
  std::size_t fv_kmax = 0;
  fv->add_option("--method", fv_method)->check(CLI::IsMember(kMethods));
  fv->add_option("--delta", fv_delta)->check(CLI::Range(0.0, 1.0));
  fv->add_option("--metric", fv_metric)->check(CLI::IsMember({"l2", "wasserstein"}));
  fv->add_option("--p", fv_p)->check(CLI::Range(0.0, 1.0));
  fv->add_option("--k-max", fv_kmax);
  fv->add_option("--in", fv_in)->required()->check(CLI::ExistingFile);
  fv->add_option("--out", fv_out, "CSV of K, V_K, FVE")->required();

  // simulate
  auto* si = app.add_subcommand("simulate", "truncated normal simulation settings");
  fs::path si_out;
  int si_setting = 2;
  std::size_t si_n = 50, si_reps = 50, si_K = 1, si_nobs = 100;
  std::string si_observed = "full", si_metric = "l2", si_methods = "lqd,fpca,hs";
  double si_bw = 0.2, si_delta = 0.1;
  si->add_option("--setting", si_setting)->check(CLI::Range(1, 3));
  si->add_option("--n", si_n)->check(CLI::Range(2, 1000000));
  si->add_option("--reps", si_reps)->check(CLI::PositiveNumber);
  si->add_option("--observed", si_observed)->check(CLI::IsMember({"full", "sampled"}));
  si->add_option("--n-obs", si_nobs, "draws per subject when sampled");
  si->add_option("--bandwidth", si_bw, "kernel bandwidth in data units when sampled")->check(CLI::PositiveNumber);
  si->add_option("--K", si_K)->check(CLI::PositiveNumber);
  si->add_option("--metric", si_metric)->check(CLI::IsMember({"l2", "wasserstein"}));
  si->add_option("--methods", si_methods, "comma list of lqd, loghazard, fpca, hs");
  si->add_option("--delta", si_delta)->check(CLI::Range(0.0, 1.0));
  si->add_option("--out", si_out, "result JSON")->required();

  // regress
  auto* re = app.add_subcommand("regress", "scalar-on-density regression with repeated CV");
  fs::path re_dens, re_y, re_out;
  std::string re_method = "lqd", re_K = "1..4";
  std::size_t re_folds = 10, re_repeats = 50;
  re->add_option("--method", re_method)->check(CLI::IsMember({"lqd", "fpca"}));
  re->add_option("--K", re_K, "1..4 or a comma list");
  re->add_option("--folds", re_folds)->check(CLI::Range(2, 1000000));
  re->add_option("--repeats", re_repeats)->check(CLI::PositiveNumber);
  re->add_option("--densities", re_dens)->required()->check(CLI::ExistingFile);
  re->add_option("--y", re_y, "subject_id,y CSV")->required()->check(CLI::ExistingFile);
  re->add_option("--out", re_out)->required();

  std::vector<double> alphas;
  std::vector<std::size_t> ks;
  std::vector<MethodKind> sim_methods;
  std::pair<double, double> support_ab{0.0, 0.0};
  bool has_support = false;
  try {
    app.parse(argc, argv);
    if (an->parsed()) alphas = parse_list(an_alpha);
    if (mo->parsed()) alphas = parse_list(mo_alpha);
    if (re->parsed()) ks = parse_k_list(re_K);
    if (est->parsed() && !support.empty()) {
      const auto ab = parse_list(support);
      if (ab.size() != 2 || !(ab[0] < ab[1])) throw CLI::ValidationError("--support", "expected a,b with a < b");
      support_ab = {ab[0], ab[1]};
      has_support = true;
    }
    if (si->parsed()) {
      std::stringstream ss(si_methods);
      std::string name;
      while (std::getline(ss, name, ',')) {
        if (std::find(kMethods.begin(), kMethods.end(), name) == kMethods.end()) {
          throw CLI::ValidationError("--methods", "unknown method '" + name + "'");
        }
        sim_methods.push_back(method_of(name, si_delta));
      }
      if (sim_methods.empty()) throw CLI::ValidationError("--methods", "no methods given");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* active = &app;
    for (auto* sub : app.get_subcommands()) active = sub;
    err << active->help();
    return 2;
  }

  Manifest manifest(argc, argv, g);
  const std::size_t threads = resolve_threads(g.threads);
  try {
    if (est->parsed()) {
      manifest.input(est_in);
      const auto subjects = io::read_samples(est_in);
      if (subjects.empty()) throw Error(ErrorCode::EmptySample, "no samples in input");
      if (!has_support) {
        double lo = subjects[0].second.at(0), hi = lo;
        for (const auto& [id, v] : subjects) {
          for (double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
          }
        }
        if (!(lo < hi)) throw Error(ErrorCode::SupportMismatch, "samples span a single point; pass --support");
        support_ab = {lo, hi};
      }
      const Grid grid(support_ab.first, support_ab.second, g.grid_points);
      std::vector<DensityFn> dens(subjects.size(), normalize(GridFn(grid, std::vector<double>(grid.size(), 1.0))));
      std::vector<std::string> ids;
      for (const auto& s : subjects) ids.push_back(s.first);
      parallel_for(subjects.size(), threads, [&](std::size_t i) {
        const auto& v = subjects[i].second;
        double h = bandwidth > 0.0 ? bandwidth : default_bandwidth(v.size());
        if (bandwidth_native > 0.0) h = bandwidth_native / grid.width();
        dens[i] = estimate_density(v, KdeConfig{h, KernelSpec::parse(kernel), grid, g.floor});
      });
      io::write_densities(est_out, dens, ids);
      manifest.output(est_out);
    } else if (tr->parsed()) {
      manifest.input(tr_in);
      std::vector<std::string> ids;
      if (tr_inverse) {
        const auto fns = io::read_transformed(tr_in, &ids);
        std::vector<DensityFn> dens;
        for (const auto& x : fns) dens.push_back(inverse(x, g.floor));
        io::write_densities(tr_out, dens, ids);
      } else {
        const TransformSpec spec = tr_kind == "lqd" ? TransformSpec::lqd() : TransformSpec::log_hazard(tr_delta);
        spec.validate();
        const auto dens = io::read_densities(tr_in, &ids);
        std::vector<TransformedFn> fns;
        for (const auto& f : dens) fns.push_back(forward(f, spec));
        io::write_transformed(tr_out, fns, ids);
      }
      manifest.output(tr_out);
    } else if (an->parsed()) {
      manifest.input(an_in);
      const auto dens = io::read_densities(an_in);
      const RepresentationModel model(dens, method_of(an_method, an_delta), g.floor);
      const std::size_t k_max = an_kmax > 0 ? an_kmax : std::max<std::size_t>(1, default_k_max(model));
      const FrechetReport report = fve_curve(model, dens, parse_metric(an_metric), k_max, an_p);

      const fs::path modes_path = sibling(an_out, ".modes.csv");
      const fs::path fve_path = sibling(an_out, ".fve.csv");
      json j;
      j["frechet"] = io::to_json(report);
      j["selected_k"] = report.selected_k;
      j["n"] = dens.size();
      j["components"] = model.components();
      j["working_eigenvalues"] = model.components() > 0 ? model.system().eigenvalues : std::vector<double>{};
      j["modes_alpha"] = alphas;
      j["modes_csv"] = modes_path.filename().string();
      j["fve_csv"] = fve_path.filename().string();
      if (model.components() > 0) {
        io::write_table(modes_path, modes_table(model, an_modes, alphas));
        manifest.output(modes_path);
      } else {
        j["modes_csv"] = nullptr;
      }
      io::write_file(fve_path, fve_csv(report));
      io::write_file(an_out, j.dump(2) + "\n");
      manifest.output(fve_path);
      manifest.output(an_out);
      out << "selected_k=" << report.selected_k << "\n";
    } else if (mo->parsed()) {
      manifest.input(mo_in);
      const auto dens = io::read_densities(mo_in);
      const RepresentationModel model(dens, method_of(mo_method, mo_delta), g.floor);
      if (mo_k > model.components()) {
        throw Error(ErrorCode::KTooLarge, "only " + std::to_string(model.components()) + " modes available");
      }
      io::write_table(mo_out, modes_table(model, mo_k, alphas));
      manifest.output(mo_out);
    } else if (me->parsed()) {
      manifest.input(me_in);
      const auto dens = io::read_densities(me_in);
      if (dens.empty()) throw Error(ErrorCode::EmptySample, "no densities in input");
      DensityFn mean = cross_sectional_mean(dens);
      if (me_kind == "wasserstein") {
        mean = wasserstein_frechet_mean(dens, g.floor);
      } else if (me_kind == "fisher_rao") {
        std::vector<SpherePoint> pts;
        for (const auto& f : dens) pts.push_back(sqrt_embed(f));
        mean = square_back(karcher_mean(pts), g.floor);
      }
      io::write_densities(me_out, {mean}, {me_kind});
      manifest.output(me_out);
    } else if (fv->parsed()) {
      manifest.input(fv_in);
      const auto dens = io::read_densities(fv_in);
      const RepresentationModel model(dens, method_of(fv_method, fv_delta), g.floor);
      const std::size_t k_max = fv_kmax > 0 ? fv_kmax : std::max<std::size_t>(1, default_k_max(model));
      const FrechetReport report = fve_curve(model, dens, parse_metric(fv_metric), k_max, fv_p);
      io::write_file(fv_out, fve_csv(report));
      manifest.output(fv_out);
      out << "selected_k=" << report.selected_k << (report.threshold_reached ? "" : " (threshold not reached)")
          << "\n";
    } else if (si->parsed()) {
      SettingSpec spec;
      spec.id = static_cast<SettingId>(si_setting);
      spec.n = si_n;
      spec.observed.sampled = si_observed == "sampled";
      spec.observed.n_obs = si_nobs;
      spec.observed.bandwidth = si_bw;
      spec.seed = g.seed;
      spec.grid_points = g.grid_points;
      spec.floor = g.floor;
      const SimulationResult result =
          run_comparison(spec, sim_methods, si_K, parse_metric(si_metric), si_reps, threads);
      io::write_file(si_out, io::to_json(result).dump(2) + "\n");
      std::string csv = "rep,method,fve\n";
      for (const auto& rr : result.replications) {
        if (!rr.ok) continue;
        for (const auto& name : result.methods) {
          csv += std::to_string(rr.rep) + "," + name + "," + io::format_double(rr.fve.at(name).back()) + "\n";
        }
      }
      const fs::path box = sibling(si_out, ".fve.csv");
      io::write_file(box, csv);
      manifest.output(si_out);
      manifest.output(box);
      for (const auto& name : result.methods) {
        const auto& q = result.fve_summary.at(name);
        out << name << " median_fve=" << io::format_double(q.median) << "\n";
      }
      if (result.failed() > 0) out << "failed_replications=" << result.failed() << "\n";
    } else if (re->parsed()) {
      manifest.input(re_dens);
      manifest.input(re_y);
      std::vector<std::string> ids;
      const auto dens = io::read_densities(re_dens, &ids);
      const auto responses = io::read_responses(re_y);
      std::map<std::string, double> by_id(responses.begin(), responses.end());
      std::vector<DensityFn> used;
      std::vector<double> y;
      std::vector<std::string> skipped;
      for (std::size_t i = 0; i < dens.size(); ++i) {
        const auto it = by_id.find(ids[i]);
        if (it == by_id.end()) {
          skipped.push_back(ids[i]);
          continue;
        }
        used.push_back(dens[i]);
        y.push_back(it->second);
      }
      const CvOptions opts{re_folds, re_repeats, g.seed, threads};
      const auto rows = regression_table(used, y, parse_score_method(re_method), ks, opts);
      json j;
      j["method"] = re_method;
      j["n"] = used.size();
      j["skipped"] = skipped;
      j["folds"] = re_folds;
      j["repeats"] = re_repeats;
      j["seed"] = g.seed;
      j["rows"] = io::to_json(rows);
      io::write_file(re_out, j.dump(2) + "\n");
      std::string csv = "K,r2,cv_mse,dropped\n";
      for (const auto& r : rows) {
        csv += std::to_string(r.K) + "," + io::format_double(r.r2) + "," + io::format_double(r.cv_mse) + "," +
               std::to_string(r.dropped) + "\n";
      }
      const fs::path table = sibling(re_out, ".csv");
      io::write_file(table, csv);
      manifest.output(re_out);
      manifest.output(table);
    }
    manifest.write();
  } catch (const Error& e) {
    err << json{{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << json{{"error", {{"code", "Internal"}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace densfda
