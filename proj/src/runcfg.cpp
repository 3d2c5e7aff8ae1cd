#include "modmpc/runcfg.hpp"

#include "modmpc/io.hpp"

#include <filesystem>
#include <fstream>

namespace modmpc::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at " + path + ": " + what);
}

const json& need(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    fail(path + "/" + key, "missing");
  }
  return j.at(key);
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    fail(path, "expected a number");
  }
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    fail(path, "expected an integer");
  }
  return j.get<int>();
}

Vector as_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) {
    fail(path, "expected a non-empty array of numbers");
  }
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = as_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    fail(path, "expected an array of arrays");
  }
  const size_t cols = j[0].size();
  Matrix m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      fail(path, "ragged matrix rows");
    }
    for (size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_number(j[r][c], path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

plants::PlantModel parse_plant(const json& j, const std::string& path) {
  if (j.contains("name")) {
    const std::string name = j.at("name").get<std::string>();
    try {
      return plants::builtin(name);
    } catch (const std::invalid_argument& e) {
      fail(path + "/name", e.what());
    }
  }
  if (!j.contains("custom")) {
    fail(path, "expected {\"name\": ...} or {\"custom\": ...}");
  }
  const json& c = j.at("custom");
  const std::string cpath = path + "/custom";
  plants::PlantModel p;
  p.n_x = as_int(need(c, "n_x", cpath), cpath + "/n_x");
  p.n_u = as_int(need(c, "n_u", cpath), cpath + "/n_u");
  p.name = c.value("name", std::string("custom"));

  const std::string rhs = need(c, "rhs", cpath).get<std::string>();
  if (rhs == "linear") {
    const Matrix a = as_matrix(need(c, "A", cpath), cpath + "/A");
    const Matrix b = as_matrix(need(c, "B", cpath), cpath + "/B");
    if (a.rows() != p.n_x || a.cols() != p.n_x || b.rows() != p.n_x || b.cols() != p.n_u) {
      fail(cpath, "A/B dimensions do not match n_x/n_u");
    }
    p.A = a;
    p.B = b;
    p.f = [a, b](const Vector& x, const Vector& u) -> Vector { return a * x + b * u; };
  } else {
    plants::PlantModel base;
    try {
      base = plants::builtin(rhs);
    } catch (const std::invalid_argument&) {
      fail(cpath + "/rhs", "unknown rhs '" + rhs + "'");
    }
    if (base.n_x != p.n_x || base.n_u != p.n_u) {
      fail(cpath, "n_x/n_u do not match rhs '" + rhs + "'");
    }
    p.f = base.f;
    p.A = c.contains("A") ? as_matrix(c.at("A"), cpath + "/A") : base.A;
    p.B = c.contains("B") ? as_matrix(c.at("B"), cpath + "/B") : base.B;
    p.x_lb = base.x_lb;
    p.x_ub = base.x_ub;
    p.u_lb = base.u_lb;
    p.u_ub = base.u_ub;
  }

  const auto bound = [&](const char* key, Vector& target, int dim) {
    if (c.contains(key)) {
      target = as_vector(c.at(key), cpath + "/" + key);
    }
    if (target.size() != dim) {
      fail(cpath + "/" + key, "expected " + std::to_string(dim) + " entries");
    }
  };
  bound("x_lb", p.x_lb, p.n_x);
  bound("x_ub", p.x_ub, p.n_x);
  bound("u_lb", p.u_lb, p.n_u);
  bound("u_ub", p.u_ub, p.n_u);

  if (p.f(Vector::Zero(p.n_x), Vector::Zero(p.n_u)).lpNorm<Eigen::Infinity>() > 1e-9) {
    fail(cpath, "plant field must vanish at the origin");
  }
  return p;
}

resource::ResourceModel parse_resource(const json& j, const std::string& path) {
  json source = j;
  if (j.contains("model_file")) {
    const std::string file = j.at("model_file").get<std::string>();
    std::ifstream in(file);
    if (!in) {
      fail(path + "/model_file", "cannot open '" + file + "'");
    }
    try {
      source = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(path + "/model_file", std::string("parse error: ") + e.what());
    }
  }
  if (!source.contains("coefficients")) {
    fail(path + "/coefficients", "missing");
  }
  resource::ResourceModel m;
  for (const auto& c : source.at("coefficients")) {
    m.a.push_back(as_number(c, path + "/coefficients"));
  }
  try {
    resource::validate(m);
  } catch (const std::invalid_argument& e) {
    fail(path + "/coefficients", e.what());
  }
  return m;
}

}  // namespace

namespace {
RunConfig parse_config_impl(const json& j);
}

RunConfig parse_config(const json& j) {
  try {
    return parse_config_impl(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }
}

namespace {

RunConfig parse_config_impl(const json& j) {
  if (!j.is_object()) {
    fail("/", "top level must be an object");
  }
  RunConfig cfg;
  cfg.raw = j;

  cfg.plant = parse_plant(need(j, "plant", ""), "/plant");

  const json& ocp = need(j, "ocp", "");
  cfg.Q = as_matrix(need(ocp, "Q", "/ocp"), "/ocp/Q");
  cfg.R = as_matrix(need(ocp, "R", "/ocp"), "/ocp/R");
  if (cfg.Q.rows() != cfg.plant.n_x || cfg.Q.cols() != cfg.plant.n_x) {
    fail("/ocp/Q", "dimensions must match the plant state");
  }
  if (cfg.R.rows() != cfg.plant.n_u || cfg.R.cols() != cfg.plant.n_u) {
    fail("/ocp/R", "dimensions must match the plant input");
  }
  if (ocp.contains("qf") && ocp.at("qf").is_array()) {
    cfg.Qf = as_matrix(ocp.at("qf"), "/ocp/qf");
    cfg.qf_auto = false;
  } else if (ocp.contains("qf") && ocp.at("qf") != "dare") {
    fail("/ocp/qf", "expected \"dare\" or a matrix");
  }
  const std::string mode = ocp.value("cost_mode", std::string("euler"));
  if (mode == "euler") {
    cfg.cost_mode = mpc::CostMode::Euler;
  } else if (mode == "exact") {
    cfg.cost_mode = mpc::CostMode::Exact;
  } else {
    fail("/ocp/cost_mode", "expected \"euler\" or \"exact\"");
  }
  cfg.x_lb = ocp.contains("x_lb") ? as_vector(ocp.at("x_lb"), "/ocp/x_lb") : cfg.plant.x_lb;
  cfg.x_ub = ocp.contains("x_ub") ? as_vector(ocp.at("x_ub"), "/ocp/x_ub") : cfg.plant.x_ub;
  cfg.u_lb = ocp.contains("u_lb") ? as_vector(ocp.at("u_lb"), "/ocp/u_lb") : cfg.plant.u_lb;
  cfg.u_ub = ocp.contains("u_ub") ? as_vector(ocp.at("u_ub"), "/ocp/u_ub") : cfg.plant.u_ub;

  const json& sc = need(j, "scenarios", "");
  const json& x0s = need(sc, "x0", "/scenarios");
  if (!x0s.is_array() || x0s.empty()) {
    fail("/scenarios/x0", "expected a non-empty array of state vectors");
  }
  std::vector<Vector> initial;
  for (size_t i = 0; i < x0s.size(); ++i) {
    Vector v = as_vector(x0s[i], "/scenarios/x0[" + std::to_string(i) + "]");
    if (v.size() != cfg.plant.n_x) {
      fail("/scenarios/x0[" + std::to_string(i) + "]", "wrong state dimension");
    }
    initial.push_back(v);
  }
  std::vector<double> weights;
  if (sc.contains("weights")) {
    for (const auto& w : sc.at("weights")) {
      weights.push_back(as_number(w, "/scenarios/weights"));
    }
  } else {
    weights.assign(initial.size(), 1.0);
  }
  try {
    cfg.scenarios = plants::ScenarioSet::make(std::move(initial), std::move(weights));
  } catch (const std::invalid_argument& e) {
    fail("/scenarios", e.what());
  }

  if (j.contains("sim")) {
    const json& s = j.at("sim");
    cfg.sim.t_max = s.value("t_max", cfg.sim.t_max);
    cfg.sim.substeps = s.value("substeps", cfg.sim.substeps);
    cfg.sim.tail_eps = s.value("tail_eps", cfg.sim.tail_eps);
    cfg.sim.tail_steps = s.value("tail_steps", cfg.sim.tail_steps);
    cfg.sim.blowup = s.value("blowup", cfg.sim.blowup);
    cfg.sim.penalty = s.value("penalty", cfg.sim.penalty);
    if (cfg.sim.substeps < 1) {
      fail("/sim/substeps", "must be >= 1");
    }
  }

  if (j.contains("resource")) {
    cfg.model = parse_resource(j.at("resource"), "/resource");
  }

  if (j.contains("search")) {
    const json& s = j.at("search");
    const json& hr = need(s, "h", "/search");
    const json& nr = need(s, "N", "/search");
    if (!hr.is_array() || hr.size() != 2 || !nr.is_array() || nr.size() != 2) {
      fail("/search", "h and N must be [lo, hi] pairs");
    }
    cfg.search.lower.h = as_number(hr[0], "/search/h[0]");
    cfg.search.upper.h = as_number(hr[1], "/search/h[1]");
    cfg.search.lower.N = as_int(nr[0], "/search/N[0]");
    cfg.search.upper.N = as_int(nr[1], "/search/N[1]");
    try {
      moo::validate(cfg.search);
    } catch (const std::invalid_argument& e) {
      fail("/search", e.what());
    }
  }

  cfg.seed = j.value("seed", 0ULL);

  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    cfg.optimizer.kind = o.value("kind", std::string("ditri"));
    if (cfg.optimizer.kind != "ditri" && cfg.optimizer.kind != "nsga") {
      fail("/optimizer/kind", "expected \"ditri\" or \"nsga\"");
    }
    auto& d = cfg.optimizer.ditri;
    d.max_evals = o.value("max_evals", d.max_evals);
    d.max_iters = o.value("max_iters", d.max_iters);
    d.epsilon = o.value("epsilon", d.epsilon);
    d.dbar_c = o.value("dbar_c", d.dbar_c);
    d.dbar_base = o.value("dbar_base", d.dbar_base);
    d.dbar_div = o.value("dbar_div", d.dbar_div);
    d.strict_rank_tie = o.value("strict_rank_tie", d.strict_rank_tie);
    auto& n = cfg.optimizer.nsga;
    n.population = o.value("population", n.population);
    n.generations = o.value("generations", n.generations);
    n.crossover_prob = o.value("crossover_prob", n.crossover_prob);
    n.mutation_prob = o.value("mutation_prob", n.mutation_prob);
    n.sbx_eta = o.value("sbx_eta", n.sbx_eta);
    n.mut_eta = o.value("mut_eta", n.mut_eta);
    n.max_evals = o.value("max_evals", 0L);
  }
  cfg.optimizer.ditri.seed = cfg.seed;
  cfg.optimizer.nsga.seed = cfg.seed;

  if (j.contains("sweep")) {
    cfg.sweep_n_h = j.at("sweep").value("n_h", cfg.sweep_n_h);
    if (cfg.sweep_n_h < 1) {
      fail("/sweep/n_h", "must be >= 1");
    }
  }

  if (j.contains("calibration")) {
    const json& c = j.at("calibration");
    if (c.contains("N")) {
      const json& nr = c.at("N");
      if (!nr.is_array() || nr.size() != 2) {
        fail("/calibration/N", "expected [lo, hi]");
      }
      cfg.calibration.n_lo = as_int(nr[0], "/calibration/N[0]");
      cfg.calibration.n_hi = as_int(nr[1], "/calibration/N[1]");
    }
    cfg.calibration.reps = c.value("reps", cfg.calibration.reps);
    cfg.calibration.degree = c.value("degree", cfg.calibration.degree);
    cfg.calibration.h = c.value("h", cfg.calibration.h);
    if (cfg.calibration.n_lo < 1 || cfg.calibration.n_hi < cfg.calibration.n_lo) {
      fail("/calibration/N", "need 1 <= lo <= hi");
    }
  }

  return cfg;
}

}  // namespace

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config error at " + path + ": cannot open file");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config error at " + path + ": " + e.what());
  }
  return parse_config(j);
}

mpc::OcpSpec make_ocp(const RunConfig& cfg, const moo::DesignPoint& p) {
  mpc::OcpSpec spec;
  spec.A = cfg.plant.A;
  spec.B = cfg.plant.B;
  spec.Q = cfg.Q;
  spec.R = cfg.R;
  spec.Qf = cfg.Qf;
  spec.qf_auto = cfg.qf_auto;
  spec.x_lb = cfg.x_lb;
  spec.x_ub = cfg.x_ub;
  spec.u_lb = cfg.u_lb;
  spec.u_ub = cfg.u_ub;
  spec.h = p.h;
  spec.N = p.N;
  spec.cost_mode = cfg.cost_mode;
  return spec;
}

moo::Evaluator make_evaluator(const RunConfig& cfg) {
  if (!cfg.model) {
    throw ConfigError("config error at /resource: required for this command");
  }
  const resource::ResourceModel model = *cfg.model;
  const RunConfig snapshot = cfg;

  return [model, snapshot](const moo::DesignPoint& p) -> moo::ObjectiveVector {
    mpc::OcpSpec spec = make_ocp(snapshot, p);
    double v = 0.0;
    bool controller_ok = true;
    try {
      spec = mpc::with_resolved_terminal_weight(spec);
    } catch (const std::runtime_error&) {
      // No Riccati solution at this design point (critical sampling):
      // score it like any other failed run.
      controller_ok = false;
    }
    if (controller_ok) {
      v = cloop::performance(snapshot.plant, spec, snapshot.scenarios, snapshot.sim);
    } else {
      for (size_t i = 0; i < snapshot.scenarios.x0.size(); ++i) {
        v += snapshot.scenarios.w[i] *
             cloop::effective_penalty(snapshot.sim, snapshot.scenarios.x0[i]);
      }
    }
    moo::ObjectiveVector l;
    l.V = v;
    l.eta = resource::eta(model, p);
    return l;
  };
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory: " + dir);
  }
}

json bounds_json(const moo::Bounds& b) {
  return json{{"h", {b.lower.h, b.upper.h}}, {"N", {b.lower.N, b.upper.N}}};
}

json eval_log_json(const moo::Archive& archive) {
  json log = json::array();
  for (const auto& r : archive.records()) {
    log.push_back(json{{"eval_index", r.eval_index},
                       {"c", {r.c[0], r.c[1]}},
                       {"h", r.p.h},
                       {"N", r.p.N},
                       {"V", r.l.V},
                       {"eta", r.l.eta}});
  }
  return log;
}

moo::Archive run_optimizer(const RunConfig& cfg) {
  const moo::Evaluator evaluator = make_evaluator(cfg);
  if (cfg.optimizer.kind == "nsga") {
    return nsga::run(evaluator, cfg.search, cfg.optimizer.nsga);
  }
  return ditri::run(evaluator, cfg.search, cfg.optimizer.ditri).archive;
}

void write_run_outputs(const RunConfig& cfg, const moo::Archive& archive,
                       const std::string& out_dir) {
  ensure_dir(out_dir);
  io::write_file(out_dir + "/archive.csv", io::archive_csv(archive));
  io::write_file(out_dir + "/front.csv", io::front_csv(archive));

  json manifest;
  manifest["schema"] = "modmpc-manifest-v1";
  manifest["command"] = "optimize";
  manifest["seed"] = cfg.seed;
  manifest["optimizer"] = cfg.optimizer.kind;
  manifest["bounds"] = bounds_json(cfg.search);
  manifest["config"] = cfg.raw;
  manifest["eval_log"] = eval_log_json(archive);
  io::write_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

int cmd_calibrate(const RunConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  const auto& cal = cfg.calibration;
  std::vector<int> n_values;
  for (int n = cal.n_lo; n <= cal.n_hi; ++n) {
    n_values.push_back(n);
  }
  const auto family = [&](int n) {
    moo::DesignPoint p;
    p.h = cal.h;
    p.N = n;
    return make_ocp(cfg, p);
  };
  const std::vector<resource::TimingSample> samples =
      resource::measure(family, n_values, cal.reps);
  const resource::ResourceModel model = resource::calibrate(samples, cal.degree);

  json out;
  out["degree"] = model.degree();
  out["coefficients"] = model.a;
  out["host_note"] = "wall-clock solve times, single thread, 2 warm-up solves discarded per N";
  io::write_file(out_dir + "/model.json", out.dump(2) + "\n");
  io::write_file(out_dir + "/timings.csv", io::timings_csv(samples));
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_dir) {
  const moo::Evaluator evaluator = make_evaluator(cfg);
  const moo::Archive archive = moo::grid_oracle(evaluator, cfg.search, cfg.sweep_n_h);
  ensure_dir(out_dir);
  io::write_file(out_dir + "/archive.csv", io::archive_csv(archive));
  io::write_file(out_dir + "/front.csv", io::front_csv(archive));
  return 0;
}

int cmd_optimize(const RunConfig& cfg, const std::string& out_dir) {
  const moo::Archive archive = run_optimizer(cfg);
  write_run_outputs(cfg, archive, out_dir);
  return 0;
}

int cmd_replay(const std::string& manifest_path, const std::string& out_dir) {
  std::ifstream in(manifest_path);
  if (!in) {
    throw ConfigError("config error at " + manifest_path + ": cannot open manifest");
  }
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config error at " + manifest_path + ": " + e.what());
  }
  if (!manifest.contains("config")) {
    throw ConfigError("config error at " + manifest_path + "/config: missing");
  }
  const RunConfig cfg = parse_config(manifest.at("config"));
  const moo::Archive archive = run_optimizer(cfg);

  if (manifest.contains("eval_log")) {
    const json replayed = eval_log_json(archive);
    if (replayed != manifest.at("eval_log")) {
      throw std::runtime_error("replay mismatch: archive differs from manifest eval_log");
    }
  }
  write_run_outputs(cfg, archive, out_dir);
  return 0;
}

int cmd_simulate(const RunConfig& cfg, double h, int N, const Vector& x0,
                 const std::string& out_dir) {
  if (!(h > 0.0) || N < 1) {
    throw ConfigError("config error at design point: need h > 0 and N >= 1");
  }
  moo::DesignPoint p;
  p.h = h;
  p.N = N;
  const mpc::OcpSpec spec = make_ocp(cfg, p);
  if (x0.size() != cfg.plant.n_x) {
    throw ConfigError("config error at x0: wrong state dimension");
  }
  const cloop::SimResult result = cloop::simulate(cfg.plant, spec, x0, cfg.sim);
  ensure_dir(out_dir);
  io::write_file(out_dir + "/trajectory.csv", io::trajectory_csv(result.traj, result.U));
  return 0;
}

namespace {

std::vector<moo::ObjectiveVector> rows_to_objectives(const std::vector<io::ArchiveRow>& rows) {
  std::vector<moo::ObjectiveVector> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back({r.V, r.eta});
  }
  return out;
}

std::vector<moo::ObjectiveVector> front_of(const std::vector<moo::ObjectiveVector>& objs) {
  std::vector<moo::ObjectiveVector> front;
  for (int i : moo::pareto_filter(objs)) {
    front.push_back(objs[i]);
  }
  return front;
}

// The rank column declares each CSV's own front; honoring it keeps
// hand-built reference fronts intact instead of re-filtering them.
std::vector<moo::ObjectiveVector> declared_front(const std::vector<io::ArchiveRow>& rows) {
  std::vector<moo::ObjectiveVector> front;
  for (const auto& r : rows) {
    if (r.rank == 1) {
      front.push_back({r.V, r.eta});
    }
  }
  if (front.empty()) {
    throw std::runtime_error("metrics: CSV has no rank-1 rows");
  }
  return front;
}

json metrics_between(const std::vector<moo::ObjectiveVector>& front,
                     const std::vector<moo::ObjectiveVector>& ref_front) {
  std::vector<moo::ObjectiveVector> uni = front;
  uni.insert(uni.end(), ref_front.begin(), ref_front.end());
  const auto nf = moo::normalize_front(front, uni);
  const auto nr = moo::normalize_front(ref_front, uni);
  const double delta = moo::closeness(nf, nr);
  const moo::CoverageVariants psi = moo::coverage_variants(nf, nr);
  return json{{"delta", delta}, {"psi", psi.mean}, {"psi_sum", psi.sum}, {"psi_max", psi.max}};
}

}  // namespace

int cmd_metrics(const std::string& run_csv, const std::string& ref_csv,
                const std::string& out_dir) {
  std::vector<io::ArchiveRow> run_rows = io::read_archive_csv(run_csv);
  std::vector<io::ArchiveRow> ref_rows = io::read_archive_csv(ref_csv);
  if (run_rows.empty() || ref_rows.empty()) {
    throw std::runtime_error("metrics: empty CSV input");
  }
  std::sort(run_rows.begin(), run_rows.end(),
            [](const auto& a, const auto& b) { return a.eval_index < b.eval_index; });

  const auto run_objs = rows_to_objectives(run_rows);
  const auto ref_front = declared_front(ref_rows);
  const auto run_front = declared_front(run_rows);

  json out = metrics_between(run_front, ref_front);
  out["n_evals"] = run_rows.size();

  // Closeness/coverage of every archive prefix, for the evaluation-count
  // convergence curves.
  json curve = json::array();
  std::vector<moo::ObjectiveVector> prefix;
  for (size_t k = 0; k < run_objs.size(); ++k) {
    prefix.push_back(run_objs[k]);
    const json m = metrics_between(front_of(prefix), ref_front);
    curve.push_back(json{{"evals", k + 1}, {"delta", m["delta"]}, {"psi", m["psi"]}});
  }
  out["curve"] = curve;

  ensure_dir(out_dir);
  io::write_file(out_dir + "/metrics.json", out.dump(2) + "\n");
  return 0;
}

}  // namespace modmpc::cli
