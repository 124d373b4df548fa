#include "tnbs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tnbs/entropy.hpp"
#include "tnbs/errors.hpp"
#include "tnbs/oracle.hpp"
#include "tnbs/state.hpp"

namespace tnbs {

namespace {

constexpr std::size_t kFullChi = std::numeric_limits<int>::max();
constexpr int kPlateauLayers = 10;

bool pure_engine(const SimulationConfig& cfg) { return cfg.mode == Mode::mps; }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_safe(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    else if (c == '\n' || c == '\r') c = ' ';
    else if (c == '"') c = '\'';
  }
  return s;
}

struct Engine {
  CanonicalTNState state;
  bool pure = false;
  int cut = 0;

  double ee() const { return pure ? entropy_at_cut(state, cut) : mpo_entropy_at_cut(state, cut); }
  double error() const { return 1.0 - (pure ? norm_squared(state) : trace_of(state)); }
};

Engine make_engine(const SimulationConfig& cfg) {
  Engine e;
  e.pure = pure_engine(cfg);
  e.cut = cfg.cut;
  e.state = e.pure ? init_squeezed_product(cfg.r, cfg.N, cfg.M, cfg.n_max, cfg.d)
                   : init_lossy_squeezed(cfg.r, cfg.survival(), cfg.N, cfg.M, cfg.n_max, cfg.d);
  return e;
}

std::vector<FockGate> layer_gates(const std::vector<GateSpec>& layer, int d, bool doubled) {
  std::vector<FockGate> gates;
  gates.reserve(layer.size());
  for (const GateSpec& g : layer) {
    FockGate bs = beam_splitter(g.theta, g.phi, d);
    gates.push_back(doubled ? double_gate(bs) : std::move(bs));
  }
  return gates;
}

void apply_layer_specs(CanonicalTNState& state, const std::vector<GateSpec>& layer, std::size_t chi, int fragment) {
  const std::vector<FockGate> gates = layer_gates(layer, state.phys.local_dim(), state.doubled());
  std::vector<LayerGate> lg;
  for (std::size_t i = 0; i < layer.size(); ++i) lg.push_back({layer[i].site, &gates[i]});
  apply_layer(state, lg, chi, fragment);
}

double max_abs_diff(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("dense comparison of different sizes");
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

EntropyTrace run_experiment(const SimulationConfig& cfg, const CircuitLayout* layout) {
  CircuitLayout own;
  if (!layout) {
    own = haar_circuit(cfg.M, cfg.seed);
    layout = &own;
  }
  if (layout->modes != cfg.M) throw DimensionError("circuit and config disagree on the number of modes");
  Engine e = make_engine(cfg);
  EntropyTrace trace;
  const auto start = std::chrono::steady_clock::now();
  int since_increase = 0;
  for (std::size_t l = 0; l < layout->layers.size(); ++l) {
    apply_layer_specs(e.state, layout->layers[l], static_cast<std::size_t>(cfg.chi), cfg.fragment);
    LayerRecord rec;
    rec.layer = static_cast<int>(l) + 1;
    rec.cut = cfg.cut;
    rec.ee_bits = e.ee();
    rec.trace_error = e.error();
    rec.max_bond = e.state.max_bond();
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.records.push_back(rec);
    if (trace.records.size() == 1 || rec.ee_bits > trace.max_ee()) {
      trace.max_index = trace.records.size() - 1;
      since_increase = 0;
    } else {
      ++since_increase;
    }
    if (cfg.stop_on_plateau && since_increase >= kPlateauLayers) {
      trace.stopped_on_plateau = true;
      break;
    }
  }
  trace.unreliable = trace.final_trace_error() > cfg.error_budget;
  return trace;
}

double finite_m_estimate(const SimulationConfig& cfg, const CircuitLayout& layout) {
  const std::vector<double> angles = bipartition_angles(transfer_matrix(layout), cfg.cut);
  const std::vector<double> occupied(angles.begin(), angles.begin() + cfg.N);
  return finite_m_total_ee(InputSpec::squeezed(cfg.r, cfg.n_max), occupied, cfg.survival(), cfg.n_max);
}

double asymptotic_estimate(const SimulationConfig& cfg) {
  if (cfg.N == 0) return 0.0;
  const InputSpec input = InputSpec::squeezed(cfg.r, cfg.n_max);
  if (cfg.gamma) {
    return asymptotic_total_ee(input, cfg.N, ScalingSchedule{cfg.beta.value_or(1.0), *cfg.gamma}, cfg.n_max);
  }
  return cfg.N * single_mode_ee(input, cfg.survival(), cfg.n_max, std::numbers::pi / 4);
}

BondSearchResult bond_search(const SimulationConfig& cfg) {
  const CircuitLayout layout = haar_circuit(cfg.M, cfg.seed);
  auto error_at = [&](int chi) {
    SimulationConfig c = cfg;
    c.chi = chi;
    c.stop_on_plateau = false;
    return run_experiment(c, &layout).final_trace_error();
  };
  BondSearchResult res;
  int chi = cfg.chi_initial;
  int last_fail = 0;
  while (true) {
    const double err = error_at(chi);
    if (!res.table.empty() && !(err < res.table.back().second)) res.monotone = false;
    res.table.emplace_back(chi, err);
    if (err <= cfg.target_error) break;
    if (chi >= cfg.chi_max) {
      res.capped = true;
      break;
    }
    last_fail = chi;
    chi = std::min(2 * chi, cfg.chi_max);
  }
  res.doubling_steps = res.table.size();
  res.chi_doubling = chi;
  res.chi_star = chi;
  if (res.capped) return res;
  int lo = last_fail, hi = chi;
  for (int step = 0; step < cfg.refine_steps && lo > 0 && hi - lo > 1; ++step) {
    const int mid = lo + (hi - lo) / 2;
    const double err = error_at(mid);
    res.table.emplace_back(mid, err);
    if (err <= cfg.target_error) hi = mid;
    else lo = mid;
  }
  res.chi_star = hi;
  return res;
}

std::vector<SweepPoint> run_sweep(const SimulationConfig& base, const std::vector<SweepAxis>& axes, int jobs) {
  if (axes.empty() || axes.size() > 2) throw ParseError("axis", "a sweep needs one or two axes");
  for (const SweepAxis& a : axes) {
    if (a.values.empty()) throw ParseError(a.key, "sweep axis has no values");
    SimulationConfig probe;
    for (const std::string& v : a.values) set_config_value(probe, a.key, v);
  }
  std::vector<SweepPoint> points;
  const std::size_t n1 = axes[0].values.size();
  const std::size_t n2 = axes.size() > 1 ? axes[1].values.size() : 1;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      SweepPoint p;
      p.config = base;
      p.axis_values.push_back(axes[0].values[i]);
      set_config_value(p.config, axes[0].key, axes[0].values[i]);
      if (axes.size() > 1) {
        p.axis_values.push_back(axes[1].values[j]);
        set_config_value(p.config, axes[1].key, axes[1].values[j]);
      }
      points.push_back(std::move(p));
    }
  }

  auto evaluate = [](SweepPoint& p) {
    try {
      SimulationConfig& c = p.config;
      if (c.mode == Mode::asymptotic) {
        if (c.d == 0) c.d = c.n_max + 1;
        resolve(c);
        p.ee_bits = asymptotic_estimate(c);
        return;
      }
      resolve(c);
      if (c.mode == Mode::oracle_check) {
        const OracleReport rep = oracle_check(c);
        p.trace_error = rep.max_deviation;
        p.status = rep.pass ? "ok" : "oracle-mismatch";
        return;
      }
      const EntropyTrace t = run_experiment(c);
      p.ee_bits = t.max_ee();
      p.trace_error = t.final_trace_error();
      for (const LayerRecord& r : t.records) p.max_bond = std::max(p.max_bond, r.max_bond);
      if (t.unreliable) p.status = "unreliable";
    } catch (const std::exception& ex) {
      p.status = std::string("error: ") + ex.what();
    }
  };

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) evaluate(points[i]);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return points;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepAxis>& axes, const std::vector<SweepPoint>& points) {
  os << "point";
  for (const SweepAxis& a : axes) os << ",axis_" << a.key;
  os << ",N,M,d,chi,r,mu,gamma,beta,n_max,ee_bits,trace_error,max_bond,seed,config_hash,status\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SweepPoint& p = points[i];
    const SimulationConfig& c = p.config;
    os << i;
    for (const std::string& v : p.axis_values) os << ',' << csv_safe(v);
    double mu = std::numeric_limits<double>::quiet_NaN();
    try {
      mu = c.survival();
    } catch (const std::exception&) {
    }
    os << ',' << c.N << ',' << c.M << ',' << c.d << ',' << c.chi << ',' << fmt(c.r) << ',' << fmt(mu) << ','
       << (c.gamma ? fmt(*c.gamma) : "") << ',' << (c.beta ? fmt(*c.beta) : "") << ',' << c.n_max << ','
       << fmt(p.ee_bits) << ',' << fmt(p.trace_error) << ',' << p.max_bond << ',' << c.seed << ','
       << hash_hex(config_hash(c)) << ',' << csv_safe(p.status) << '\n';
  }
}

OracleReport oracle_check(const SimulationConfig& cfg, double tolerance) {
  const CircuitLayout layout = haar_circuit(cfg.M, cfg.seed);
  const int d = cfg.d;
  const auto amps = squeezed_amplitudes(cfg.r, cfg.n_max);
  Vector sq = Vector::Zero(d), vac = Vector::Zero(d);
  for (int n = 0; n <= cfg.n_max; ++n) sq[n] = amps[n];
  vac[0] = 1.0;
  std::vector<Vector> sites;
  for (int k = 0; k < cfg.M; ++k) sites.push_back(k < cfg.N ? sq : vac);

  OracleReport rep;
  const double mu = cfg.survival();
  if (pure_engine(cfg) || mu == 1.0) {
    DenseFockState dense = dense_product(sites);
    project_total(dense, d - 1);
    CanonicalTNState s = init_squeezed_product(cfg.r, cfg.N, cfg.M, cfg.n_max, d);
    for (const auto& layer : layout.layers) {
      apply_layer_specs(s, layer, kFullChi, cfg.fragment);
      for (const GateSpec& g : layer) dense_apply_gate(dense, beam_splitter(g.theta, g.phi, d), g.site);
    }
    rep.max_deviation = max_abs_diff(to_dense(s), dense.amplitudes);
    rep.entropy_deviation = std::abs(entropy_at_cut(s, cfg.cut) - dense_entropy(dense, cfg.cut));
  } else {
    DenseDensity dense;
    if (d == cfg.n_max + 1) {
      dense = dense_pure_density(dense_product(sites));
      const LossChannel ch = loss_channel(mu, d - 1);
      for (int k = 0; k < cfg.N; ++k) dense_apply_channel(dense, ch, k);
    } else {
      const Matrix lossy = lossy_squeezed_density(cfg.r, mu, cfg.n_max);
      Matrix sqr = Matrix::Zero(d, d), vacr = Matrix::Zero(d, d);
      sqr.topLeftCorner(cfg.n_max + 1, cfg.n_max + 1) = lossy;
      vacr(0, 0) = 1.0;
      std::vector<Matrix> rhos;
      for (int k = 0; k < cfg.M; ++k) rhos.push_back(k < cfg.N ? sqr : vacr);
      dense = dense_product_density(rhos);
    }
    project_total(dense, d - 1);
    CanonicalTNState s = init_lossy_squeezed(cfg.r, mu, cfg.N, cfg.M, cfg.n_max, d);
    for (const auto& layer : layout.layers) {
      apply_layer_specs(s, layer, kFullChi, cfg.fragment);
      for (const GateSpec& g : layer) dense_apply_gate(dense, beam_splitter(g.theta, g.phi, d), g.site);
    }
    const DenseDensity got = to_dense_operator(s);
    if (got.rho.rows() != dense.rho.rows()) throw DimensionError("dense operators of different sizes");
    rep.max_deviation = (got.rho - dense.rho).cwiseAbs().maxCoeff();
    rep.entropy_deviation = std::abs(mpo_entropy_at_cut(s, cfg.cut) - dense_entropy(dense, cfg.cut));
  }
  rep.pass = rep.max_deviation <= tolerance && rep.entropy_deviation <= tolerance;
  return rep;
}

namespace {

std::string request_key(const CommandRequest& rq) {
  std::string key = rq.command + "\n" + canonical_text(rq.config);
  for (const SweepAxis& a : rq.axes) {
    key += "axis " + a.key;
    for (const std::string& v : a.values) key += " " + v;
    key += "\n";
  }
  for (double n : rq.n_list) key += "n " + fmt(n) + "\n";
  return key;
}

std::string stem(const CommandRequest& rq) { return rq.command + "-" + hash_hex(text_hash(request_key(rq))); }

SimulationConfig resolved(const CommandRequest& rq, Mode mode) {
  SimulationConfig c = rq.config;
  c.mode = mode;
  resolve(c);
  return c;
}

CommandResult run_command(const CommandRequest& rq) {
  CommandResult res;
  const SimulationConfig c = resolved(rq, rq.config.mode == Mode::mps ? Mode::mps : Mode::mpo);
  const EntropyTrace t = run_experiment(c);
  std::ostringstream csv;
  write_trace_csv(csv, t, c.timing);
  res.outputs.push_back({stem(rq) + ".csv", csv.str()});
  std::ostringstream sum;
  sum << "max_ee_bits=" << fmt(t.max_ee()) << " at layer " << (t.records.empty() ? 0 : t.records[t.max_index].layer)
      << ", final_error=" << fmt(t.final_trace_error());
  if (t.stopped_on_plateau) sum << ", stopped on plateau";
  if (t.unreliable) {
    sum << ", error budget " << fmt(c.error_budget) << " exceeded";
    res.exit_code = 4;
  }
  res.summary = sum.str();
  return res;
}

CommandResult sweep_command(const CommandRequest& rq) {
  CommandResult res;
  const auto points = run_sweep(rq.config, rq.axes, rq.jobs);
  std::ostringstream csv;
  write_sweep_csv(csv, rq.axes, points);
  res.outputs.push_back({stem(rq) + ".csv", csv.str()});
  std::size_t failed = 0;
  for (const SweepPoint& p : points) failed += p.status.rfind("error", 0) == 0;
  res.summary = std::to_string(points.size()) + " points, " + std::to_string(failed) + " failed";
  return res;
}

CommandResult bond_search_command(const CommandRequest& rq) {
  CommandResult res;
  const SimulationConfig c = resolved(rq, Mode::bond_search);
  const BondSearchResult b = bond_search(c);
  std::ostringstream csv;
  csv << "step,phase,chi,trace_error\n";
  for (std::size_t i = 0; i < b.table.size(); ++i) {
    csv << i << ',' << (i < b.doubling_steps ? "doubling" : "refine") << ',' << b.table[i].first << ','
        << fmt(b.table[i].second) << '\n';
  }
  res.outputs.push_back({stem(rq) + ".csv", csv.str()});
  res.summary = "chi_star=" + std::to_string(b.chi_star) + " chi_doubling=" + std::to_string(b.chi_doubling) +
                (b.monotone ? "" : ", error not strictly decreasing") +
                (b.capped ? ", chi_max reached without meeting target" : "");
  if (b.capped) res.exit_code = 4;
  return res;
}

CommandResult asymptotic_command(const CommandRequest& rq) {
  CommandResult res;
  std::vector<double> ns = rq.n_list;
  if (ns.empty()) ns.push_back(rq.config.N);
  std::vector<ScalingPoint> pts;
  for (double n : ns) {
    if (!(n >= 1.0)) throw ParseError("N", "asymptotic N values must be at least 1");
    SimulationConfig c = rq.config;
    c.mode = Mode::asymptotic;
    c.N = 1;
    c.M = 0;
    if (c.d == 0) c.d = c.n_max + 1;
    resolve(c);
    const InputSpec input = InputSpec::squeezed(c.r, c.n_max);
    ScalingPoint p;
    p.N = n;
    p.n_max = c.n_max;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    p.gamma = c.gamma.value_or(nan);
    p.beta = c.gamma ? c.beta.value_or(1.0) : nan;
    if (c.gamma) {
      const ScalingSchedule sched{p.beta, *c.gamma};
      p.mu = sched.mu(n);
      p.ee_bits = asymptotic_total_ee(input, n, sched, c.n_max);
    } else {
      p.mu = c.survival();
      p.ee_bits = n * single_mode_ee(input, p.mu, c.n_max, std::numbers::pi / 4);
    }
    pts.push_back(p);
  }
  std::ostringstream csv;
  write_scaling_csv(csv, pts);
  res.outputs.push_back({stem(rq) + ".csv", csv.str()});
  res.summary = std::to_string(pts.size()) + " points";
  return res;
}

CommandResult oracle_command(const CommandRequest& rq) {
  CommandResult res;
  SimulationConfig c = rq.config;
  if (c.mode != Mode::mps) c.mode = Mode::oracle_check;
  resolve(c);
  const OracleReport rep = oracle_check(c);
  std::ostringstream csv;
  csv << "max_deviation,entropy_deviation,tolerance,pass\n"
      << fmt(rep.max_deviation) << ',' << fmt(rep.entropy_deviation) << ',' << fmt(1e-9) << ','
      << (rep.pass ? "true" : "false") << '\n';
  res.outputs.push_back({stem(rq) + ".csv", csv.str()});
  res.summary = std::string(rep.pass ? "oracle agreement" : "oracle MISMATCH") +
                " max_deviation=" + fmt(rep.max_deviation) + " entropy_deviation=" + fmt(rep.entropy_deviation);
  res.exit_code = rep.pass ? 0 : 1;
  return res;
}

}  // namespace

CommandResult execute(const CommandRequest& rq) {
  if (rq.command == "run") {
    switch (rq.config.mode) {
      case Mode::mps:
      case Mode::mpo: return run_command(rq);
      case Mode::asymptotic: return asymptotic_command(rq);
      case Mode::oracle_check: return oracle_command(rq);
      case Mode::bond_search: return bond_search_command(rq);
    }
  }
  if (rq.command == "sweep") return sweep_command(rq);
  if (rq.command == "bond-search") return bond_search_command(rq);
  if (rq.command == "asymptotic") return asymptotic_command(rq);
  if (rq.command == "oracle-check") return oracle_command(rq);
  throw ParseError("command", "unknown command '" + rq.command + "'");
}

std::string manifest_json(const CommandRequest& rq, const CommandResult& res, double wall_seconds) {
  using nlohmann::json;
  json j;
  j["tool"] = "tnbs";
  j["command"] = rq.command;
  const std::string text = canonical_text(rq.config);
  j["config_text"] = text;
  j["config_hash"] = hash_hex(text_hash(text));
  if (rq.command != "sweep" && rq.command != "asymptotic") {
    try {
      SimulationConfig c = rq.config;
      resolve(c);
      j["resolved_config"] = canonical_text(c);
    } catch (const Error&) {
    }
  }
  j["timing"] = rq.config.timing;
  j["jobs"] = rq.jobs;
  json axes = json::array();
  for (const SweepAxis& a : rq.axes) axes.push_back({{"key", a.key}, {"values", a.values}});
  j["axes"] = axes;
  j["n_list"] = rq.n_list;
  json outs = json::array();
  for (const OutputFile& f : res.outputs) outs.push_back({{"name", f.name}, {"fnv1a64", hash_hex(text_hash(f.content))}});
  j["outputs"] = outs;
  j["exit_code"] = res.exit_code;
  j["summary"] = res.summary;
  j["wall_seconds"] = wall_seconds;
  return j.dump(2) + "\n";
}

CommandRequest request_from_manifest(const std::string& json_text) {
  using nlohmann::json;
  CommandRequest rq;
  try {
    const json j = json::parse(json_text);
    const std::string text = j.at("config_text").get<std::string>();
    if (hash_hex(text_hash(text)) != j.at("config_hash").get<std::string>()) {
      throw ValidationError("manifest config hash does not match its config text");
    }
    rq.command = j.at("command").get<std::string>();
    rq.config = parse_config_unresolved(text);
    rq.config.timing = j.value("timing", false);
    rq.jobs = j.value("jobs", 1);
    for (const json& a : j.value("axes", json::array())) {
      rq.axes.push_back({a.at("key").get<std::string>(), a.at("values").get<std::vector<std::string>>()});
    }
    rq.n_list = j.value("n_list", std::vector<double>{});
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed manifest: ") + ex.what());
  }
  return rq;
}

std::vector<std::pair<std::string, std::string>> manifest_output_hashes(const std::string& json_text) {
  using nlohmann::json;
  std::vector<std::pair<std::string, std::string>> out;
  try {
    const json j = json::parse(json_text);
    for (const json& f : j.at("outputs")) {
      out.emplace_back(f.at("name").get<std::string>(), f.at("fnv1a64").get<std::string>());
    }
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed manifest: ") + ex.what());
  }
  return out;
}

std::vector<std::string> write_outputs(const std::string& dir, const CommandRequest& rq, const CommandResult& res,
                                       double wall_seconds) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> paths;
  auto put = [&](const std::string& name, const std::string& content) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream os(p, std::ios::binary);
    os << content;
    if (!os) throw Error("cannot write " + p.string());
    paths.push_back(p.string());
  };
  for (const OutputFile& f : res.outputs) put(f.name, f.content);
  put(stem(rq) + ".manifest.json", manifest_json(rq, res, wall_seconds));
  return paths;
}

}  // namespace tnbs
