#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tnbs/config.hpp"
#include "tnbs/errors.hpp"
#include "tnbs/experiments.hpp"

namespace {

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> sets;
  std::string output;
  bool timing = false;
  int jobs = 1;
  std::vector<std::string> axes;
  std::string n_list;
  std::string manifest;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw tnbs::ParseError("config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::pair<std::string, std::string> split_kv(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw tnbs::ParseError(s, "expected key=value");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

tnbs::CommandRequest build_request(const std::string& command, const CommonArgs& a) {
  tnbs::CommandRequest rq;
  rq.command = command;
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const std::string& s : a.sets) overrides.push_back(split_kv(s));
  rq.config = tnbs::parse_config_unresolved(a.config_file.empty() ? "" : read_file(a.config_file), overrides);
  if (a.timing) rq.config.timing = true;
  if (!a.output.empty()) rq.config.output = a.output;
  rq.jobs = a.jobs;
  for (const std::string& ax : a.axes) {
    const auto [key, values] = split_kv(ax);
    rq.axes.push_back({key, split_list(values)});
  }
  for (const std::string& n : split_list(a.n_list)) {
    try {
      rq.n_list.push_back(std::stod(n));
    } catch (const std::exception&) {
      throw tnbs::ParseError("n-list", "not a number: '" + n + "'");
    }
  }
  return rq;
}

int execute_and_write(const tnbs::CommandRequest& rq) {
  const auto start = std::chrono::steady_clock::now();
  const tnbs::CommandResult res = tnbs::execute(rq);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const std::string& p : tnbs::write_outputs(tnbs::output_dir(rq.config), rq, res, wall)) {
    std::cout << "wrote " << p << "\n";
  }
  std::cout << res.summary << "\n";
  return res.exit_code;
}

int replay(const CommonArgs& a) {
  const std::string text = read_file(a.manifest);
  tnbs::CommandRequest rq = tnbs::request_from_manifest(text);
  if (!a.output.empty()) rq.config.output = a.output;
  if (a.jobs > 1) rq.jobs = a.jobs;
  const tnbs::CommandResult res = tnbs::execute(rq);
  int mismatches = 0;
  for (const auto& [name, hash] : tnbs::manifest_output_hashes(text)) {
    bool found = false;
    for (const tnbs::OutputFile& f : res.outputs) {
      if (f.name != name) continue;
      found = true;
      const std::string got = tnbs::hash_hex(tnbs::text_hash(f.content));
      if (got != hash) {
        ++mismatches;
        std::cout << name << ": output hash " << got << " differs from recorded " << hash << "\n";
      } else {
        std::cout << name << ": reproduced\n";
      }
    }
    if (!found) {
      ++mismatches;
      std::cout << name << ": not produced on replay\n";
    }
  }
  if (rq.config.timing && mismatches > 0) {
    std::cout << "timing columns were recorded; hash differences are expected\n";
    return res.exit_code;
  }
  return mismatches > 0 ? 1 : res.exit_code;
}

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("-c,--config", a.config_file, "key=value config file");
  sub->add_option("-s,--set", a.sets, "override, key=value (repeatable; wins over the file)");
  sub->add_option("overrides", a.sets, "overrides as key=value");
  sub->add_option("-o,--output", a.output, "output directory (default: $TNBS_OUTPUT_DIR or .)");
  sub->add_flag("--timing", a.timing, "record wall-clock seconds in CSV output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric tensor-network simulator for Gaussian boson sampling"};
  app.require_subcommand(1);
  CommonArgs a;

  auto* run = app.add_subcommand("run", "single experiment; dispatches on mode (default mpo)");
  add_common(run, a);
  auto* sweep = app.add_subcommand("sweep", "grid over one or two config keys");
  add_common(sweep, a);
  sweep->add_option("-a,--axis", a.axes, "key=v1,v2,... (one or two)")->required();
  sweep->add_option("-j,--jobs", a.jobs, "worker threads")->check(CLI::PositiveNumber);
  auto* bond = app.add_subcommand("bond-search", "smallest chi meeting target_error");
  add_common(bond, a);
  auto* asym = app.add_subcommand("asymptotic", "N * S1(mu) estimator curve");
  add_common(asym, a);
  asym->add_option("-n,--n-list", a.n_list, "comma separated N values (default: N from config)");
  auto* oracle = app.add_subcommand("oracle-check", "compare the engine with the dense oracle");
  add_common(oracle, a);
  auto* rep = app.add_subcommand("replay", "re-run a manifest and compare output hashes");
  rep->add_option("manifest", a.manifest, "manifest file")->required();
  rep->add_option("-o,--output", a.output, "output directory");
  rep->add_option("-j,--jobs", a.jobs, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (rep->parsed()) return replay(a);
    const std::string command = app.get_subcommands().front()->get_name();
    return execute_and_write(build_request(command, a));
  } catch (const tnbs::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tnbs::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
