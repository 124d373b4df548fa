#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tnbs/errors.hpp"
#include "tnbs/entropy.hpp"
#include "tnbs/experiments.hpp"

using namespace tnbs;

namespace {

CommandRequest request(const std::string& command, const std::string& text) {
  CommandRequest rq;
  rq.command = command;
  rq.config = parse_config_unresolved(text);
  return rq;
}

}  // namespace

TEST(BondSearch, LosslessProductNeedsNoBond) {
  const auto b = bond_search(parse_config("mode=bond-search\nN=0\nM=4\nmu=1\nd=9\n"));
  EXPECT_EQ(b.chi_star, 1);
  EXPECT_EQ(b.chi_doubling, 1);
  EXPECT_FALSE(b.capped);
  ASSERT_FALSE(b.table.empty());
  EXPECT_EQ(b.table.front().first, 1);
}

TEST(BondSearch, CapReported) {
  const auto b = bond_search(parse_config("mode=bond-search\nN=2\nM=6\nmu=0.5\nd=5\nn_max=4\nchi_max=2\ntarget_error=0.001\n"));
  EXPECT_TRUE(b.capped);
  EXPECT_EQ(b.table.back().first, 2);
}

TEST(Sweep, GridOrderAndDeterminismAcrossJobs) {
  const auto base = parse_config_unresolved("mode=mpo\nM=4\nmu=0.5\nn_max=2\nd=5\n");
  const std::vector<SweepAxis> axes = {{"N", {"1", "2"}}, {"chi", {"2", "8", "32"}}};
  const auto one = run_sweep(base, axes, 1);
  const auto four = run_sweep(base, axes, 4);
  ASSERT_EQ(one.size(), 6u);
  std::ostringstream a, b;
  write_sweep_csv(a, axes, one);
  write_sweep_csv(b, axes, four);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(one[0].axis_values, (std::vector<std::string>{"1", "2"}));
  EXPECT_EQ(one[1].axis_values, (std::vector<std::string>{"1", "8"}));
  EXPECT_EQ(one[3].axis_values, (std::vector<std::string>{"2", "2"}));
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "point,axis_N,axis_chi,N,M,d,chi,r,mu,gamma,beta,n_max,ee_bits,trace_error,max_bond,seed,config_hash,status");
}

TEST(Sweep, AsymptoticAxes) {
  const auto base = parse_config_unresolved("mode=asymptotic\nN=100\nbeta=1\ngamma=0.5\n");
  const auto g = run_sweep(base, {{"gamma", {"0.25", "0.5", "1"}}}, 2);
  ASSERT_EQ(g.size(), 3u);
  for (const auto& p : g) EXPECT_EQ(p.status, "ok");
  const auto r = run_sweep(base, {{"r", {"0.5", "0.88", "1.2"}}}, 1);
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_GE(r[i].ee_bits, r[i - 1].ee_bits);
}

TEST(Sweep, PerPointFailureIsRecorded) {
  const auto base = parse_config_unresolved("mode=asymptotic\nN=10\n");
  const auto pts = run_sweep(base, {{"n_max", {"4", "5"}}}, 1);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].status, "ok");
  EXPECT_EQ(pts[1].status.rfind("error", 0), 0u);
  EXPECT_THROW(run_sweep(base, {{"N", {"x"}}}, 1), ParseError);
  EXPECT_THROW(run_sweep(base, {}, 1), ParseError);
}

TEST(Sweep, DefaultsResolvePerPoint) {
  const auto base = parse_config_unresolved("mode=asymptotic\n");
  const auto pts = run_sweep(base, {{"N", {"2", "10"}}}, 1);
  EXPECT_EQ(pts[0].config.M, 20);
  EXPECT_EQ(pts[1].config.M, 40);
}

TEST(Manifest, RoundTripAndTamperDetection) {
  auto rq = request("sweep", "mode=asymptotic\nN=50\nbeta=1\ngamma=0.5\n");
  rq.axes = {{"r", {"0.5", "0.88"}}};
  const CommandResult res = execute(rq);
  const std::string js = manifest_json(rq, res, 0.0);
  const CommandRequest back = request_from_manifest(js);
  EXPECT_EQ(back.command, "sweep");
  EXPECT_EQ(canonical_text(back.config), canonical_text(rq.config));
  ASSERT_EQ(back.axes.size(), 1u);
  EXPECT_EQ(back.axes[0].values, rq.axes[0].values);
  const CommandResult again = execute(back);
  ASSERT_EQ(again.outputs.size(), 1u);
  EXPECT_EQ(again.outputs[0].name, res.outputs[0].name);
  EXPECT_EQ(again.outputs[0].content, res.outputs[0].content);
  const auto hashes = manifest_output_hashes(js);
  ASSERT_EQ(hashes.size(), 1u);
  EXPECT_EQ(hashes[0].second, hash_hex(text_hash(res.outputs[0].content)));

  std::string bad = js;
  const auto pos = bad.find("N=50");
  ASSERT_NE(pos, std::string::npos);
  bad.replace(pos, 4, "N=51");
  EXPECT_THROW(request_from_manifest(bad), ValidationError);
  EXPECT_THROW(request_from_manifest("{"), ValidationError);
}

TEST(Execute, ExitCodesAndOutputs) {
  auto unreliable = request("run", "N=2\nM=6\nmu=0.5\nchi=1\nerror_budget=0.001\n");
  EXPECT_EQ(execute(unreliable).exit_code, 4);
  auto oracle = request("oracle-check", "N=1\nM=3\nmu=0.5\nn_max=2\nd=3\n");
  EXPECT_EQ(execute(oracle).exit_code, 0);
  auto asym = request("asymptotic", "r=0.88\nbeta=1\ngamma=0.5\n");
  asym.n_list = {100, 1000};
  const auto res = execute(asym);
  ASSERT_EQ(res.outputs.size(), 1u);
  EXPECT_EQ(res.outputs[0].name.rfind("asymptotic-", 0), 0u);
  EXPECT_EQ(std::count(res.outputs[0].content.begin(), res.outputs[0].content.end(), '\n'), 3);
  EXPECT_THROW(execute(request("frobnicate", "N=1\n")), ParseError);
}

TEST(Execute, WriteOutputsCreatesManifest) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tnbs-test-outputs";
  fs::remove_all(dir);
  auto rq = request("asymptotic", "r=0.88\nmu=0.1\n");
  const auto paths = write_outputs(dir.string(), rq, execute(rq), 0.0);
  ASSERT_EQ(paths.size(), 2u);
  for (const auto& p : paths) EXPECT_TRUE(fs::exists(p));
  EXPECT_NE(paths[1].find(".manifest.json"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Estimates, FiniteMAndAsymptoticAreConsistent) {
  const auto cfg = parse_config("N=1\nM=2\nmu=0.5\nd=9\n");
  const auto layout = haar_circuit(2, cfg.seed);
  const double fm = finite_m_estimate(cfg, layout);
  EXPECT_GE(fm, 0.0);
  const auto cfg1 = parse_config("mode=asymptotic\nN=10\nmu=0.5\nd=9\n");
  EXPECT_NEAR(asymptotic_estimate(cfg1), 10 * single_mode_ee(InputSpec::squeezed(0.88, 8), 0.5, 8, M_PI / 4), 1e-12);
}
