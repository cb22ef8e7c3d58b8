#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "catforge/commands.hpp"
#include "catforge/serialize.hpp"

using namespace catforge;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  fs::path dir;
};

fs::path workspace(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "catforge_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string& command, const std::string& name,
        const std::string& config, std::optional<std::uint64_t> seed = {}) {
  const fs::path ws = workspace(name);
  write_text(ws / "run.ini", config);
  CommandOptions opt;
  opt.config_path = ws / "run.ini";
  opt.out_dir = ws / "out";
  opt.seed = seed;
  std::ostringstream out, err;
  const int code = run_command(command, opt, out, err);
  return {code, out.str(), err.str(), ws / "out"};
}

// Parses a CSV with a header row into named columns.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::vector<double> column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    REQUIRE(it != header.end());
    const auto k = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(std::stod(r[k]));
    return out;
  }
};

Table read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (line.back() == ',') fields.emplace_back();
    if (first) {
      t.header = fields;
      first = false;
    } else {
      t.rows.push_back(fields);
    }
  }
  return t;
}

bool same_tree(const fs::path& a, const fs::path& b) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
  std::size_t count = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++count;
  if (count != names.size()) return false;
  for (const auto& n : names) {
    if (read_text(a / n) != read_text(b / n)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("generate") {
  const Run r = run("generate", "gen_single", "[scheme]\neps_plus = 0.3\neps_minus = 0\neta = 1\n");
  REQUIRE(r.code == kExitOk);
  const Table pn = read_csv(r.dir / "photon_distribution.csv");
  CHECK(pn.header == std::vector<std::string>{"n", "p"});
  const auto p = pn.column("p");
  CHECK(p[1] == 0.0);
  CHECK(p[3] == 0.0);
  const Json summary = read_json(r.dir / "summary.json");
  CHECK(summary.at("purity").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(summary.at("c0").get<double>() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(fs::exists(r.dir / "rho_plus.json"));
  const Json rho = read_json(r.dir / "rho_plus.json");
  CHECK(rho.at("kind") == "density");
  CHECK(rho.contains("success_weight"));

  const Run mixed = run("generate", "gen_mixed", "[scheme]\neps_plus = 0.3\neps_minus = 0.3\n");
  REQUIRE(mixed.code == kExitOk);
  CHECK(read_json(mixed.dir / "summary.json").at("purity").get<double>() ==
        doctest::Approx(0.5).epsilon(1e-9));

  const Run missing = run("generate", "gen_missing", "[scheme]\neps_minus = 0.1\n");
  CHECK(missing.code == kExitConfig);
  CHECK(missing.err.find("eps_plus") != std::string::npos);
  CHECK_FALSE(fs::exists(missing.dir));

  const Run range = run("generate", "gen_range", "[scheme]\neps_plus = 0.3\neta = 1.2\n");
  CHECK(range.code == kExitConfig);
  CHECK_FALSE(fs::exists(range.dir));

  const Run numeric = run("generate", "gen_tail", "[scheme]\neps_plus = 0.9\ncutoff = 8\n");
  CHECK(numeric.code == kExitNumeric);
  CHECK_FALSE(fs::exists(numeric.dir));
}

TEST_CASE("wigner") {
  const fs::path ws = workspace("wig_vac_state");
  write_text(ws / "vac.json",
             "{\"kind\": \"pure\", \"n_modes\": 1, \"cutoff\": 2, "
             "\"data\": [[1, 0], [0, 0], [0, 0]]}\n");
  const Run vac = run("wigner", "wig_vac",
                      "[wigner]\nstate_path = " + (ws / "vac.json").string() +
                          "\nstep = 0.1\n");
  REQUIRE(vac.code == kExitOk);
  const Json s = read_json(vac.dir / "summary.json");
  CHECK(s.at("w00").get<double>() == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-4));
  CHECK(s.at("min_w").get<double>() >= 0.0);
  CHECK(vac.out.find("W(0,0)=0.318") != std::string::npos);
  const Table grid = read_csv(vac.dir / "wigner.csv");
  CHECK(grid.header == std::vector<std::string>{"x", "p", "W"});
  CHECK(grid.rows.size() == 121 * 121);
  const Json wj = read_json(vac.dir / "wigner.json");
  CHECK(wj.at("x_axis").size() == 121);

  const Run lossy = run("wigner", "wig_lossy",
                        "[scheme]\neps_plus = 0.3\neta = 0.85\n[wigner]\nx_min=-3\nx_max=3\np_min=-3\np_max=3\n");
  REQUIRE(lossy.code == kExitOk);
  CHECK(read_json(lossy.dir / "summary.json").at("min_w").get<double>() < 0.0);

  const Run bad = run("wigner", "wig_step", "[scheme]\neps_plus = 0.3\n[wigner]\nstep = 0\n");
  CHECK(bad.code == kExitConfig);
  CHECK_FALSE(fs::exists(bad.dir));
  const Run neg = run("wigner", "wig_neg", "[scheme]\neps_plus = 0.3\n[wigner]\nstep = -0.1\n");
  CHECK(neg.code == kExitConfig);
}

TEST_CASE("sweep") {
  const Run em = run("sweep", "sweep_em",
                     "[scheme]\neps_plus = 0.3\n[sweep]\naxis = eps_minus\n"
                     "values = 0, 0.03, 0.06, 0.09, 0.12, 0.15, 0.18, 0.21, 0.24, 0.27, 0.3\n");
  REQUIRE(em.code == kExitOk);
  const Table t = read_csv(em.dir / "sweep.csv");
  REQUIRE(t.rows.size() == 11);
  const auto a2 = t.column("alpha_star_sq");
  const auto pur = t.column("purity");
  const auto c0 = t.column("c0");
  const auto nm = t.column("mean_n_minus");
  // Cat size grows until the vacuum component is suppressed (eps_minus near eps_plus).
  for (std::size_t i = 1; i < 10; ++i) CHECK(a2[i] >= a2[i - 1]);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    CHECK(pur[i] <= pur[i - 1] + 1e-12);
    CHECK(c0[i] >= c0[i - 1] - 1e-12);
    CHECK(nm[i] > nm[i - 1]);
  }
  CHECK(pur.back() == doctest::Approx(0.5).epsilon(1e-9));

  const Run eta = run("sweep", "sweep_eta",
                      "[scheme]\neps_plus = 0.3\neps_minus = 0.1\n[sweep]\naxis = eta\n"
                      "start = 1\nstop = 0.5\ncount = 6\n");
  REQUIRE(eta.code == kExitOk);
  const auto f = read_csv(eta.dir / "sweep.csv").column("fidelity_star");
  for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i] <= f[i - 1] + 1e-12);

  const fs::path ws = workspace("sweep_table_src");
  write_text(ws / "t.csv", "delta_ns,eps_plus,eps_minus\n0,0.3,0.1\n");
  const Run tab = run("sweep", "sweep_table",
                      "[scheme]\neta = 0.9\n[sweep]\naxis = table\ntable_path = " +
                          (ws / "t.csv").string() + "\n");
  REQUIRE(tab.code == kExitOk);
  const Run gen = run("generate", "sweep_table_gen",
                      "[scheme]\neps_plus = 0.3\neps_minus = 0.1\neta = 0.9\n");
  REQUIRE(gen.code == kExitOk);
  const Table tt = read_csv(tab.dir / "sweep.csv");
  const Json gs = read_json(gen.dir / "summary.json");
  CHECK(tt.column("zeta_delta")[0] == 0.0);
  CHECK(tt.column("purity")[0] == gs.at("purity").get<double>());
  CHECK(tt.column("c0")[0] == gs.at("c0").get<double>());
  CHECK(tt.column("mean_n_plus")[0] == gs.at("mean_photon").get<double>());

  write_text(ws / "bad.csv", "delta_ns,eps_plus,eps_minus\n0,0.3,0.1\n32,0.3\n");
  const Run bad = run("sweep", "sweep_bad",
                      "[sweep]\naxis = table\ntable_path = " + (ws / "bad.csv").string() + "\n");
  CHECK(bad.code == kExitConfig);
  CHECK(bad.err.find("row 2") != std::string::npos);
  CHECK_FALSE(fs::exists(bad.dir));

  CHECK(run("sweep", "sweep_axis", "[scheme]\neps_plus=0.3\n[sweep]\naxis = pump\n").code == kExitConfig);
}

TEST_CASE("tomo") {
  const std::string cfg = "[tomo]\ntruth = vacuum\nn_samples = 20000\nseed = 1\n";
  const Run a = run("tomo", "tomo_a", cfg);
  REQUIRE(a.code == kExitOk);
  const Json s = read_json(a.dir / "summary.json");
  CHECK(s.at("fidelity").get<double>() >= 0.99);
  CHECK(read_csv(a.dir / "samples.csv").rows.size() == 20000);
  CHECK(read_json(a.dir / "samples.meta.json").at("seed") == 1);
  const auto ll = read_csv(a.dir / "likelihood.csv").column("loglikelihood");
  for (std::size_t k = 1; k < ll.size(); ++k) CHECK(ll[k] >= ll[k - 1] - 1e-10);

  const Run b = run("tomo", "tomo_b", cfg);
  REQUIRE(b.code == kExitOk);
  CHECK(same_tree(a.dir, b.dir));

  const Run c = run("tomo", "tomo_c", cfg, 2);
  REQUIRE(c.code == kExitOk);
  CHECK(read_json(c.dir / "samples.meta.json").at("seed") == 2);
  CHECK(read_text(c.dir / "samples.csv") != read_text(a.dir / "samples.csv"));

  // Reconstruct from the record written above.
  const Run ext = run("tomo", "tomo_ext",
                      "[tomo]\nsamples_path = " + (a.dir / "samples.csv").string() + "\n");
  REQUIRE(ext.code == kExitOk);
  CHECK(read_text(ext.dir / "rho_hat.json") == read_text(a.dir / "rho_hat.json"));
  CHECK_FALSE(fs::exists(ext.dir / "samples.csv"));

  const fs::path ws = workspace("tomo_hdr_src");
  write_text(ws / "s.csv", "0.1,0.2\n0.3,0.4\n");
  const Run hdr = run("tomo", "tomo_hdr", "[tomo]\nsamples_path = " + (ws / "s.csv").string() + "\n");
  CHECK(hdr.code == kExitConfig);
  CHECK_FALSE(fs::exists(hdr.dir));

  CHECK(run("tomo", "tomo_truth", "[tomo]\ntruth = cat\n").code == kExitConfig);
  CHECK(run("tomo", "tomo_iters", "[tomo]\ntruth = vacuum\nstop_tol = -1\n").code == kExitConfig);
}

TEST_CASE("command dispatch") {
  CHECK(run("plot", "dispatch", "[scheme]\neps_plus = 0.3\n").code == kExitConfig);
  CommandOptions opt;
  opt.config_path = "/nonexistent/run.ini";
  std::ostringstream out, err;
  CHECK(run_command("generate", opt, out, err) == kExitConfig);
}
