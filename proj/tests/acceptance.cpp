// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "lpa/lpa.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

std::vector<std::size_t> anchors_for_times(std::size_t first_t, std::size_t last_t) {
  std::vector<std::size_t> a;
  for (std::size_t t = first_t; t <= last_t; ++t) {
    a.push_back(t - 1);
  }
  return a;
}

lpa::BootstrapConfig with_draws(std::size_t b) {
  lpa::BootstrapConfig c;
  c.draws = b;
  return c;
}

// 1 -------------------------------------------------------------------------
Verdict grid_reproduction() {
  const std::vector<std::size_t> expected{5, 6, 9, 12, 16, 22, 30, 40, 55, 74, 100, 135, 183, 247, 300};
  lpa::IntervalGrid grid;
  double best = 1e9;
  for (int rep = 0; rep < 5; ++rep) {
    const auto t0 = Clock::now();
    grid = lpa::build_grid(lpa::GridConfig{}, 300);
    best = std::min(best, seconds_since(t0));
  }
  const bool exact = grid.lengths == expected;
  return {exact && best < 1e-3, std::string(exact ? "exact match" : "MISMATCH") + ", " +
                                    fmt(best * 1e6, 3) + " us"};
}

// 2 -------------------------------------------------------------------------
Verdict scenario_a_regimes() {
  const auto series = lpa::generate(lpa::builtin_scenario("a"), 0);
  auto anchors = anchors_for_times(130, 180);
  const auto late = anchors_for_times(230, 300);
  anchors.insert(anchors.end(), late.begin(), late.end());
  const auto fits = lpa::fit_all_anchors(series, lpa::GridConfig{}, lpa::BootstrapConfig{}, anchors);
  std::size_t bad = 0;
  std::string first_bad;
  for (const auto& f : fits.fits) {
    const std::size_t t = f.anchor + 1;
    bool ok = true;
    if (t >= 230) {
      ok = f.window_length <= t - 200 && f.mle == 20.0;
    } else {
      ok = f.mle == 10.0;
    }
    if (!ok) {
      if (bad++ == 0) {
        first_bad = "t=" + std::to_string(t) + " window " + std::to_string(f.window_length) +
                    " mle " + fmt(f.mle, 10);
      }
    }
  }
  return {bad == 0 && fits.fits.size() == anchors.size(),
          std::to_string(fits.fits.size() - bad) + "/" + std::to_string(anchors.size()) +
              " anchors correct" + (bad ? "; first failure " + first_bad : "")};
}

// 3 -------------------------------------------------------------------------
Verdict scenario_b_accuracy_at(std::size_t draws, std::string& summary) {
  auto anchors = anchors_for_times(130, 180);
  const auto late = anchors_for_times(250, 300);
  anchors.insert(anchors.end(), late.begin(), late.end());
  const auto runs = lpa::simulate_runs(lpa::builtin_scenario("b"), 100, lpa::GridConfig{},
                                       with_draws(draws), {}, anchors);
  const auto trace = lpa::aggregate_runs(runs, lpa::Band{});
  double worst = 0.0;
  std::size_t worst_t = 0;
  for (const auto& p : trace.points) {
    const std::size_t t = p.anchor + 1;
    const double truth = t >= 250 ? 20.0 : 10.0;
    const double rel = std::abs(p.mle_mean - truth) / truth;
    if (rel > worst) {
      worst = rel;
      worst_t = t;
    }
  }
  summary = "B=" + std::to_string(draws) + " worst rel. error " + fmt(100.0 * worst, 3) + "% at t=" +
            std::to_string(worst_t);
  return {worst <= 0.10, summary};
}

Verdict scenario_b_accuracy() {
  std::string s1, s2;
  const bool full = scenario_b_accuracy_at(1000, s1).pass;
  const bool smoke = scenario_b_accuracy_at(200, s2).pass;
  return {full && smoke, s1 + "; " + s2};
}

// 4, 5 ----------------------------------------------------------------------
struct RunRate {
  double worst_anchor_rate = 1.0;  // min over anchors of the share of runs passing
  std::size_t worst_t = 0;
  double all_anchor_rate = 0.0;  // share of runs passing at every anchor
};

RunRate rate(const lpa::MonteCarloRuns& runs, const std::function<bool(std::size_t, std::size_t)>& ok) {
  RunRate r;
  r.worst_t = runs.anchors.front() + 1;
  const std::size_t n = runs.windows.size();
  std::vector<bool> run_ok(n, true);
  for (std::size_t i = 0; i < runs.anchors.size(); ++i) {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const bool good = ok(runs.anchors[i] + 1, runs.windows[k][i]);
      hits += good;
      run_ok[k] = run_ok[k] && good;
    }
    const double share = static_cast<double>(hits) / static_cast<double>(n);
    if (share < r.worst_anchor_rate) {
      r.worst_anchor_rate = share;
      r.worst_t = runs.anchors[i] + 1;
    }
  }
  r.all_anchor_rate =
      static_cast<double>(std::count(run_ok.begin(), run_ok.end(), true)) / static_cast<double>(n);
  return r;
}

std::string describe(const RunRate& r) {
  return "min per-anchor share " + fmt(100.0 * r.worst_anchor_rate, 3) + "% (t=" +
         std::to_string(r.worst_t) + "); runs passing at every anchor " +
         fmt(100.0 * r.all_anchor_rate, 3) + "%";
}

Verdict scenario_c_shock() {
  const auto runs = lpa::simulate_runs(lpa::builtin_scenario("c"), 100, lpa::GridConfig{},
                                       lpa::BootstrapConfig{}, {}, anchors_for_times(201, 215));
  const auto r = rate(runs, [](std::size_t, std::size_t w) { return w <= 16; });
  return {r.worst_anchor_rate >= 0.90, describe(r)};
}

Verdict scenario_f_exponential() {
  const auto runs = lpa::simulate_runs(lpa::builtin_scenario("f"), 100, lpa::GridConfig{},
                                       lpa::BootstrapConfig{}, {}, anchors_for_times(230, 300));
  const auto r = rate(runs, [](std::size_t t, std::size_t w) { return w <= t - 200; });
  return {r.worst_anchor_rate >= 0.90, describe(r)};
}

// 6 -------------------------------------------------------------------------
Verdict bootstrap_size() {
  const lpa::ScenarioSpec iid{"iid", lpa::Family::poisson, {{60, 5.0}}};
  const std::size_t series_count = 200;
  std::vector<int> rejected(series_count, 0);
  lpa::parallel_for(series_count, lpa::Execution{}, [&](std::size_t r) {
    const auto s = lpa::generate(iid, lpa::run_data_seed(7, r));
    const lpa::Interval whole{0, 59};
    const auto cand = lpa::interior_candidates(whole);
    auto cfg = lpa::BootstrapConfig{};
    cfg.seed = lpa::run_bootstrap_seed(7, r);
    const double t = lpa::sup_lr(s, whole, cand).best.statistic;
    rejected[r] = t > lpa::critical_threshold(s, whole, cand, cfg).threshold;
  });
  const double freq = static_cast<double>(std::count(rejected.begin(), rejected.end(), 1)) /
                      static_cast<double>(series_count);
  return {freq >= 0.02 && freq <= 0.10, "rejection frequency " + fmt(freq, 3)};
}

// 7 -------------------------------------------------------------------------
Verdict oracle_equivalence() {
  std::mt19937_64 eng(2024);
  std::size_t sup_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + eng() % 19;
    const auto v = oracle::random_counts(eng, n, 1 + static_cast<std::int64_t>(eng() % 30));
    const lpa::CountSeries s(v);
    const lpa::Interval whole{0, n - 1};
    const auto r = lpa::sup_lr(s, whole, lpa::interior_candidates(whole));
    const auto brute = oracle::brute_force_sup(v, 0, n - 1);
    sup_ok += r.best.statistic == brute.value && r.best.tau == brute.tau;
  }
  std::size_t pen_ok = 0;
  double worst = 0.0;
  lpa::BootstrapConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + eng() % 17;
    const std::size_t tau = eng() % (n - 1);
    const lpa::CountSeries s(oracle::random_counts(eng, n, 1 + static_cast<std::int64_t>(eng() % 25)));
    const lpa::Interval a{0, tau}, b{tau + 1, n - 1};
    const auto w = lpa::draw_weights(cfg, n, static_cast<std::uint64_t>(trial));
    const auto wa = lpa::weighted_sums(s, a, std::span(w).subspan(0, a.length()));
    const auto wb = lpa::weighted_sums(s, b, std::span(w).subspan(a.length(), b.length()));
    const double delta = lpa::poisson_mle(s, b) - lpa::poisson_mle(s, a);
    const double closed = lpa::penalized_sup(wa, wb, delta);
    const double grid = oracle::penalized_grid(wa.sum, wa.weight, wb.sum, wb.weight, delta);
    const double rel = std::abs(closed - grid) / std::max(1.0, std::abs(grid));
    worst = std::max(worst, rel);
    pen_ok += rel <= 1e-8;
  }
  return {sup_ok == 100 && pen_ok == 100, "sup_lr bit-exact " + std::to_string(sup_ok) +
                                              "/100; penalized_sup " + std::to_string(pen_ok) +
                                              "/100, worst rel. diff " + fmt(worst, 3)};
}

// 8 -------------------------------------------------------------------------
Verdict algebraic_identities() {
  std::mt19937_64 eng(99);
  lpa::BootstrapConfig cfg;
  std::size_t failures = 0;
  double worst_unit = 0.0;
  const std::size_t cases = 10000;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = 2 + eng() % 39;
    const lpa::CountSeries s(oracle::random_counts(eng, n, static_cast<std::int64_t>(eng() % 40)));
    const lpa::Interval whole{0, n - 1};
    const auto cand = lpa::interior_candidates(whole);
    for (std::size_t tau : cand) {
      failures += lpa::lr_split_statistic(s, whole, tau).statistic < 0.0;
    }
    const double unit = lpa::bootstrap_statistic(s, whole, cand, std::vector<double>(n, 1.0));
    worst_unit = std::max(worst_unit, unit);
    failures += unit < 0.0 || unit > 1e-10;
    failures += lpa::bootstrap_statistic(s, whole, cand, lpa::draw_weights(cfg, n, c)) < 0.0;
    if (c % 100 == 0) {
      const lpa::CountSeries flat(std::vector<std::int64_t>(n, static_cast<std::int64_t>(eng() % 20)));
      auto small = cfg;
      small.draws = 50;
      small.seed = c;
      const auto th = lpa::critical_threshold(flat, whole, cand, small);
      failures += th.threshold < 0.0 || th.threshold > 1e-10;
    }
  }
  return {failures == 0, std::to_string(cases) + " cases, " + std::to_string(failures) +
                             " violations, max unit-weight statistic " + fmt(worst_unit, 3)};
}

// 9 -------------------------------------------------------------------------
std::string informational_split(const lpa::CountSeries& s, std::size_t split) {
  const auto r = lpa::evaluate(s, split, 10, lpa::GridConfig{}, lpa::BootstrapConfig{});
  return "split " + std::to_string(split) + ": lpa " + fmt(r.find("lpa")->mse) + ", fixed(36) " +
         fmt(r.find("fixed(36)")->mse);
}

Verdict forecast_harness() {
  const auto s = lpa::generate(lpa::builtin_scenario("a"), 0);
  const auto r = lpa::evaluate(s, 290, 10, lpa::GridConfig{}, lpa::BootstrapConfig{});
  const double lpa_mse = r.find("lpa")->mse;
  const double fixed_mse = r.find("fixed(36)")->mse;
  return {lpa_mse == 0.0 && fixed_mse > 0.0,
          "split 290: lpa MSE " + fmt(lpa_mse) + ", fixed(36) MSE " + fmt(fixed_mse) +
              " [info, " + informational_split(s, 220) + "]"};
}

// 10 ------------------------------------------------------------------------
int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lpa");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out, err;
  return lpa::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  const auto dir = fs::temp_directory_path() / "lpa_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "b.csv");
    lpa::write_series(csv, lpa::generate(lpa::builtin_scenario("b"), 11));
  }
  const std::string input = (dir / "b.csv").string();
  const std::vector<std::vector<std::string>> commands{
      {"fit", "--input", input, "--draws", "200"},
      {"simulate", "--scenario", "e", "--runs", "6", "--draws", "100"},
      {"forecast", "--input", input, "--horizon", "3", "--windows", "24"},
      {"evaluate", "--input", input, "--split", "-5", "--horizon", "5", "--draws", "200"},
  };
  std::size_t identical = 0, total = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    for (const char* ext : {".csv", ".json"}) {
      std::vector<std::string> outputs;
      for (const char* threads : {"1", "4", "1"}) {
        auto args = commands[c];
        const auto path = dir / ("out" + std::to_string(c) + "_" + threads + "_" +
                                 std::to_string(outputs.size()) + ext);
        args.insert(args.end(), {"--threads", threads, "--output", path.string()});
        if (cli(args) != 0) {
          outputs.push_back("<failed>");
          continue;
        }
        std::string bytes = slurp(path);
        if (std::string(ext) == ".csv") {
          std::string meta = slurp(path.string() + ".meta.json");
          // The output path is part of the recorded configuration.
          const std::string name = path.string();
          for (auto pos = meta.find(name); pos != std::string::npos; pos = meta.find(name)) {
            meta.replace(pos, name.size(), "<out>");
          }
          bytes += meta;
        } else {
          const std::string name = path.string();
          for (auto pos = bytes.find(name); pos != std::string::npos; pos = bytes.find(name)) {
            bytes.replace(pos, name.size(), "<out>");
          }
        }
        outputs.push_back(bytes);
      }
      ++total;
      identical += outputs[0] != "<failed>" && outputs[0] == outputs[1] && outputs[0] == outputs[2];
    }
  }
  fs::remove_all(dir);
  return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                  " command/format pairs byte-identical across threads 1,4,1"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {"grid reproduction", grid_reproduction},
      {"scenario (a) regime detection", scenario_a_regimes},
      {"scenario (b) estimation accuracy", scenario_b_accuracy},
      {"scenario (c) shock detection", scenario_c_shock},
      {"scenario (f) exponential robustness", scenario_f_exponential},
      {"bootstrap size", bootstrap_size},
      {"oracle equivalence", oracle_equivalence},
      {"algebraic identities", algebraic_identities},
      {"forecast harness", forecast_harness},
      {"determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << index << ". " << c.name << " -- " << v.detail
              << " (" << fmt(seconds_since(t0), 3) << " s)" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
