// Acceptance suite: one criterion per argument (A1..A9), each printing a
// single PASS/FAIL line with the measured quantities. No arguments runs all.

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include "gpx/berman.hpp"
#include "gpx/correlation.hpp"
#include "gpx/extremes.hpp"
#include "gpx/gaussim.hpp"
#include "gpx/lil.hpp"
#include "gpx/orderstats.hpp"
#include "gpx/parallel.hpp"

namespace ext = gpx::extremes;
namespace sim = gpx::gaussim;
using gpx::GridSpec;
using gpx::correlation::CorrelationModel;

namespace {

const unsigned kThreads = gpx::default_threads();

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// Ladder at mesh theta and theta/2; the halving must move every rung by no
// more than twice its standard error, and the finer ladder feeds the fit.
struct StableLadder {
  std::vector<ext::PickandsEstimate> ladder;
  bool stable = true;
  double worst_shift = 0.0;  // |delta| / (2 se)
};

StableLadder stable_ladder(double alpha, int k, double theta, long replicates,
                           std::uint64_t seed) {
  ext::PickandsConfig cfg;
  cfg.alpha = alpha;
  cfg.k = k;
  cfg.horizons = {8.0, 16.0, 32.0};
  cfg.theta = theta;
  cfg.replicates = replicates;
  cfg.seed = seed;
  cfg.threads = kThreads;
  const auto coarse = ext::pickands_ladder(cfg);
  cfg.theta = 0.5 * theta;
  const auto fine = ext::pickands_ladder(cfg);
  StableLadder out;
  out.ladder = fine;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const double se =
        std::hypot(coarse[i].ci_half_width, fine[i].ci_half_width) / 1.96;
    const double shift = std::abs(coarse[i].value - fine[i].value) / (2.0 * se);
    out.worst_shift = std::max(out.worst_shift, shift);
    if (shift > 1.0) out.stable = false;
  }
  return out;
}

Outcome pickands_criterion(double alpha, double target, double theta,
                           long replicates, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const auto run = stable_ladder(alpha, 1, theta, replicates, seed);
  const auto fit = ext::pickands_extrapolate(run.ladder);
  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() /
      60.0;
  Outcome out;
  out.pass = run.stable && std::abs(fit.intercept - target) <= 0.05 && minutes <= 15.0;
  out.detail = fmt(
      "alpha=%.0f k=1 T={8,16,32} theta=%g/%g reps=%ld: intercept %.4f "
      "(target %.4f +/- 0.05, ci %.4f), halving shift %.2fx2se, %.1f min",
      alpha, theta, 0.5 * theta, replicates, fit.intercept, target, fit.intercept_ci,
      run.worst_shift, minutes);
  return out;
}

Outcome a1() { return pickands_criterion(1.0, 1.0, 0.025, 120000, 101); }

Outcome a2() {
  return pickands_criterion(2.0, 1.0 / std::sqrt(std::numbers::pi), 0.025, 120000,
                            102);
}

Outcome a3() {
  const auto model = CorrelationModel::powered_exponential(1.0, 2.0, 1.0);
  double theta = 0.1;
  ext::TailEstimate est;
  for (int halving = 0; halving < 3; ++halving) {
    est = gpx::orderstats::empirical_tail(model, 1, 1, 3.0, theta, 2000000, 103,
                                          kThreads);
    if (est.mesh_stable) break;
    theta *= 0.5;
  }
  const double reference = 0.002285;
  const double ratio = est.p_hat / reference;
  Outcome out;
  out.pass = est.mesh_stable && ratio >= 0.85 && ratio <= 1.15;
  out.detail = fmt(
      "alpha=2 C=1 n=1 r=1 u=3 reps=2e6 theta=%g: p_hat %.6g (se %.2g), "
      "p/0.002285 = %.3f (need [0.85, 1.15]), mesh_stable=%d",
      theta, est.p_hat, est.se, ratio, est.mesh_stable ? 1 : 0);
  return out;
}

Outcome a4() {
  // own extrapolated estimate of the two-copy constant
  const auto run = stable_ladder(2.0, 2, 0.025, 20000, 104);
  const auto fit = ext::pickands_extrapolate(run.ladder);
  const auto model = CorrelationModel::powered_exponential(1.0, 2.0, 1.0);
  const auto est = gpx::orderstats::empirical_tail(model, 2, 1, 2.5, 0.1, 2000000,
                                                   105, kThreads, fit.intercept);
  Outcome out;
  out.pass = est.ratio >= 0.7 && est.ratio <= 1.3 && run.stable;
  out.detail = fmt(
      "H_hat_{2,2} = %.4f (ci %.4f); n=2 r=1 u=2.5: p_hat %.6g, "
      "p/asymptotic = %.3f (need [0.7, 1.3])",
      fit.intercept, fit.intercept_ci, est.p_hat, est.ratio);
  return out;
}

Outcome a5() {
  const double expected_p[] = {-1.0, -0.1, 0.0, 0.5, 2.0};
  const bool expected_one[] = {false, false, true, true, true};
  bool verdicts_ok = true;
  for (int i = 0; i < 5; ++i) {
    gpx::lil::ThresholdFamily fam(expected_p[i], 1, 1, 2.0, 1.0);
    const bool one = gpx::lil::classify_dichotomy(fam) == gpx::lil::Dichotomy::kOne;
    if (one != expected_one[i]) verdicts_ok = false;
  }
  const auto integral =
      gpx::lil::integral_If(gpx::lil::TailModel::canonical(1.0, 2.0), 2.0, 1e6);
  const double target = 1.0 / std::log(2.0);
  const bool integral_ok = integral.verdict == gpx::lil::IfReport::Verdict::kFinite &&
                           std::abs(integral.value - target) <= 1e-6;
  Outcome out;
  out.pass = verdicts_ok && integral_ok;
  out.detail = fmt(
      "verdicts over p={-1,-0.1,0,0.5,2} %s; integral of 1/(u log^2 u) from 2 = "
      "%.9f (target %.9f +/- 1e-6)",
      verdicts_ok ? "correct" : "WRONG", integral.value, target);
  return out;
}

Outcome a6() {
  gpx::lil::LilConfig cfg;
  cfg.model = CorrelationModel::powered_exponential(1.0, 2.0, 1.0);
  cfg.n = 1;
  cfg.r = 1;
  cfg.p = 1.0;
  cfg.horizon = 1e4;
  cfg.scan_start = std::exp(1.0);
  cfg.theta = 0.1;
  cfg.runs = 50;
  cfg.seed = 106;
  cfg.threads = kThreads;
  const auto rep = gpx::lil::lil_experiment(cfg);
  long in_band = 0;
  for (const auto& run : rep.per_run) {
    if (run.normalized_running_max >= 0.75 && run.normalized_running_max <= 1.15)
      ++in_band;
  }
  const double frac = static_cast<double>(in_band) / static_cast<double>(cfg.runs);
  Outcome out;
  out.pass = frac >= 0.90;
  out.detail = fmt(
      "T=1e4, 50 runs: sup X/sqrt(2 log t) in [0.75, 1.15] for %ld/50 runs "
      "(%.0f%%, need >= 90%%); mean %.3f, q05 %.3f, q95 %.3f",
      in_band, 100.0 * frac, rep.mean_normalized_max, rep.q05_normalized_max,
      rep.q95_normalized_max);
  return out;
}

Outcome a7() {
  // K_c = 1/(2 pi) configuration: C = 1/2, H = 1/sqrt(pi)
  gpx::lil::LilConfig cfg;
  cfg.model = CorrelationModel::powered_exponential(0.5, 2.0, 1.0);
  cfg.n = 1;
  cfg.r = 1;
  cfg.p = 1.0;
  cfg.horizon = 1e4;
  cfg.scan_start = std::exp(1.0);
  cfg.theta = 0.1;
  cfg.runs = 200;
  cfg.seed = 107;
  cfg.threads = kThreads;
  const auto rep = gpx::lil::lil_experiment(cfg);
  const double kc = 1.0 / (2.0 * std::numbers::pi);
  const double prediction = kc * std::log(1e4);  // ~1.47
  const double ratio = rep.mean_crossing_windows / prediction;
  Outcome out;
  out.pass = ratio >= 1.0 / 3.0 && ratio <= 3.0;
  std::string gaps = "h_p gap law out of desk-scale reach (diagnostic only";
  if (rep.hp_at_horizon)
    gaps += fmt(": h_p(T) = %.3g vs T = 1e4", *rep.hp_at_horizon);
  gaps += ")";
  out.detail = fmt(
      "C=1/2 p=1, 200 runs on [e, 1e4]: mean crossing windows %.3f vs K_c log T "
      "= %.3f, ratio %.2f (need [1/3, 3]); %s",
      rep.mean_crossing_windows, prediction, ratio, gaps.c_str());
  return out;
}

Outcome a8() {
  // identical covariance structures first
  auto identical = gpx::berman::random_instance(3, 2, 1, 555, 0);
  identical.sigma1 = identical.sigma0;
  const auto clean = gpx::berman::check_instance(identical);
  const bool identical_ok = std::abs(clean.lhs_diff) <= 1e-10;

  // one mixed pool of 300 instances (d cycling over {2,3,4}, classes cycling
  // over (n,r) in {(1,1),(2,1),(2,2)}): the first 200 calibrate a per-class
  // C_hat, the last 100 are held out
  const std::uint64_t seed = 118;
  struct Class {
    int n, r;
  };
  const Class classes[3] = {{1, 1}, {2, 1}, {2, 2}};
  std::vector<std::optional<double>> ratios(300);
  std::vector<int> cls_of(300);
  gpx::parallel_for(300, kThreads, [&](std::int64_t i) {
    const Class cls = classes[i % 3];
    const int d = 2 + static_cast<int>((i / 3) % 3);
    cls_of[static_cast<std::size_t>(i)] = static_cast<int>(i % 3);
    const auto inst = gpx::berman::random_instance(d, cls.n, cls.r, seed,
                                                   static_cast<std::uint64_t>(i));
    ratios[static_cast<std::size_t>(i)] = gpx::berman::check_instance(inst).ratio;
  });
  double c_hat[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < 200; ++i)
    if (ratios[static_cast<std::size_t>(i)])
      c_hat[cls_of[static_cast<std::size_t>(i)]] =
          std::max(c_hat[cls_of[static_cast<std::size_t>(i)]],
                   *ratios[static_cast<std::size_t>(i)]);
  long violations = 0;
  double worst_excess = 0.0;
  for (int i = 200; i < 300; ++i) {
    if (!ratios[static_cast<std::size_t>(i)]) continue;
    const double r = *ratios[static_cast<std::size_t>(i)];
    const double limit = c_hat[cls_of[static_cast<std::size_t>(i)]];
    if (r > limit) {
      ++violations;
      worst_excess = std::max(worst_excess, r / std::max(limit, 1e-300));
    }
  }
  Outcome out;
  out.pass = identical_ok && violations == 0;
  out.detail = fmt(
      "identical-covariance |lhs| = %.1e; 200 calibration + 100 held-out (d <= 4, "
      "n <= 2): C_hat(1,1)=%.3g C_hat(2,1)=%.3g C_hat(2,2)=%.3g, held-out "
      "violations %ld%s",
      clean.lhs_diff, c_hat[0], c_hat[1], c_hat[2], violations,
      violations > 0 ? fmt(" (worst excess x%.2f)", worst_excess).c_str() : "");
  return out;
}

Outcome a9() {
  const auto model = CorrelationModel::powered_exponential(1.0, 1.0, 1.0);
  const GridSpec grid(0.0, 1.75, 0.25);  // 8 points
  const long n_pts = grid.count();
  const auto sw = sim::circulant_embed(model, grid);

  // entrywise sample covariance over 1e6 replicates vs the target
  const long reps = 1000000;
  const int blocks = 64;
  std::vector<Eigen::MatrixXd> partial(blocks, Eigen::MatrixXd::Zero(n_pts, n_pts));
  gpx::parallel_for(blocks, kThreads, [&](std::int64_t b) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n_pts, n_pts);
    Eigen::MatrixXd path;
    const long lo = b * reps / blocks, hi = (b + 1) * reps / blocks;
    for (long rep = lo; rep < hi; ++rep) {
      sim::sample_ensemble_rows(sw, n_pts, 1, 109, rep, 0, path);
      acc.noalias() += path.row(0).transpose() * path.row(0);
    }
    partial[static_cast<std::size_t>(b)] = acc;
  });
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n_pts, n_pts);
  for (const auto& acc : partial) cov += acc;
  cov /= static_cast<double>(reps);
  double worst_z = 0.0;
  for (long i = 0; i < n_pts; ++i)
    for (long j = 0; j < n_pts; ++j) {
      const double target = model.evaluate(grid.mesh * static_cast<double>(i - j));
      const double se = std::sqrt((1.0 + target * target) / static_cast<double>(reps));
      worst_z = std::max(worst_z, std::abs(cov(i, j) - target) / se);
    }
  const bool cov_ok = worst_z <= 4.0;

  // fBm self-similarity
  const double alpha = 1.4;
  const GridSpec fgrid(0.0, 2.0, 0.05);
  const long freps = 100000;
  const sim::FgnEngine engine(alpha, fgrid.count() - 1, fgrid.mesh);
  const long idx[3] = {10, 20, 40};  // t = 0.5, 1, 2
  Eigen::MatrixXd squares(freps, 3);  // per-replicate slots, summed serially
  gpx::parallel_for(freps, kThreads, [&](std::int64_t rep) {
    Eigen::VectorXd inc;
    engine.sample(110, static_cast<std::uint64_t>(rep), 0, inc);
    double b = 0.0;
    long next = 0;
    for (long m = 1; m <= engine.steps() && next < 3; ++m) {
      b += inc[m - 1];
      if (m == idx[next]) squares(rep, next++) = b * b;
    }
  });
  bool fbm_ok = true;
  std::string fbm_detail;
  for (int i = 0; i < 3; ++i) {
    const double t = fgrid.mesh * static_cast<double>(idx[i]);
    const double ratio = squares.col(i).mean() / std::pow(t, alpha);
    fbm_ok = fbm_ok && ratio >= 0.95 && ratio <= 1.05;
    fbm_detail += fmt("Var(B(%g))/t^a=%.3f ", t, ratio);
  }

  // worker-count determinism
  const auto one = sim::sample_stationary(model, grid, 6, 111, 1);
  const auto eight = sim::sample_stationary(model, grid, 6, 111, 8);
  const bool det_ens = (one.values.array() == eight.values.array()).all();
  const auto p1 = ext::pickands_estimate(1.0, 1, 4.0, 0.1, 2000, 112, 1);
  const auto p8 = ext::pickands_estimate(1.0, 1, 4.0, 0.1, 2000, 112, 8);
  const bool det_pick = p1.value == p8.value;

  Outcome out;
  out.pass = cov_ok && fbm_ok && det_ens && det_pick;
  out.detail = fmt(
      "N=8 covariance worst |z| = %.2f (need <= 4); fBm alpha=1.4: %s(need "
      "[0.95, 1.05]); 1-vs-8-thread ensembles %s, estimates %s",
      worst_z, fbm_detail.c_str(), det_ens ? "bit-identical" : "DIFFER",
      det_pick ? "identical" : "DIFFER");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* id;
    Outcome (*run)();
  };
  const Criterion all[] = {{"A1", a1}, {"A2", a2}, {"A3", a3},
                           {"A4", a4}, {"A5", a5}, {"A6", a6},
                           {"A7", a7}, {"A8", a8}, {"A9", a9}};
  std::vector<const Criterion*> selected;
  if (argc <= 1) {
    for (const auto& c : all) selected.push_back(&c);
  } else {
    for (int i = 1; i < argc; ++i) {
      bool found = false;
      for (const auto& c : all)
        if (std::strcmp(argv[i], c.id) == 0) {
          selected.push_back(&c);
          found = true;
        }
      if (!found) {
        std::fprintf(stderr, "unknown criterion %s (expect A1..A9)\n", argv[i]);
        return 2;
      }
    }
  }
  bool all_pass = true;
  for (const auto* c : selected) {
    Outcome outcome;
    try {
      outcome = c->run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s  %s\n", c->id, outcome.pass ? "PASS" : "FAIL",
                outcome.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
