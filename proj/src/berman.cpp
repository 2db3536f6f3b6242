#include "gpx/berman.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "gpx/extremes.hpp"
#include "gpx/mvn.hpp"
#include "gpx/parallel.hpp"
#include "gpx/quadrature.hpp"
#include "gpx/rng.hpp"

namespace gpx::berman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_correlation(const Eigen::MatrixXd& s, const std::string& name) {
  const Eigen::Index d = s.rows();
  if (s.cols() != d) throw std::invalid_argument(name + " must be square");
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(s(i, i) - 1.0) > 1e-10)
      throw std::invalid_argument(name + " must have unit diagonal");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(s(i, j) - s(j, i)) > 1e-10)
        throw std::invalid_argument(name + " must be symmetric");
      if (std::abs(s(i, j)) >= 1.0)
        throw std::invalid_argument(name + ": off-diagonal entries must have |.| < 1");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument(name + " is not positive semidefinite");
}

const Eigen::MatrixXd& pick(const ComparisonInstance& inst, int which) {
  if (which != 0 && which != 1)
    throw std::invalid_argument("orderstat_orthant: which must be 0 or 1");
  return which == 0 ? inst.sigma0 : inst.sigma1;
}

// Exact mode: expand over per-copy exceedance patterns S (coordinates where a
// copy exceeds its threshold). Copies are i.i.d., so the event probability is
//   sum over admissible (S_1..S_n) of prod_l q(S_l),
// with q(S) a Gaussian rectangle probability and admissibility the per-
// coordinate exceedance counts staying <= n - r.
double exact_orthant(const ComparisonInstance& inst, const Eigen::MatrixXd& sigma,
                     double tol) {
  const int d = inst.d;
  const unsigned patterns = 1u << d;
  const double rect_tol = tol / static_cast<double>(patterns);
  std::vector<double> q(patterns);
  Eigen::VectorXd lower(d), upper(d);
  for (unsigned s = 0; s < patterns; ++s) {
    for (int i = 0; i < d; ++i) {
      const bool exceed = (s >> i) & 1u;
      lower[i] = exceed ? inst.u[i] : -kInf;
      upper[i] = exceed ? kInf : inst.u[i];
    }
    q[s] = mvn::rectangle_probability(sigma, lower, upper, rect_tol);
  }
  const int max_exceed = inst.n - inst.r;
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  double total = 0.0;
  // depth-first over copy patterns with per-coordinate count pruning
  auto recurse = [&](auto&& self, int copy, double weight) -> void {
    if (copy == inst.n) {
      total += weight;
      return;
    }
    for (unsigned s = 0; s < patterns; ++s) {
      if (q[s] == 0.0) continue;
      bool ok = true;
      for (int i = 0; i < d && ok; ++i)
        if (((s >> i) & 1u) && counts[static_cast<std::size_t>(i)] + 1 > max_exceed)
          ok = false;
      if (!ok) continue;
      for (int i = 0; i < d; ++i)
        counts[static_cast<std::size_t>(i)] += (s >> i) & 1u;
      self(self, copy + 1, weight * q[s]);
      for (int i = 0; i < d; ++i)
        counts[static_cast<std::size_t>(i)] -= (s >> i) & 1u;
    }
  };
  recurse(recurse, 0, 1.0);
  return total;
}

// Rank-1 lattice with random shifts; deterministic for fixed seed.
double qmc_orthant(const ComparisonInstance& inst, const Eigen::MatrixXd& sigma,
                   long points, int shifts, std::uint64_t seed, double* spread) {
  const int d = inst.d;
  Eigen::LLT<Eigen::MatrixXd> llt(sigma +
                                  1e-12 * Eigen::MatrixXd::Identity(d, d));
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("orderstat_orthant: covariance factorization failed");
  const Eigen::MatrixXd chol = llt.matrixL();
  static const double primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                  31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  const int dims = d * inst.n;
  if (dims > 20) throw std::invalid_argument("orderstat_orthant: instance too large");
  std::vector<double> alpha(static_cast<std::size_t>(dims));
  for (int j = 0; j < dims; ++j) {
    double a = std::sqrt(primes[j]);
    alpha[static_cast<std::size_t>(j)] = a - std::floor(a);
  }
  const int max_exceed = inst.n - inst.r;
  std::vector<double> estimates;
  Eigen::VectorXd z(d), x(d);
  for (int sh = 0; sh < shifts; ++sh) {
    rng::CounterRng gen(seed, static_cast<std::uint64_t>(sh), 0xBEu);
    std::vector<double> shift(static_cast<std::size_t>(dims));
    for (double& v : shift) v = gen.uniform();
    long hits = 0;
    for (long s = 0; s < points; ++s) {
      bool admissible = true;
      std::array<int, 32> counts{};
      for (int copy = 0; copy < inst.n && admissible; ++copy) {
        for (int i = 0; i < d; ++i) {
          const int j = copy * d + i;
          double v = alpha[static_cast<std::size_t>(j)] * static_cast<double>(s + 1) +
                     shift[static_cast<std::size_t>(j)];
          v -= std::floor(v);
          v = std::min(std::max(v, 1e-15), 1.0 - 1e-15);
          z[i] = rng::normal_quantile(v);
        }
        x.noalias() = chol * z;
        for (int i = 0; i < d && admissible; ++i)
          if (x[i] > inst.u[i] && ++counts[static_cast<std::size_t>(i)] > max_exceed)
            admissible = false;
      }
      hits += admissible;
    }
    estimates.push_back(static_cast<double>(hits) / static_cast<double>(points));
  }
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= static_cast<double>(estimates.size());
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= std::max<std::size_t>(estimates.size() - 1, 1);
  if (spread) *spread = 3.0 * std::sqrt(var / static_cast<double>(estimates.size()));
  return mean;
}

}  // namespace

void validate(const ComparisonInstance& inst) {
  if (inst.d < 1) throw std::invalid_argument("instance: d must be >= 1");
  if (inst.n < 1 || inst.r < 1 || inst.r > inst.n)
    throw std::invalid_argument("instance: need 1 <= r <= n");
  if (inst.u.size() != inst.d)
    throw std::invalid_argument("instance: threshold count must equal d");
  if ((inst.u.array() <= 0.0).any())
    throw std::invalid_argument("instance: thresholds must be positive");
  if (inst.sigma0.rows() != inst.d || inst.sigma1.rows() != inst.d)
    throw std::invalid_argument("instance: covariance dimension must equal d");
  check_correlation(inst.sigma0, "sigma0");
  check_correlation(inst.sigma1, "sigma1");
}

OrthantResult orderstat_orthant(const ComparisonInstance& inst, int which,
                                OrthantMode mode, double tol, long qmc_points,
                                int qmc_shifts, std::uint64_t qmc_seed) {
  validate(inst);
  const Eigen::MatrixXd& sigma = pick(inst, which);
  const bool small = inst.d * inst.n <= 7;
  if (mode == OrthantMode::kExact && !small)
    throw std::invalid_argument("orderstat_orthant: exact mode requires d * n <= 7");
  OrthantResult res;
  if (mode == OrthantMode::kExact || (mode == OrthantMode::kAuto && small)) {
    res.probability = exact_orthant(inst, sigma, tol);
    res.error = tol;
    res.exact = true;
  } else {
    res.probability =
        qmc_orthant(inst, sigma, qmc_points, qmc_shifts, qmc_seed, &res.error);
    res.exact = false;
  }
  return res;
}

double a_integral(double sigma0, double sigma1, int n, int r, AExponent exponent) {
  if (std::abs(sigma0) >= 1.0 || std::abs(sigma1) >= 1.0)
    throw std::domain_error("a_integral: correlations must satisfy |sigma| < 1");
  if (sigma0 == sigma1) return 0.0;
  const double rhat = static_cast<double>(n - r + 1);
  const double e =
      exponent == AExponent::kStatement ? 0.5 * (n - r) : 2.0 * (n - r);
  // substitution h = sin(psi) tames the (1 - h^2)^(-rhat/2) endpoint growth
  auto integrand = [e, rhat](double psi) {
    const double h = std::sin(psi);
    const double c = std::cos(psi);
    return std::pow(1.0 + std::abs(h), e) * std::pow(c, 1.0 - rhat);
  };
  const double lo = std::asin(sigma0), hi = std::asin(sigma1);
  if (lo <= hi) return quadrature::integrate(integrand, lo, hi, 1e-12);
  return -quadrature::integrate(integrand, hi, lo, 1e-12);
}

double berman_bound(const ComparisonInstance& inst, AExponent exponent) {
  validate(inst);
  const double rhat = static_cast<double>(inst.rhat());
  const double nr = static_cast<double>(inst.n - inst.r);
  double bound = 0.0;
  for (int i = 0; i < inst.d; ++i)
    for (int j = i + 1; j < inst.d; ++j) {
      const double a = a_integral(inst.sigma0(i, j), inst.sigma1(i, j), inst.n,
                                  inst.r, exponent);
      if (a <= 0.0) continue;
      const double rho = std::max(std::abs(inst.sigma0(i, j)), std::abs(inst.sigma1(i, j)));
      const double ui = inst.u[i], uj = inst.u[j];
      bound += std::pow(ui + uj, -nr) * a *
               std::exp(-rhat * (ui * ui + uj * uj) / (2.0 * (1.0 + rho)));
    }
  return bound;
}

CheckReport check_instance(const ComparisonInstance& inst, AExponent exponent,
                           OrthantMode mode) {
  CheckReport rep;
  rep.p0 = orderstat_orthant(inst, 0, mode).probability;
  rep.p1 = orderstat_orthant(inst, 1, mode).probability;
  rep.lhs_diff = rep.p0 - rep.p1;
  rep.bound = berman_bound(inst, exponent);
  if (rep.bound > 0.0) {
    rep.ratio = std::max(rep.lhs_diff, 0.0) / rep.bound;
    return rep;
  }
  if (rep.lhs_diff <= 1e-10) return rep;  // clean zero-vs-zero
  bool one_sided = false;  // some pair has a strictly negative comparison integral
  for (int i = 0; i < inst.d && !one_sided; ++i)
    for (int j = i + 1; j < inst.d; ++j)
      if (a_integral(inst.sigma0(i, j), inst.sigma1(i, j), inst.n, inst.r, exponent) <
          0.0) {
        one_sided = true;
        break;
      }
  if (one_sided)
    rep.bound_zero_no_control = true;  // the inequality is silent here
  else if (rep.lhs_diff > 1e-8)
    rep.violation = true;  // identical structures must have equal orthants
  return rep;
}

ComparisonInstance random_instance(int d, int n, int r, std::uint64_t seed,
                                   std::uint64_t index) {
  if (d < 2) throw std::invalid_argument("random_instance: d must be >= 2");
  rng::CounterRng gen(seed, index, 0xCAu);
  auto correlation = [&]() {
    Eigen::MatrixXd w(d, d + 2);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d + 2; ++j) w(i, j) = gen.normal();
    Eigen::MatrixXd s = w * w.transpose();
    Eigen::VectorXd inv_sd = s.diagonal().array().sqrt().inverse();
    s = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
    double max_off = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < i; ++j) max_off = std::max(max_off, std::abs(s(i, j)));
    if (max_off > 0.9) {
      const double shrink = 0.9 / max_off;
      s = shrink * s + (1.0 - shrink) * Eigen::MatrixXd::Identity(d, d);
    }
    s.diagonal().setOnes();
    return s;
  };
  ComparisonInstance inst;
  inst.d = d;
  inst.n = n;
  inst.r = r;
  inst.sigma0 = correlation();
  inst.sigma1 = correlation();
  inst.u.resize(d);
  for (int i = 0; i < d; ++i) inst.u[i] = 0.5 + 2.5 * gen.uniform();
  return inst;
}

CalibrationResult calibrate_constant(int d_max, int n, int r, int count,
                                     std::uint64_t seed, unsigned threads) {
  if (d_max < 2) throw std::invalid_argument("calibrate_constant: d_max must be >= 2");
  CalibrationResult result;
  result.n = n;
  result.r = r;
  result.entries.resize(static_cast<std::size_t>(count));
  parallel_for(count, threads, [&](std::int64_t i) {
    const int d = 2 + static_cast<int>(i % (d_max - 1));
    BatchEntry entry;
    entry.instance_id = i;
    entry.instance = random_instance(d, n, r, seed, static_cast<std::uint64_t>(i));
    entry.report = check_instance(entry.instance);
    result.entries[static_cast<std::size_t>(i)] = std::move(entry);
  });
  for (const auto& e : result.entries)
    if (e.report.ratio) result.c_hat = std::max(result.c_hat, *e.report.ratio);
  return result;
}

std::vector<long> holdout_violations(const CalibrationResult& fit, int d_max,
                                     int count, std::uint64_t seed,
                                     unsigned threads) {
  std::vector<std::optional<double>> ratios(static_cast<std::size_t>(count));
  parallel_for(count, threads, [&](std::int64_t i) {
    const int d = 2 + static_cast<int>(i % (d_max - 1));
    const ComparisonInstance inst =
        random_instance(d, fit.n, fit.r, seed, static_cast<std::uint64_t>(i));
    ratios[static_cast<std::size_t>(i)] = check_instance(inst).ratio;
  });
  std::vector<long> violations;
  for (int i = 0; i < count; ++i)
    if (ratios[static_cast<std::size_t>(i)] &&
        *ratios[static_cast<std::size_t>(i)] > fit.c_hat)
      violations.push_back(i);
  return violations;
}

std::vector<ComparisonInstance> load_instances_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_instances_json: cannot open " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  if (!doc.is_array()) doc = nlohmann::json::array({doc});
  std::vector<ComparisonInstance> out;
  for (const auto& item : doc) {
    ComparisonInstance inst;
    inst.d = item.at("d").get<int>();
    inst.n = item.at("n").get<int>();
    inst.r = item.at("r").get<int>();
    inst.sigma0.resize(inst.d, inst.d);
    inst.sigma1.resize(inst.d, inst.d);
    inst.u.resize(inst.d);
    for (int i = 0; i < inst.d; ++i) {
      inst.u[i] = item.at("u").at(i).get<double>();
      for (int j = 0; j < inst.d; ++j) {
        inst.sigma0(i, j) = item.at("sigma0").at(i).at(j).get<double>();
        inst.sigma1(i, j) = item.at("sigma1").at(i).at(j).get<double>();
      }
    }
    validate(inst);
    out.push_back(std::move(inst));
  }
  return out;
}

void write_batch_csv(const std::vector<BatchEntry>& entries, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_batch_csv: cannot open " + path);
  out << "instance_id,d,n,r,lhs_diff,bound,ratio\n";
  char buf[64];
  for (const auto& e : entries) {
    out << e.instance_id << ',' << e.instance.d << ',' << e.instance.n << ','
        << e.instance.r << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", e.report.lhs_diff);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", e.report.bound);
    out << buf << ',';
    if (e.report.ratio) {
      std::snprintf(buf, sizeof(buf), "%.17g", *e.report.ratio);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace gpx::berman
