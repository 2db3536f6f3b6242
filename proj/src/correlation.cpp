#include "gpx/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gpx::correlation {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

CorrelationModel CorrelationModel::powered_exponential(double c, double alpha,
                                                       double lambda) {
  require(c > 0.0, "powered_exponential: C must be positive");
  require(alpha > 0.0 && alpha <= 2.0, "powered_exponential: alpha must be in (0, 2]");
  require(lambda > 0.0, "powered_exponential: lambda must be positive");
  CorrelationModel m;
  m.family_ = Family::kPoweredExponential;
  m.c_ = c;
  m.alpha_ = alpha;
  m.lambda_ = lambda;
  return m;
}

CorrelationModel CorrelationModel::cauchy(double c_prime, double alpha, double gamma,
                                          double declared_c) {
  require(c_prime > 0.0, "cauchy: C' must be positive");
  require(alpha > 0.0 && alpha <= 2.0, "cauchy: alpha must be in (0, 2]");
  require(gamma > 0.0, "cauchy: gamma must be positive");
  require(declared_c >= 0.0, "cauchy: declared C must be positive");
  CorrelationModel m;
  m.family_ = Family::kCauchy;
  m.c_prime_ = c_prime;
  m.gamma_ = gamma;
  m.alpha_ = alpha;
  m.c_ = declared_c > 0.0 ? declared_c : gamma * c_prime;
  m.lambda_ = alpha * gamma;
  return m;
}

CorrelationModel CorrelationModel::tabulated(std::vector<double> t, std::vector<double> r,
                                             double c, double alpha, double lambda) {
  require(t.size() == r.size() && t.size() >= 2, "tabulated: need >= 2 (t, r) pairs");
  require(t.front() == 0.0, "tabulated: first lag must be t = 0");
  require(r.front() == 1.0, "tabulated: r(0) must equal 1");
  for (std::size_t i = 1; i < t.size(); ++i)
    require(t[i] > t[i - 1], "tabulated: lags must be strictly increasing");
  for (double v : r) require(std::abs(v) <= 1.0, "tabulated: |r| must not exceed 1");
  CorrelationModel m;
  m.family_ = Family::kTabulated;
  m.c_ = c;
  m.alpha_ = alpha;
  m.lambda_ = lambda;
  m.tab_t_ = std::move(t);
  m.tab_r_ = std::move(r);
  return m;
}

CorrelationModel CorrelationModel::tabulated_from_csv(const std::string& path, double c,
                                                      double alpha, double lambda) {
  std::ifstream in(path);
  require(in.good(), "tabulated_from_csv: cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> t, r;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string tf, rf;
    require(static_cast<bool>(std::getline(row, tf, ',')) &&
                static_cast<bool>(std::getline(row, rf, ',')),
            "tabulated_from_csv: malformed row '" + line + "'");
    t.push_back(std::stod(tf));
    r.push_back(std::stod(rf));
  }
  return tabulated(std::move(t), std::move(r), c, alpha, lambda);
}

double CorrelationModel::evaluate(double t) const {
  require(std::isfinite(t), "evaluate: t must be finite");
  const double a = std::abs(t);
  switch (family_) {
    case Family::kPoweredExponential:
      return std::exp(-c_ * std::pow(a, alpha_));
    case Family::kCauchy:
      return std::pow(1.0 + c_prime_ * std::pow(a, alpha_), -gamma_);
    case Family::kTabulated: {
      if (a > tab_t_.back())
        throw std::domain_error("evaluate: lag " + std::to_string(a) +
                                " outside tabulated range [0, " +
                                std::to_string(tab_t_.back()) + "]");
      auto it = std::lower_bound(tab_t_.begin(), tab_t_.end(), a);
      const std::size_t j = static_cast<std::size_t>(it - tab_t_.begin());
      if (j == 0) return tab_r_.front();
      const double w = (a - tab_t_[j - 1]) / (tab_t_[j] - tab_t_[j - 1]);
      return (1.0 - w) * tab_r_[j - 1] + w * tab_r_[j];
    }
  }
  return 0.0;  // unreachable
}

LocalValidationReport validate_local(const CorrelationModel& model,
                                     const Eigen::ArrayXd& t_sequence, double tol) {
  if (t_sequence.size() == 0)
    throw std::invalid_argument("validate_local: empty lag sequence");
  for (Eigen::Index i = 0; i < t_sequence.size(); ++i) {
    if (t_sequence[i] <= 0.0)
      throw std::invalid_argument("validate_local: lags must be positive");
    if (i > 0 && t_sequence[i] >= t_sequence[i - 1])
      throw std::invalid_argument("validate_local: lags must strictly decrease");
  }
  LocalValidationReport rep;
  rep.t = t_sequence;
  rep.ratio.resize(t_sequence.size());
  for (Eigen::Index i = 0; i < t_sequence.size(); ++i) {
    const double t = t_sequence[i];
    rep.ratio[i] =
        (1.0 - model.evaluate(t)) / (model.c() * std::pow(t, model.alpha()));
  }
  rep.final_ratio = rep.ratio[rep.ratio.size() - 1];
  rep.tol = tol;
  rep.pass = std::abs(rep.final_ratio - 1.0) <= tol;
  return rep;
}

DecayValidationReport validate_decay(const CorrelationModel& model, double lambda,
                                     double t_max, int n_points) {
  if (t_max <= 1.0) throw std::invalid_argument("validate_decay: t_max must exceed 1");
  if (n_points < 2) throw std::invalid_argument("validate_decay: need >= 2 points");
  DecayValidationReport rep;
  rep.t.resize(n_points);
  rep.statistic.resize(n_points);
  const double t_min = t_max * 1e-4;
  const double step = std::log(t_max / t_min) / (n_points - 1);
  Eigen::Index argmax = 0;
  for (int i = 0; i < n_points; ++i) {
    const double t = t_min * std::exp(step * i);
    rep.t[i] = t;
    rep.statistic[i] = std::abs(model.evaluate(t)) * std::pow(t, lambda);
    if (rep.statistic[i] > rep.statistic[argmax]) argmax = i;
  }
  rep.sup = rep.statistic[argmax];
  rep.sup_at = rep.t[argmax];
  rep.monotone_tail = true;
  for (int i = n_points / 2 + 1; i < n_points; ++i)
    if (rep.statistic[i] > rep.statistic[i - 1] * (1.0 + 1e-12)) {
      rep.monotone_tail = false;
      break;
    }
  rep.bounded = argmax + 1 < static_cast<Eigen::Index>(n_points);
  return rep;
}

}  // namespace gpx::correlation
