#include "profile_sampler/core.hpp"

#include <cmath>
#include <sstream>

namespace profile_sampler {

namespace {

void check_rate_args(long n, double r) {
  if (n < 1) throw DomainError("sample size must be >= 1");
  if (!(r > 0.25) || !std::isfinite(r)) throw DomainError("rate r must exceed 1/4");
}

Vector parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    out.push_back(v);
  }
  return Eigen::Map<Vector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

}  // namespace

ParameterPoint::ParameterPoint(Vector theta) : theta_(std::move(theta)) {
  if (!theta_.allFinite()) throw DomainError("parameter point has non-finite entries");
}

ParameterPoint::ParameterPoint(std::initializer_list<double> values)
    : ParameterPoint(Vector::Map(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

std::size_t covariate_dim(const CoxDataset& data) { return data[0].z.size(); }

Prior Prior::gaussian(Vector mean, Vector sd) {
  if (mean.size() != sd.size()) throw DomainError("gaussian prior: mean/sd length mismatch");
  if (!(sd.array() > 0.0).all() || !sd.allFinite())
    throw DomainError("gaussian prior: sd entries must be positive");
  Prior p;
  p.kind_ = Kind::gaussian;
  p.mean_ = std::move(mean);
  p.sd_ = std::move(sd);
  return p;
}

std::string Prior::to_string() const {
  if (kind_ == Kind::flat) return "flat";
  std::ostringstream os;
  os.precision(17);
  os << "gaussian:";
  for (Eigen::Index i = 0; i < mean_.size(); ++i) os << (i ? ";" : "") << mean_[i];
  os << ",";
  for (Eigen::Index i = 0; i < sd_.size(); ++i) os << (i ? ";" : "") << sd_[i];
  return os.str();
}

Prior Prior::parse(const std::string& text) {
  if (text == "flat" || text.empty()) return flat();
  const std::string tag = "gaussian:";
  if (text.rfind(tag, 0) != 0) throw DomainError("unknown prior '" + text + "'");
  const std::string body = text.substr(tag.size());
  const auto comma = body.find(',');
  if (comma == std::string::npos) throw DomainError("gaussian prior needs 'mean,sd'");
  try {
    return gaussian(parse_list(body.substr(0, comma)), parse_list(body.substr(comma + 1)));
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const DomainError*>(&e)) throw;
    throw DomainError("malformed prior '" + text + "'");
  }
}

double prior_log_density(const Prior& prior, const ParameterPoint& theta) {
  if (prior.kind() == Prior::Kind::flat) return 0.0;
  const Vector& mu = prior.mean();
  const Vector& sd = prior.sd();
  const bool broadcast = mu.size() == 1;
  if (!broadcast && static_cast<std::size_t>(mu.size()) != theta.size())
    throw DomainError("gaussian prior dimension does not match theta");
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  double total = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const Eigen::Index k = broadcast ? 0 : static_cast<Eigen::Index>(i);
    const double u = (theta[i] - mu[k]) / sd[k];
    total += -0.5 * u * u - std::log(sd[k]) - kHalfLog2Pi;
  }
  return total;
}

RateSpec::RateSpec(double r) : r_(r) {
  if (!(r > 0.25) || !std::isfinite(r)) throw DomainError("rate r must exceed 1/4");
}

double m_n(long n, double r) {
  check_rate_args(n, r);
  const double nd = static_cast<double>(n);
  return std::pow(nd, -0.5) + std::pow(nd, -2.0 * r + 0.5);
}

double g_r(double w, long n, double r) {
  check_rate_args(n, r);
  if (!(w >= 0.0)) throw DomainError("g_r: w must be nonnegative");
  const double nd = static_cast<double>(n);
  const double cubic = nd * w * w * w;
  if (r >= 0.5) return cubic + std::pow(nd, -0.5);
  return cubic + std::pow(nd, 1.0 - r) * w * w + std::pow(nd, 1.0 - 2.0 * r) * w +
         std::pow(nd, -2.0 * r + 0.5);
}

double h_r(double s, long n, double r) {
  if (!(s > 0.0)) throw DomainError("h_r: step must be positive");
  return g_r(s, n, r) / (static_cast<double>(n) * s * s);
}

double step_size(long n, const RateSpec& rate, double c) {
  if (n < 1) throw DomainError("sample size must be >= 1");
  if (!(c > 0.0)) throw DomainError("step constant must be positive");
  return c * std::pow(static_cast<double>(n), -rate.effective_exponent());
}

}  // namespace profile_sampler
