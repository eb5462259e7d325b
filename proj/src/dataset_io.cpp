#include "profile_sampler/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "profile_sampler/format.hpp"

namespace profile_sampler {

namespace {

int parse_indicator(const std::string& token, std::size_t line) {
  const std::string t = trim(token);
  if (t == "0") return 0;
  if (t == "1") return 1;
  throw DomainError("line " + std::to_string(line) + ": delta must be 0 or 1, got '" + t + "'");
}

double parse_finite(const std::string& token, std::size_t line) {
  const double v = parse_double(token);
  if (!std::isfinite(v)) throw DomainError("line " + std::to_string(line) + ": non-finite value");
  return v;
}

}  // namespace

void write_cox_csv(std::ostream& os, const CoxDataset& data) {
  const std::size_t d = covariate_dim(data);
  os << "y,delta";
  for (std::size_t k = 0; k < d; ++k) os << ",z" << (k + 1);
  os << '\n';
  for (const auto& o : data) {
    os << format_double(o.y) << ',' << o.delta;
    for (double z : o.z) os << ',' << format_double(z);
    os << '\n';
  }
}

CoxDataset read_cox_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("cox csv: missing header");
  const auto header = split(trim(line), ',');
  if (header.size() < 3 || trim(header[0]) != "y" || trim(header[1]) != "delta")
    throw DomainError("cox csv: header must be y,delta,z1[,z2,...]");
  for (std::size_t k = 2; k < header.size(); ++k)
    if (trim(header[k]) != "z" + std::to_string(k - 1))
      throw DomainError("cox csv: unexpected column '" + header[k] + "'");
  const std::size_t d = header.size() - 2;
  std::vector<CoxObservation> obs;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != d + 2) throw DomainError("cox csv: wrong field count on line " + std::to_string(lineno));
    CoxObservation o;
    o.y = parse_finite(f[0], lineno);
    if (o.y < 0.0) throw DomainError("cox csv: negative time on line " + std::to_string(lineno));
    o.delta = parse_indicator(f[1], lineno);
    for (std::size_t k = 0; k < d; ++k) o.z.push_back(parse_finite(f[k + 2], lineno));
    obs.push_back(std::move(o));
  }
  return CoxDataset(std::move(obs));
}

void write_partly_linear_csv(std::ostream& os, const PartlyLinearDataset& data) {
  os << "c,delta,w,z\n";
  for (const auto& o : data)
    os << format_double(o.c) << ',' << o.delta << ',' << format_double(o.w) << ','
       << format_double(o.z) << '\n';
}

PartlyLinearDataset read_partly_linear_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != "c,delta,w,z")
    throw DomainError("partly linear csv: header must be c,delta,w,z");
  std::vector<PartlyLinearObservation> obs;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 4)
      throw DomainError("partly linear csv: wrong field count on line " + std::to_string(lineno));
    obs.push_back({parse_finite(f[0], lineno), parse_indicator(f[1], lineno),
                   parse_finite(f[2], lineno), parse_finite(f[3], lineno)});
  }
  return PartlyLinearDataset(std::move(obs));
}

CoxDataset load_cox_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  return read_cox_csv(in);
}

PartlyLinearDataset load_partly_linear_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  return read_partly_linear_csv(in);
}

}  // namespace profile_sampler
