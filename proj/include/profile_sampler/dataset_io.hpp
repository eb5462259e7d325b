#pragma once

#include <iosfwd>
#include <string>

#include "profile_sampler/core.hpp"

namespace profile_sampler {

// Cox datasets: header `y,delta,z1[,z2,...]`.
void write_cox_csv(std::ostream& os, const CoxDataset& data);
CoxDataset read_cox_csv(std::istream& is);

// Partly linear datasets: header `c,delta,w,z`.
void write_partly_linear_csv(std::ostream& os, const PartlyLinearDataset& data);
PartlyLinearDataset read_partly_linear_csv(std::istream& is);

CoxDataset load_cox_csv(const std::string& path);
PartlyLinearDataset load_partly_linear_csv(const std::string& path);

}  // namespace profile_sampler
