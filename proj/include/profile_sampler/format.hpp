#pragma once

#include <string>
#include <vector>

namespace profile_sampler {

/// 17 significant digits, enough for an exact double round trip.
std::string format_double(double v);

/// strtod over the whole token; throws DomainError on trailing garbage.
double parse_double(const std::string& token);

std::vector<std::string> split(const std::string& text, char sep);
std::string trim(const std::string& text);

}  // namespace profile_sampler
