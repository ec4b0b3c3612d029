#include "nonholo/sampling.hpp"

#include <sstream>
#include <string>

namespace nonholo {

std::vector<Vec<double>> sample_points(const Chart& chart, int count, std::uint64_t seed, std::string_view tag) {
  SplitMix64 rng(stream_seed(seed, std::string(tag) + "@" + chart.name));
  std::vector<Vec<double>> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) pts.push_back(chart.sample(rng));
  return pts;
}

std::string format_point(const Vec<double>& x) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace nonholo
