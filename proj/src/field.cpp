#include "nonholo/field.hpp"

#include <numbers>

namespace nonholo {

namespace {
DerivativeSettings g_settings;
}

Vec<double> Chart::sample(SplitMix64& rng) const {
  if (sampler) return sampler(rng);
  Vec<double> x(dim);
  for (int i = 0; i < dim; ++i) x[i] = rng.uniform(sample_box[i].lo, sample_box[i].hi);
  return x;
}

int Chart::index_of(const std::string& coord) const {
  for (int i = 0; i < dim; ++i)
    if (coord_names[i] == coord) return i;
  throw std::out_of_range("chart " + name + " has no coordinate " + coord);
}

ChartPtr make_chart(std::string name, std::vector<std::string> coords, std::vector<Interval> box,
                    std::vector<bool> periodic, std::function<Vec<double>(SplitMix64&)> sampler) {
  auto c = std::make_shared<Chart>();
  c->name = std::move(name);
  c->dim = static_cast<int>(coords.size());
  c->coord_names = std::move(coords);
  if (periodic.empty()) periodic.assign(c->dim, false);
  if (box.empty())
    for (int i = 0; i < c->dim; ++i) box.push_back(periodic[i] ? Interval{0.0, 2.0 * std::numbers::pi} : Interval{-1.0, 1.0});
  c->sample_box = std::move(box);
  c->periodic = std::move(periodic);
  c->sampler = std::move(sampler);
  if (static_cast<int>(c->sample_box.size()) != c->dim || static_cast<int>(c->periodic.size()) != c->dim)
    throw std::invalid_argument("make_chart " + c->name + ": coordinate, box and periodicity counts differ");
  if (c->dim > kMaxDim) throw std::invalid_argument("make_chart " + c->name + ": dimension above supported maximum");
  for (int i = 0; i < c->dim; ++i)
    if (!(c->sample_box[i].width() > 0.0))
      throw std::invalid_argument("make_chart " + c->name + ": empty sample interval for " + c->coord_names[i]);
  return c;
}

KForm coordinate_differential(ChartPtr chart, int i) {
  const int n = chart->dim;
  return make_form(chart, 1, [n, i](const auto& x) {
    using T = scalar_t<decltype(x)>;
    Alt<T> a(n, 1);
    a.c[i] = T(1);
    return a;
  });
}

VectorField coordinate_vector(ChartPtr chart, int i) {
  const int n = chart->dim;
  return make_vector(chart, [n, i](const auto& x) {
    using T = scalar_t<decltype(x)>;
    Vec<T> v = Vec<T>::Zero(n);
    v[i] = T(1);
    return v;
  });
}

std::vector<VectorField> columns(const MatrixField& m) {
  std::vector<VectorField> out;
  for (int j = 0; j < m.cols(); ++j)
    out.push_back(make_vector(m.chart(), [m, j](const auto& x) {
      using T = scalar_t<decltype(x)>;
      return Vec<T>(m(x).col(j));
    }));
  return out;
}

DerivativeSettings derivative_settings() { return g_settings; }
void set_derivative_settings(const DerivativeSettings& s) { g_settings = s; }

void throw_nesting_exhausted() {
  throw std::logic_error("derivative nesting exhausted: at most two nested derivative levels are supported");
}

}  // namespace nonholo
