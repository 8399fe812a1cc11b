#include "nugap/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nugap/random.hpp"

namespace nugap::data {

namespace {

// Largest-remainder apportionment with a floor of one per active family.
std::array<std::size_t, 4> family_counts(std::size_t n, const std::array<double, 4>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("dataset family weights must not all be zero");
  std::array<std::size_t, 4> count{};
  std::array<double, 4> frac{};
  std::size_t used = 0;
  for (std::size_t f = 0; f < 4; ++f) {
    const double exact = static_cast<double>(n) * w[f] / total;
    count[f] = static_cast<std::size_t>(std::floor(exact));
    frac[f] = exact - std::floor(exact);
    used += count[f];
  }
  while (used < n) {
    const auto f = static_cast<std::size_t>(std::max_element(frac.begin(), frac.end()) - frac.begin());
    ++count[f];
    frac[f] = -1.0;
    ++used;
  }
  for (std::size_t f = 0; f < 4; ++f) {
    if (w[f] <= 0.0 || count[f] > 0) continue;
    auto donor = static_cast<std::size_t>(std::max_element(count.begin(), count.end()) - count.begin());
    if (count[donor] <= 1) break;
    --count[donor];
    ++count[f];
  }
  return count;
}

lti::RationalTF draw(Family f, Rng& rng, const DatasetConfig& c) {
  const double k = rng.log_uniform(c.gain_min, c.gain_max);
  lti::Polynomial num{k};
  if (rng.uniform() < c.zero_probability) num = num * lti::Polynomial{rng.log_uniform(c.zero_tau_min, c.zero_tau_max), 1.0};
  switch (f) {
    case Family::first_order:
      return lti::RationalTF(num, lti::Polynomial{rng.log_uniform(c.tau_min, c.tau_max), 1.0});
    case Family::second_order: {
      const double wn = rng.log_uniform(c.wn_min, c.wn_max);
      const double zeta = rng.uniform(c.zeta_min, c.zeta_max);
      return lti::RationalTF(wn * wn * num, lti::Polynomial{1.0, 2.0 * zeta * wn, wn * wn});
    }
    case Family::integrator:
      return lti::RationalTF(num, lti::Polynomial{rng.log_uniform(c.tau_min, c.tau_max), 1.0, 0.0});
    case Family::unstable:
      return lti::RationalTF(num, lti::Polynomial{rng.log_uniform(c.unstable_tau_min, c.unstable_tau_max), -1.0});
  }
  throw std::logic_error("unknown family");
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::first_order: return "first_order";
    case Family::second_order: return "second_order";
    case Family::integrator: return "integrator";
    case Family::unstable: return "unstable";
  }
  return "?";
}

Dataset generate_dataset(std::uint64_t seed, std::size_t n, const DatasetConfig& cfg) {
  if (n < 2) throw std::invalid_argument("generate_dataset needs n >= 2");
  const auto counts = family_counts(
      n, {cfg.weight_first_order, cfg.weight_second_order, cfg.weight_integrator, cfg.weight_unstable});

  std::vector<Family> fam;
  for (std::size_t f = 0; f < 4; ++f) fam.insert(fam.end(), counts[f], static_cast<Family>(f));
  Rng order = Rng::substream(seed, "dataset/order");
  for (std::size_t i = fam.size(); i > 1; --i) std::swap(fam[i - 1], fam[order.below(i)]);

  Rng params = Rng::substream(seed, "dataset/params");
  Dataset out;
  for (std::size_t i = 0; i < n; ++i) {
    out.ids.push_back("G" + std::to_string(i));
    out.systems.push_back(draw(fam[i], params, cfg));
    out.families.push_back(fam[i]);
  }
  return out;
}

}  // namespace nugap::data
