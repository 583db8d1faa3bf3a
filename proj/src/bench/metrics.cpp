#include "sbdd/bench/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "sbdd/error.hpp"

namespace sbdd::bench {

double metric_high_affinity(std::span<const double> generated, double reference) {
  if (generated.empty()) throw ValidationError("high affinity: no generated scores");
  const auto hits = std::count_if(generated.begin(), generated.end(), [&](double s) { return s <= reference; });
  return static_cast<double>(hits) / static_cast<double>(generated.size());
}

std::vector<chem::Fingerprint> fingerprints(std::span<const chem::MolecularGraph> mols) {
  std::vector<chem::Fingerprint> out;
  out.reserve(mols.size());
  for (const auto& m : mols) out.push_back(chem::fingerprint(m));
  return out;
}

double metric_diversity(std::span<const chem::Fingerprint> mols) {
  if (mols.size() < 2) throw ValidationError("diversity needs at least two molecules");
  double sum = 0.0;
  for (std::size_t i = 0; i < mols.size(); ++i) {
    for (std::size_t j = i + 1; j < mols.size(); ++j) sum += 1.0 - chem::tanimoto(mols[i], mols[j]);
  }
  const double pairs = 0.5 * static_cast<double>(mols.size()) * static_cast<double>(mols.size() - 1);
  return sum / pairs;
}

double metric_diversity(std::span<const chem::MolecularGraph> mols) { return metric_diversity(fingerprints(mols)); }

double metric_novelty(std::span<const chem::Fingerprint> mols, std::span<const chem::Fingerprint> train) {
  if (mols.empty()) throw ValidationError("novelty needs at least one molecule");
  if (train.empty()) throw ValidationError("novelty needs a nonempty training set");
  double sum = 0.0;
  for (const auto& m : mols) {
    double best = 0.0;
    for (const auto& t : train) best = std::max(best, chem::tanimoto(m, t));
    sum += 1.0 - best;
  }
  return sum / static_cast<double>(mols.size());
}

double metric_novelty(std::span<const chem::MolecularGraph> mols, std::span<const chem::MolecularGraph> train) {
  return metric_novelty(fingerprints(mols), fingerprints(train));
}

double mean(std::span<const double> x) {
  if (x.empty()) throw ValidationError("mean of an empty list");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double r_squared(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size() || y.empty()) throw ValidationError("r_squared: size mismatch or empty input");
  const double mu = mean(y);
  double res = 0.0, tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    tot += (y[i] - mu) * (y[i] - mu);
  }
  if (tot == 0.0) throw NumericError("r_squared: targets have zero variance");
  return 1.0 - res / tot;
}

double squared_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw ValidationError("correlation: size mismatch or too few points");
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw NumericError("correlation: zero variance");
  return sab * sab / (saa * sbb);
}

}  // namespace sbdd::bench
