#include "trimlab/ensemble.hpp"

#include <algorithm>
#include <string>

namespace trimlab {

HamiltonianMatrix realize(const EnsembleSpec& ens, std::uint64_t sample, std::uint64_t attempt) {
  SampleStream stream(ens.disorder, ens.seed);
  auto V = sample_potential(stream, ens.gamma, ens.region, sample, attempt);
  return assemble(ens.region, ens.gamma, ens.v0, ens.g, V, ens.dense_limit);
}

std::size_t resample_cap(std::size_t samples) { return std::max<std::size_t>(1, samples / 100); }

void check_resampling(std::size_t redraws, std::size_t samples) {
  if (redraws > resample_cap(samples))
    throw NumericError("spectral parameter hit the realized spectrum in " + std::to_string(redraws) +
                       " draws, above the resampling cap of " + std::to_string(resample_cap(samples)));
}

}  // namespace trimlab
