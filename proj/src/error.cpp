#include "cyclotrace/error.hpp"

namespace cyclotrace {

std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::invalid_input: return "InvalidInput";
    case errc::invalid_discriminant: return "InvalidDiscriminant";
    case errc::non_fundamental: return "NonFundamental";
    case errc::not_definite: return "NotDefinite";
    case errc::square_discriminant: return "SquareDiscriminant";
    case errc::singular_gram: return "SingularGram";
    case errc::not_positive_definite: return "NotPositiveDefinite";
    case errc::incompatible_embedding: return "IncompatibleEmbedding";
    case errc::gamma_pole: return "GammaPole";
    case errc::insufficient_precision: return "InsufficientPrecision";
    case errc::hypothesis_violated: return "HypothesisViolated";
    case errc::unsupported_k: return "UnsupportedK";
    case errc::divergent_parameters: return "DivergentParameters";
    case errc::pole_at_z: return "PoleAtZ";
    case errc::pole_on_geodesic: return "PoleOnGeodesic";
    case errc::no_convergence: return "NoConvergence";
    case errc::overflow: return "Overflow";
  }
  return "Unknown";
}

}  // namespace cyclotrace
