#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cyclotrace {

enum class errc {
  invalid_input,
  invalid_discriminant,
  non_fundamental,
  not_definite,
  square_discriminant,
  singular_gram,
  not_positive_definite,
  incompatible_embedding,
  gamma_pole,
  insufficient_precision,
  hypothesis_violated,
  unsupported_k,
  divergent_parameters,
  pole_at_z,
  pole_on_geodesic,
  no_convergence,
  overflow,
};

std::string_view to_string(errc code) noexcept;

// Single exception type for the library; the code carries the error kind.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace cyclotrace
