#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace transop {

/// Failure categories. The CLI maps precondition-class codes to exit status 2
/// and numerical-class codes to exit status 3.
enum class Errc {
  precondition,
  shape_mismatch,
  out_of_domain,
  unsupported_configuration,
  sampling_failure,
  empty_dataset,
  dangling_vertex,
  no_unique_invariant,
  infeasible_circulation,
  degenerate_density,
  image_density_degenerate,
  empty_block,
  degenerate_input,
  too_large,
  io,
  // numerical
  non_finite,
  ill_conditioned_basis,
  not_self_adjoint,
  near_null_singular,
  convergence,
};

std::string_view to_string(Errc code) noexcept;

/// True for failures caused by floating-point behaviour rather than bad input.
constexpr bool is_numerical(Errc code) noexcept { return code >= Errc::non_finite; }

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }
  bool numerical() const noexcept { return is_numerical(code_); }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace transop
