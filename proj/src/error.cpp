#include "transop/error.hpp"

namespace transop {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::precondition: return "precondition";
    case Errc::shape_mismatch: return "shape-mismatch";
    case Errc::out_of_domain: return "out-of-domain";
    case Errc::unsupported_configuration: return "unsupported-configuration";
    case Errc::sampling_failure: return "sampling-failure";
    case Errc::empty_dataset: return "empty-dataset";
    case Errc::dangling_vertex: return "dangling-vertex";
    case Errc::no_unique_invariant: return "no-unique-invariant";
    case Errc::infeasible_circulation: return "infeasible-circulation";
    case Errc::degenerate_density: return "degenerate-density";
    case Errc::image_density_degenerate: return "image-density-degenerate";
    case Errc::empty_block: return "empty-block";
    case Errc::degenerate_input: return "degenerate-input";
    case Errc::too_large: return "too-large";
    case Errc::io: return "io";
    case Errc::non_finite: return "non-finite";
    case Errc::ill_conditioned_basis: return "ill-conditioned-basis";
    case Errc::not_self_adjoint: return "not-self-adjoint";
    case Errc::near_null_singular: return "near-null-singular";
    case Errc::convergence: return "convergence";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace transop
