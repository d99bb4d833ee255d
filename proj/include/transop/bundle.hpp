#pragma once

#include "transop/linalg.hpp"

#include <string>

namespace transop {

struct Provenance {
  enum class Kind { estimated, exact };
  Kind kind = Kind::exact;
  std::string id;
};

/// Matrix representations of the five transfer operators together with the
/// reference density mu and its image nu. mu and nu are empty when the basis
/// carries no natural cell masses (smooth dictionaries).
struct OperatorBundle {
  Matrix K;
  Matrix T;
  Matrix F;
  Matrix B;
  Matrix P;
  Vector mu;
  Vector nu;
  Provenance provenance;

  Index size() const { return K.rows(); }
};

}  // namespace transop
