#include "mcdiv/topology.hpp"

#include <cmath>
#include <sstream>

namespace mcdiv {

SystemTopology SystemTopology::siso(double d, double r, double D) {
  SystemTopology t{d, std::nullopt, r, D};
  t.validate();
  return t;
}

SystemTopology SystemTopology::mimo(double d, double a, double r, double D) {
  SystemTopology t{d, a, r, D};
  t.validate();
  return t;
}

double SystemTopology::cross_distance() const {
  if (!a) {
    throw InvalidArgument("cross-link distance requested for a SISO topology");
  }
  return std::hypot(d, *a);
}

void SystemTopology::validate() const {
  if (!(std::isfinite(d) && std::isfinite(r) && std::isfinite(D))) {
    throw InvalidArgument("topology parameters must be finite");
  }
  if (!(r > 0.0)) throw InvalidArgument("receiver radius must be positive");
  if (!(d > r)) {
    throw InvalidArgument("transmitter lies inside the receiver (need d > r)");
  }
  if (!(D > 0.0)) throw InvalidArgument("diffusion coefficient must be positive");
  if (a) {
    if (!std::isfinite(*a) || !(*a > 2.0 * r)) {
      throw InvalidArgument("receive spheres overlap (need a > 2r)");
    }
  }
}

std::string SystemTopology::describe() const {
  std::ostringstream os;
  os << "d=" << d;
  if (a) os << " a=" << *a;
  os << " r=" << r << " D=" << D;
  return os.str();
}

}  // namespace mcdiv
