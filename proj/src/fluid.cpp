#include "ibd/fluid.hpp"

#include <cmath>

#include "ibd/chain.hpp"
#include "ibd/error.hpp"

namespace ibd {

Vector vector_field(const Matrix& birth, const Matrix& death, const Vector& gamma) {
  if (birth.rows() != gamma.size() || death.rows() != gamma.size() ||
      birth.cols() != gamma.size() || death.cols() != gamma.size()) {
    throw DimensionMismatch("fluid field: matrix and state dimensions differ");
  }
  const Vector b = birth * gamma;
  const Vector d = death * gamma;
  Vector out(gamma.size());
  for (Eigen::Index x = 0; x < gamma.size(); ++x) {
    for (double e : {b(x), d(x)}) {
      if (!(std::abs(e) <= kMaxExponent)) {
        throw ExponentOverflow("exponent " + std::to_string(e) + " at vertex " +
                               std::to_string(x));
      }
    }
    out(x) = std::exp(b(x)) - std::exp(d(x));
  }
  return out;
}

Vector vector_field(const InteractionMatrix& birth, const InteractionMatrix& death,
                    const Vector& gamma) {
  return vector_field(birth.matrix(), death.matrix(), gamma);
}

FluidPath rk4_integrate(const Matrix& birth, const Matrix& death, const Vector& gamma0,
                        double dt, double t_end, int record_stride) {
  return detail::rk4_integrate_field(
      [&](const Vector& g) { return vector_field(birth, death, g); }, gamma0, dt, t_end,
      record_stride);
}

namespace detail {

FluidPath rk4_integrate_field(const Field& field, const Vector& gamma0, double dt, double t_end,
                              int record_stride) {
  if (!(dt > 0.0) || !(dt <= t_end)) throw ValidationError("rk4_integrate needs 0 < dt <= t_end");
  if (record_stride < 1) throw ValidationError("record_stride must be >= 1");

  FluidPath path;
  path.times.push_back(0.0);
  path.states.push_back(gamma0);
  Vector g = gamma0;
  const auto steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
  double t = 0.0;
  for (long long k = 0; k < steps; ++k) {
    const double h = std::min(dt, t_end - t);
    try {
      const Vector k1 = field(g);
      const Vector k2 = field(g + 0.5 * h * k1);
      const Vector k3 = field(g + 0.5 * h * k2);
      const Vector k4 = field(g + h * k3);
      g += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const ExponentOverflow& e) {
      std::string msg = e.what();
      msg.erase(0, msg.find(": ") + 2);
      throw ExponentOverflow(msg + " during the step from t = " + std::to_string(t));
    }
    t = (k + 1 == steps) ? t_end : (k + 1) * dt;
    if ((k + 1) % record_stride == 0 || k + 1 == steps) {
      path.times.push_back(t);
      path.states.push_back(g);
    }
  }
  return path;
}

}  // namespace detail

}  // namespace ibd
