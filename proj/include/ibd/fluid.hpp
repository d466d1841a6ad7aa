#pragma once

#include <functional>

#include "ibd/graph.hpp"
#include "ibd/linalg.hpp"
#include "ibd/path.hpp"

namespace ibd {

using FluidPath = SamplePath;

/// γ̇_x = exp((A_b γ)_x) - exp((A_d γ)_x). Throws ExponentOverflow when an
/// exponent exceeds 700 in magnitude.
Vector vector_field(const Matrix& birth, const Matrix& death, const Vector& gamma);
Vector vector_field(const InteractionMatrix& birth, const InteractionMatrix& death,
                    const Vector& gamma);

/// Classical fixed-step RK4 for the fluid ODE. A shorter final step is taken
/// when dt does not divide t_end; every `record_stride`-th point plus the
/// terminal point is recorded.
FluidPath rk4_integrate(const Matrix& birth, const Matrix& death, const Vector& gamma0,
                        double dt, double t_end, int record_stride = 1);

namespace detail {

using Field = std::function<Vector(const Vector&)>;

/// RK4 on an arbitrary autonomous field; testing seam for rk4_integrate.
FluidPath rk4_integrate_field(const Field& field, const Vector& gamma0, double dt, double t_end,
                              int record_stride = 1);

}  // namespace detail

}  // namespace ibd
