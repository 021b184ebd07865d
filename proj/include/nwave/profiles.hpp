#pragma once

#include <cstdint>
#include <string_view>

#include "nwave/grid.hpp"

namespace nwave {

/// Self-similar N-wave of mass M for u_t + (|u|^(q-1) u / q)_x = 0:
///   w_M(t, x) = (x/t)^(1/(q-1)) on (0, r(t)).
/// For M < 0 the profile is -w_|M| on the same support.
class NWave {
 public:
  NWave(double mass, double q);

  double mass() const { return mass_; }
  double q() const { return q_; }

  /// r(t) = (q/(q-1))^((q-1)/q) |M|^((q-1)/q) t^(1/q).
  double front(double t) const;
  double eval(double t, double x) const;
  /// Integral of w_M(t, .) over (-inf, x].
  double antiderivative(double t, double x) const;
  /// sup |w_M(t)| = (r(t)/t)^(1/(q-1)).
  double sup_norm(double t) const;

 private:
  double mass_;
  double q_;
};

double nwave_eval(const NWave& nw, double t, double x);

enum class Sampling { cell_average, point };

/// w_M(t) on the grid, either exact cell averages (mass is M to rounding) or
/// values at cell centers (w^(q-1) is then exactly linear in the cell index).
/// Throws std::invalid_argument when the grid does not cover [0, r(t)] with
/// at least one spare cell on each side.
GridFunction nwave_sample(const NWave& nw, double t, const GridFunction& grid,
                          Sampling sampling = Sampling::cell_average);

enum class DatumKind { box, gaussian, two_boxes_signed, dipole_zero_mass };

std::string_view to_string(DatumKind kind);
DatumKind parse_datum_kind(std::string_view name);

struct DatumParams {
  // box: height on [left, left + width]
  double height = 1.0;
  double left = 0.0;
  double width = 1.0;
  // gaussian: mass-normalized, centered, truncated at +-4 sigma
  double mass = 1.0;
  double center = 0.0;
  double sigma = 0.25;
  // two_boxes_signed: positive box on [0,1], negative box on [-2,-1]
  double positive_height = 2.0;
  double negative_height = -1.0;
};

/// Cell-averaged initial data. The dipole is +h on [left, left+width] and
/// -h on [left+width, left+2 width], so its mass vanishes exactly.
GridFunction make_initial_datum(DatumKind kind, const DatumParams& params, const GridFunction& grid);

}  // namespace nwave
