#pragma once

#include <string>
#include <vector>

#include "relsens/joint.hpp"
#include "relsens/limit_state.hpp"
#include "relsens/lognormal_linear.hpp"

namespace relsens {

/// A named reliability problem: inputs, joint model and limit state.
struct Problem {
  std::vector<std::string> names;
  GaussianCopulaJoint joint;
  LimitState lsf;
};

/// Component with resistance R, load S and model factors XR, XS, all lognormal.
/// The dependent variant correlates R-XR, S-XS and XR-XS with 0.5.
Problem example1(bool dependent, bool design = false);
Matrix example1_correlation();
/// Log-space linear form of example 1 with constant ln a (a = 1 for safety).
LognormalLinearProblem example1_lognormal(bool dependent, double a = 1.0);

/// Short column under biaxial bending and axial load (M1, M2, P, Y).
Problem example2();
Matrix example2_correlation();

}  // namespace relsens
