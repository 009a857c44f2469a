#pragma once

#include <functional>
#include <optional>

#include "relsens/joint.hpp"
#include "relsens/limit_state.hpp"

namespace relsens {

using StandardLsf = std::function<double(const Vector&)>;
using StandardGradient = std::function<Vector(const Vector&)>;

struct FormOptions {
  std::size_t max_iterations = 100;
  double step_tolerance = 1e-6;
  /// |G| must fall below g_tolerance * (1 + |G(0)|).
  double g_tolerance = 1e-6;
  double fd_step = 1e-5;
};

struct FormResult {
  double beta0 = 0.0;
  /// -grad G(u*) / |grad G(u*)|, so that beta0 = alpha . u*.
  Vector alpha;
  /// Same direction expressed in correlated standard-normal space z = L u;
  /// equals alpha for independent inputs. Empty unless run through a joint.
  Vector alpha_z;
  Vector u_star;
  Vector x_star;
  std::size_t iterations = 0;
  std::size_t g_evaluations = 0;
  bool converged = false;
  double grad_norm = 0.0;
  double g_at_origin = 0.0;
};

/// Improved HL-RF iteration with an Armijo line search on the merit function
/// m(u) = |u|^2 / 2 + c |G(u)|. Gradients by central differences unless
/// `gradient` is given. Throws SingularPoint on a vanishing gradient.
FormResult find_design_point(const StandardLsf& g, std::size_t dims, const FormOptions& options = {},
                             const StandardGradient& gradient = {});

/// FORM for g(x, a) under a Gaussian-copula joint. Fills x_star and alpha_z.
FormResult run_form(const GaussianCopulaJoint& joint, const LimitState& lsf,
                    std::optional<double> a = std::nullopt, const FormOptions& options = {});

/// Phi((alpha_i u_i - beta0) / sqrt(1 - alpha_i^2)). Throws DegenerateProblem for |alpha_i| >= 1.
double conditional_pf_u(double beta0, double alpha_i, double u_i);

/// Conditional pF at x_i through the marginal transform. Independent inputs only
/// (Unsupported otherwise).
double conditional_pf_x(const GaussianCopulaJoint& joint, std::size_t i, double x_i,
                        const FormResult& form);

/// u where the conditional pF equals cr_over_cf. Throws NoThreshold if alpha_i = 0.
double threshold_u(double beta0, double alpha_i, double cr_over_cf);
double threshold_x(const GaussianCopulaJoint& joint, std::size_t i, double beta0, double alpha_i,
                   double cr_over_cf);

enum class FormEvppiMethod { Closed, Quadrature };

/// Safety-assessment EVPPI of one input under the FORM linearization.
double evppi_form_safety(double beta0, double alpha_i, double c_f, double c_r,
                         FormEvppiMethod method = FormEvppiMethod::Closed);

/// Design-case EVPPI under the affine design limit state with the a-priori
/// optimal design; continuous at |alpha_i| = 1.
double evppi_form_design(double beta0, double alpha_i, double c_f);

}  // namespace relsens
