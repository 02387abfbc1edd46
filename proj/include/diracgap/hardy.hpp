#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "diracgap/minimax.hpp"
#include "diracgap/radial.hpp"

namespace diracgap {

/// J(lambda)[f]: the quadratic form of talman_schur(lambda) on the coefficient vector f.
double hardy_J(const RadialBasis& basis, const Eigen::VectorXd& f, double lambda);

/// int |f' - kappa f/r|^2/(2 - v) + (1 - v)|f|^2 dr; all slack bounds are relative to it.
double hardy_scale(const RadialBasis& basis, const Eigen::VectorXd& f);

/// (f' - kappa f/r)/(1 + lambda - v) sampled at r.
std::vector<double> optimal_lower(const RadialBasis& basis, const Eigen::VectorXd& f, double lambda,
                                  const std::vector<double>& r);

/// int (1 - lambda + v) f^2 + 2 g (f' - kappa f/r) - (1 + lambda - v) g^2 dr over the mesh, for a lower
/// component g given as a callable. Its supremum over g is hardy_J, attained at optimal_lower.
double hardy_functional(const RadialBasis& basis, const Eigen::VectorXd& f, double lambda,
                        const std::function<double(double)>& g);

/// lambda(nu) = sqrt(1 - ((4-n) nu)^2).
double critical_lambda(int dim, double nu);

/// J(lambda(nu)) and the scale of r^a exp(-(4-n) nu r) in the channel kappa = 1/(4-n), by quadrature
/// with an analytic small-r remainder. With a = sqrt((4-n)^-2 - nu^2) this is the exact ground profile.
struct ClosedFormValue {
    double J = 0.0;
    double scale = 0.0;
};
ClosedFormValue ground_profile_form(int dim, double nu, double exponent);

struct HardyOptions {
    int profiles = 100;
    std::uint64_t seed = 20240611ULL;
    double kappa_max = 2.0;
    RadialMeshSpec mesh;
    double slack = 1e-10;
    /// Exponent used for the limiting profile at the critical coupling.
    double critical_exponent = 1e-6;
    int threads = 0;
};

struct HardyEntry {
    std::string channel;
    double J = 0.0;
    double scale = 0.0;
};

struct HardyReport {
    int dim = 3;
    double nu = 0.0;
    double lambda = 1.0;
    std::string potential;
    std::vector<HardyEntry> entries;
    double min_J = 0.0;
    double min_ratio = 0.0;  // min J / scale
    std::optional<double> saturation;  // |J| / scale on the ground profile; empty at nu = 0
    std::string saturation_method;     // "discrete", "closed-form" or "none"
    bool passed = true;
};

/// Evaluates J(lambda(nu)) on seeded random single-channel profiles and the ground-profile saturation.
HardyReport verify_corollary(int dim, double nu, const HardyOptions& opt);

}  // namespace diracgap
