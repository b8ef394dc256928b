#pragma once

#include "ugw/common.hpp"
#include "ugw/spaces.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ugw {

/// p-ultra-distortion of a coupling:
/// (sum_{ijkl} Lambda_inf(uX(i,k), uY(j,l))^p mu_ij mu_kl)^(1/p); p = inf is
/// the max of Lambda_inf over pairs of support cells (entries > kMassTol).
double dis_ult(const UmSpace& x, const UmSpace& y, const Matrix& coupling, double p);

/// Classical p-distortion with |uX - uY| in place of Lambda_inf. No leading
/// 1/2; the dGW wrappers apply it.
double dis_classical(const UmSpace& x, const UmSpace& y, const Matrix& coupling, double p);

enum class CostKind { ultra, classical };

/// Gradient of dis^p with respect to the coupling:
/// G_ij = 2 sum_kl c(uX(i,k), uY(j,l))^p mu_kl.
Matrix distortion_gradient(const UmSpace& x, const UmSpace& y, const Matrix& coupling, double p,
                           CostKind kind = CostKind::ultra);

struct GwResult {
    double value = 0.0;
    std::string method;
    /// Optimal or best-found coupling (Frank-Wolfe, uGW_inf certificate).
    std::optional<Matrix> coupling;
    /// Critical level for the quotient sweeps.
    std::optional<double> level;
    /// Block matching at the critical level (uGW_inf / uGH) as pairs of
    /// blocks' first members, or the isometric embedding (A, phi) for the
    /// Sturm solver as (x, phi(x)) pairs.
    std::vector<std::pair<std::size_t, std::size_t>> matching;
    /// Frank-Wolfe: final distortion of every restart.
    std::vector<double> trace;
};

/// Exact uGW_inf: sweeps the merged spectrum from the top and returns the
/// smallest level whose weighted quotients are isomorphic (0 when every
/// level matches). The certificate coupling realises the value.
GwResult ugw_inf_exact(const UmSpace& x, const UmSpace& y);

/// Exact uGH: the same sweep on mass-blind quotients.
GwResult ugh_exact(const UmSpace& x, const UmSpace& y);

struct LevelCheck {
    double level;
    bool isomorphic;
};

/// Isomorphism status of the level-t quotients for every level of the
/// merged spectrum, descending, without early exit.
std::vector<LevelCheck> quotient_profile(const UmSpace& x, const UmSpace& y, bool with_mass);

enum class StepRule { harmonic, exact_line_search };

struct FwConfig {
    std::size_t restarts = 40;
    std::size_t iterations = 5000;
    StepRule step_rule = StepRule::exact_line_search;
    std::size_t hitrun_steps = 50;
    std::uint64_t seed = 0;
    double tol_stationarity = 1e-10;
    /// Worker threads for independent restarts; 0 = machine parallelism.
    unsigned threads = 1;
};

/// Frank-Wolfe upper bound on uGW_p (ultra cost) or dGW_p (classical cost,
/// halved) for finite p. Restart 0 starts at the product coupling, the
/// others at hit-and-run samples; the best final coupling is returned.
GwResult ugw_fw(const UmSpace& x, const UmSpace& y, double p, const FwConfig& config = {},
                CostKind kind = CostKind::ultra);

/// Random couplings from a hit-and-run walk on the transportation polytope
/// started at the product coupling; one is emitted every `steps` jumps.
std::vector<Matrix> hitrun_couplings(const Vector& mu_x, const Vector& mu_y, std::size_t count,
                                     std::size_t steps, std::uint64_t seed);

/// Sturm's ultrametric GW distance by enumeration of maximal isometric
/// pairs (A, phi) and the ultrametric amalgam on X + (Y \ phi(A)).
/// Exponential; refuses spaces larger than `max_points`.
GwResult usturm_bruteforce(const UmSpace& x, const UmSpace& y, double p,
                           std::size_t max_points = 7);

/// Ultrametric amalgam Z_A on X followed by Y \ phi(A) for an isometric
/// embedding phi given as (x, phi(x)) pairs, with the images of mu_X and
/// mu_Y as mass vectors on it. The space carries uniform placeholder masses.
struct Amalgam {
    UmSpace space;
    Vector alpha;
    Vector beta;
    /// Amalgam index of every point of Y.
    std::vector<std::size_t> y_index;
};

Amalgam sturm_amalgam(const UmSpace& x, const UmSpace& y,
                      const std::vector<std::pair<std::size_t, std::size_t>>& embedding);

}  // namespace ugw
