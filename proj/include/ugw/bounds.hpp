#pragma once

#include "ugw/spaces.hpp"
#include "ugw/transport.hpp"

#include <vector>

namespace ugw {

/// s_{X,p}(x) = ||u_X(x, .)||_{L^p(mu_X)}; p = inf gives max_k u_X(x, k).
std::vector<double> eccentricities(const UmSpace& space, double p);

/// (u_X)_#(mu_X (x) mu_X), diagonal atoms included.
ScalarMeasure global_distance_distribution(const UmSpace& space);

/// u_X(x, .)_# mu_X, including the self atom u_X(x, x) with mass mu_x.
ScalarMeasure local_distance_distribution(const UmSpace& space, std::size_t x);

/// Ultrametric lower bounds. uSLB_p and uTLB_p bound uGW_p from below for
/// every p; uFLB_p only for p = inf.
double uflb(const UmSpace& x, const UmSpace& y, double p);
double uslb(const UmSpace& x, const UmSpace& y, double p);
double utlb(const UmSpace& x, const UmSpace& y, double p, unsigned threads = 1);

/// Classical counterparts, each with its leading 1/2.
double flb(const UmSpace& x, const UmSpace& y, double p);
double slb(const UmSpace& x, const UmSpace& y, double p);
double tlb(const UmSpace& x, const UmSpace& y, double p, unsigned threads = 1);

struct Slb1Decomposition {
    double uslb1;
    double slb1;
    /// 1/2 integral of t |dH_X - dH_Y|(dt) over the global distributions.
    double weighted_tv;
};

/// uSLB_1 = SLB_1 + 1/2 int t |dH_X - dH_Y|(dt), all three terms computed
/// independently.
Slb1Decomposition uslb1_decomposition(const UmSpace& x, const UmSpace& y);

/// Third-lower-bound cost matrix: Omega(x, y) is the Wasserstein distance
/// between the local distance distributions at x and y on (R>=0, Lambda_inf)
/// (ultra) or (R, Lambda_1) (classical, without the 1/2).
Matrix tlb_cost(const UmSpace& x, const UmSpace& y, double p, bool ultra, unsigned threads = 1);

}  // namespace ugw
