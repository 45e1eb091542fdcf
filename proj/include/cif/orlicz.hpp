#pragma once

// Orlicz (Luxemburg) norms for M(t) = t log(e + t), the 2-convexification,
// Lebesgue norms, and the L_2 / L_M membership ladder on T^d.
//
// Convention: the measure is Lebesgue measure on [-pi, pi)^d (total mass
// (2 pi)^d) and the gauge is the Luxemburg one, inf{lambda > 0 : int M(|f| / lambda) <= 1}.

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cif/quadrature.hpp"
#include "cif/torus_function.hpp"

namespace cif {

inline constexpr const char* kOrliczConvention =
    "luxemburg gauge, M(t)=t*log(e+t), Lebesgue measure on [-pi,pi)^d";

/// M(t) = t log(e + t).
double orlicz_young(double t);

/// Luxemburg norm of nonnegative samples |f| against quadrature weights.
/// Returns 0 when every sample vanishes; throws InvalidFunction on non-finite input.
double luxemburg_norm(std::span<const double> abs_values, std::span<const double> weights);

/// sum_i w_i M(a_i / lambda).
double orlicz_modular(std::span<const double> abs_values, std::span<const double> weights, double lambda);

double orlicz_norm(const TorusFunction& f, const QuadratureGrid& grid);
/// || |f|^2 ||_{L_M}^{1/2}.
double orlicz2_norm(const TorusFunction& f, const QuadratureGrid& grid);
double lebesgue_norm(const TorusFunction& f, const QuadratureGrid& grid, double p);

/// int f over [-pi, pi)^d and the integrals of its positive and negative parts.
struct SignedIntegrals {
    double total = 0.0;
    double positive = 0.0;
    double negative = 0.0; // integral of f_- = max(-f, 0), nonnegative
};
SignedIntegrals signed_integrals(const TorusFunction& f, const QuadratureGrid& grid);

struct LadderRung {
    int resolution = 0;
    double l2 = 0.0;
    double lm = 0.0;
};

struct MembershipVerdict {
    bool member = false;
    std::string status; // "converging", "diverging" or "inconclusive"
    double top_growth = 0.0; // relative change between the two finest rungs
};

struct MembershipReport {
    nlohmann::json function;
    std::vector<LadderRung> ladder;
    MembershipVerdict l2;
    MembershipVerdict lm;
    double cap = 0.0; // active sample cap, 0 when the family has none
};

/// Resolution ladder used by membership_report: 128..1024 per axis for d <= 2,
/// 32..256 for d = 3.
std::vector<int> membership_ladder(int d);

/// L_2 and L_M norms along the resolution ladder on plain trapezoidal grids.
/// Nodes at which a capped family sits on its cap are left out: they sample
/// the regularization, not f.  Growth above 5% per doubling between the two
/// finest rungs reads as divergence, agreement within 1% as convergence.
MembershipReport membership_report(const TorusFunction& f);

nlohmann::json to_json(const MembershipReport& report);

} // namespace cif
