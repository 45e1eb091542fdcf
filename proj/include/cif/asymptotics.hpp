#pragma once

// Executable form of the trace-free integration formula on T^d:
//
//   lim_{n -> inf} n mu(n, T_+-) = Vol(S^{d-1}) / (d (2 pi)^d) * int f_+-,
//   T = (1 - Laplacian)^{-d/4} M_f (1 - Laplacian)^{-d/4},
//
// checked on a ladder of Fourier-lattice truncations, plus the Cwikel-type
// constant probe and the L_2 blow-up contrast for |x|^-1.

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "cif/seqcore.hpp"
#include "cif/torus_function.hpp"

namespace cif {

/// Vol(S^{d-1}) / (d (2 pi)^d) for d in {1, 2, 3}.
double weyl_constant(int d);

/// Default relative tolerances by run type.
inline constexpr double kToleranceDiagonal = 0.01;
inline constexpr double kToleranceMatrix1d = 0.05;
inline constexpr double kToleranceMatrix2d = 0.15;
inline constexpr double kToleranceSingular = 0.20;

struct CifOptions {
    /// Relative tolerance of the verdicts; 0 picks the default for the run type.
    double tolerance = 0.0;
    int oversample = 4;
    /// Each signed part is cut to its first floor(spectral_fraction * dim)
    /// entries before the limit fit.  The top of a truncated spectrum is
    /// distorted by the lattice cutoff (for 2 + cos x the last third already
    /// falls to half the limit), so only the bottom of the spectrum is used.
    double spectral_fraction = 0.125;
    /// Grid resolution per axis for the target integrals (0: 1024, or 128 for d = 3).
    int quadrature_resolution = 0;
    /// Use the closed-form diagonal spectrum for constant f (no matrix build).
    bool fast_diagonal = true;
    /// Rungs evaluated concurrently.
    int jobs = 1;
    /// Keep the full signed spectra in the report (for CSV emission).
    bool keep_spectra = false;
};

/// Eigenvalues with |lambda| <= kZeroEigenTol * max |lambda| count as zero.
inline constexpr double kZeroEigenTol = 1e-13;

struct PartEstimate {
    AsymptoticsEstimate estimate;
    std::size_t count = 0;      // number of nonzero eigenvalues of this sign
    std::size_t fit_length = 0; // prefix handed to the estimator
    bool finite_rank = false;   // prefix too short to fit; estimate reported as 0
    double max_tail = 0.0;      // max over the fitted prefix of (n + 1) mu(n)
};

struct CifRung {
    double cutoff = 0.0;
    std::size_t dim = 0;
    PartEstimate positive;
    PartEstimate negative;
    SingularValueSeq positive_spectrum; // filled when keep_spectra is set
    SingularValueSeq negative_spectrum;
};

struct Extrapolation {
    double value = 0.0;
    bool richardson = false; // whether the cross-rung step was applied
};

struct CifReport {
    nlohmann::json function;
    int d = 1;
    std::vector<double> schedule;
    bool fast_path = false;
    std::vector<CifRung> rungs;
    double integral_pos = 0.0;
    double integral_neg = 0.0;
    double target_pos = 0.0;
    double target_neg = 0.0;
    Extrapolation extrapolated_pos;
    Extrapolation extrapolated_neg;
    double dixmier_pos = 0.0; // log-mean cross-check on the last rung, not a verdict input
    double dixmier_neg = 0.0;
    double tolerance = 0.0;
    bool verdict_pos = false;
    bool verdict_neg = false;
    CifOptions options;

    [[nodiscard]] bool pass() const noexcept { return verdict_pos && verdict_neg; }
};

/// |extrapolated - target| <= tolerance * max(target, 0.05).
bool within_tolerance(double extrapolated, double target, double tolerance);

/// Cross-rung extrapolation: the last-rung estimate, refined by one Richardson
/// step in the truncation scale 1 / R when the last three rungs move
/// monotonically and contract at least as fast as that model predicts.
Extrapolation extrapolate_rungs(const std::vector<double>& cutoffs, const std::vector<double>& estimates);

/// Positive- and negative-part limit estimates per cutoff against the Weyl targets.
/// Throws InvalidFunction for complex f, InvalidParameter for a schedule that is
/// not strictly increasing with at least three entries.  Failures inside a rung
/// are rethrown as BuildFailure naming the cutoff.
CifReport cif_check(const TorusFunction& f, const std::vector<double>& schedule, const CifOptions& options = {});

nlohmann::json to_json(const CifReport& report);

// ------------------------------------------------------------- Cwikel probe

inline constexpr const char* kCwikelConvention =
    "ratio = ||P M_f (1-Lap)^{-d/4} P||_{2,inf} / ||f||_{L_M^(2)}; weak norm sup_k (k+1)^{1/2} mu(k)";

struct CwikelRow {
    double cutoff = 0.0;
    std::size_t dim = 0;
    double weak_norm = 0.0;
    double ratio = 0.0;
};

struct CwikelReport {
    nlohmann::json function;
    double orlicz2 = 0.0;
    std::vector<CwikelRow> rows;
    double max_ratio = 0.0;
};

CwikelReport cwikel_probe(const TorusFunction& f, const std::vector<double>& schedule, int oversample = 4);
nlohmann::json to_json(const CwikelReport& report);

// ------------------------------------------------------ L_2 blow-up contrast

struct BlowupRow {
    double cutoff = 0.0;
    std::size_t dim = 0;
    double hs_spike = 0.0;    // ||P M_f (1-Lap)^{-1} P||_HS for f = min(|x|^-1, cap)
    double hs_growth = 0.0;   // relative to the previous rung
    double hs_constant = 0.0; // same for f = 1, for contrast
    double est_pos = 0.0;     // symmetric-form positive-part estimate
};

struct BlowupReport {
    double cap = 0.0;
    std::vector<BlowupRow> rows;
    double target = 0.0;
    double extrapolated = 0.0;
    double min_growth_required = 0.05;
    double tolerance = 0.20;
    bool hs_blowup = false;   // every rung grows by at least min_growth_required
    bool symmetric_ok = false; // |extrapolated - target| within tolerance
};

BlowupReport l2_blowup_probe(int d, double cap, const std::vector<double>& schedule, const CifOptions& options = {});
nlohmann::json to_json(const BlowupReport& report);

} // namespace cif
