#pragma once

#include <string>
#include <vector>

#include "solab/model.hpp"

namespace solab {

struct EvolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int snapshot_stride = 50;  // steps between stored snapshots
    int diag_stride = 10;      // steps between diagnostic samples
};

/// Per-sample diagnostics. The residual columns compare centered finite
/// differences of (energy, momentum, potential term) against the analytic
/// rate formulas; they are filled by diagnostics_check.
struct DiagnosticsSample {
    double t = 0.0;
    double charge = 0.0;                  // N(psi) = (1/2) int |psi|^2
    std::vector<double> momentum;         // <psi, -i grad psi>
    double energy = 0.0;                  // H_V(t, psi)
    double energy_rate_residual = 0.0;    // |dH/dt - (1/2)<psi, dtV psi>|
    double ehrenfest_residual = 0.0;      // max_j |dP_j/dt + <psi, djV psi>|
    double potential_rate_residual = 0.0; // |d/dt (1/2 int V|psi|^2) - rate|
    double energy_bound_margin = 0.0;     // |H(0)| + t C~ - |H(t)|
    // analytic right-hand sides recorded during the run
    double rate_energy_rhs = 0.0;         // (1/2) <psi, dtV psi>
    std::vector<double> ehrenfest_rhs;    // -<psi, grad V psi>
    double rate_potential_rhs = 0.0;      // <i grad V psi, grad psi> + (1/2)<psi, dtV psi>
    double potential_half = 0.0;          // (1/2) int V |psi|^2
};

struct DiagnosticsRecord {
    std::vector<DiagnosticsSample> samples;
    bool stride_warning = false;  // differencing error dominates the residuals
};

struct FieldSnapshotSeries {
    std::vector<double> times;
    std::vector<ComplexField> fields;
};

struct RunResult {
    FieldSnapshotSeries snapshots;
    DiagnosticsRecord diagnostics;
    bool aborted = false;          // NaN detected; last valid state kept
    double abort_time = 0.0;
    std::string abort_reason;
};

/// One Strang step: half kinetic, full potential+nonlinearity phase at the
/// substep midpoint t + dt/2, half kinetic. Both substeps are modulus- or
/// L2-preserving, so charge is conserved to roundoff. The kinetic phase guard
/// dt * max|k|^2 <= pi is advisory (phase_guard_ok), not enforced.
ComplexField step(const ComplexField& psi, double t, double dt, const NlsModel& model);

bool phase_guard_ok(const EvolverConfig& cfg, const Grid& grid);

RunResult run(const ComplexField& psi0, const NlsModel& model, const EvolverConfig& config);

/// Fill residual columns of a record from its recorded series (centered
/// differences on interior samples, one-sided second order at the ends).
/// Needs at least 3 samples.
DiagnosticsRecord diagnostics_check(DiagnosticsRecord record);

/// Write the record as CSV with the documented column schema.
void write_diagnostics_csv(const std::string& path, const DiagnosticsRecord& record, int dim);

}  // namespace solab
