#pragma once

#include <string>
#include <vector>

#include "solab/modulate.hpp"
#include "solab/soliton.hpp"

namespace solab {

struct NotInTube : error {
    double final_residual;
    explicit NotInTube(double resid)
        : error("skew_project: Newton did not converge (not in tube), residual " +
                std::to_string(resid)),
          final_residual(resid) {}
};

/// psi = T_{a v gamma} (eta_mu + w) with w skew-orthogonal to the tangent
/// space: <w, i z_k> = 0 for the 2N+2 basis fields z_k at mu.
struct Decomposition {
    ModulationParams sigma;
    ComplexField w;             // co-moving frame fluctuation
    double w_h1 = 0.0;          // ||w||_H1
    double constraint_residual = 0.0;  // max_k |<w, i z_k>|
    bool converged = false;
    bool tube_warning = false;  // ||w||_H1 exceeded the tube radius delta
};

struct DecomposeOptions {
    double tube_delta = 0.3;
    double jacobian_step = 1e-6;
    int max_iterations = 50;
    // convergence at ||G||_inf <= tol_factor * ||psi||_L2
    double tol_factor = 1e-10;
    // Newton iterates with mu outside this interval are rejected
    double mu_min = 0.05;
    double mu_max = 20.0;
};

/// Damped Newton on G_k(sigma) = <T^-1 psi - eta_mu, i z_k(mu)> = 0.
Decomposition skew_project(const ComplexField& psi, const ModulationParams& sigma_guess,
                           const ProfileLibrary& library, const DecomposeOptions& opts = {});

/// alpha residuals of a parameter trajectory (centered differences inside,
/// one-sided at the ends; gamma unwrapped before differencing):
///   alpha_j      = da_j/dt - v_j
///   alpha_{N+j}  = -dv_j/dt / 2 - djV(t, a)
///   alpha_{2N+1} = mu - v^2/4 + (da/dt).v/2 - V(t, a) - dgamma/dt
///   alpha_{2N+2} = -dmu/dt
struct AlphaSample {
    double t = 0.0;
    std::vector<double> alpha;  // size 2N+2
    double sup_norm = 0.0;
};
struct AlphaSeries {
    std::vector<AlphaSample> samples;
    bool sampling_warning = false;  // differencing error estimate exceeds |alpha|
};
AlphaSeries alpha_from_trajectory(const std::vector<double>& times,
                                  const std::vector<ModulationParams>& sigmas,
                                  const Potential& potential);

/// Corrected modulation right-hand side: solves the tangent-space relations
/// for alpha with the fluctuation couplings handled by two fixed-point sweeps
/// from alpha = 0, then maps alpha back to (da, dv, dgamma, dmu).
EffectiveRhs corrected_rhs(const Decomposition& decomp, double t, const Potential& potential,
                           const ProfileLibrary& library);

/// C_mu(eta + w, eta) = E_mu(eta + w) - E_mu(eta),
/// E_mu(psi) = (1/2) int (|grad psi|^2 + mu |psi|^2) - F(psi).
double lyapunov_value(const Decomposition& decomp, const ProfileLibrary& library);
double energy_functional(const ComplexField& u, double mu, const Nonlinearity& nl);

/// L2-orthogonal projection onto X_mu = {w : <w, i z_k> = 0 for all k}.
ComplexField project_skew_orthogonal(const ComplexField& w, const TangentBasis& basis);

/// <w, L_mu w> after projecting w onto X_mu.
double coercivity_quadform(const ComplexField& w, const SolitonProfile& profile,
                           const Nonlinearity& nl, const TangentBasis& basis);

/// rho = min over X_mu of <w, L_mu w> / ||w||_H1^2 by inverse power iteration
/// on the H1-normalized generalized eigenproblem restricted to the
/// skew-orthogonal complement. Errors out when the estimate is not positive.
double rho_estimate(const SolitonProfile& profile, const Nonlinearity& nl,
                    const TangentBasis& basis);

/// Frame energy identity: relative residual of
/// E_mu(u) = H_V(psi) + ((v^2/4 + mu)/2) ||psi||^2 - (v/2) . <i psi, grad psi>
///           - (1/2) int V |psi|^2,  u = T^-1_{a v gamma} psi.
double frame_energy_identity_check(const ComplexField& psi, const Decomposition& decomp,
                                   const NlsModel& model, double t);

struct DecompositionSample {
    double t = 0.0;
    Decomposition decomposition;
    std::vector<double> alpha;  // filled by the scenario layer
    double lyapunov = 0.0;
};

void write_decomposition_csv(const std::string& path,
                             const std::vector<DecompositionSample>& series, int dim);

}  // namespace solab
