#pragma once

#include <functional>

#include "solab/field.hpp"

namespace solab {

using FieldOp = std::function<ComplexField(const ComplexField&)>;

struct KrylovResult {
    ComplexField x;
    double residual = 0.0;  // ||A x - b|| / ||b||
    int iterations = 0;
    bool converged = false;
};

/// Preconditioned conjugate gradient for A symmetric positive definite w.r.t.
/// the real inner product <.,.>. precond must be SPD; project, when given, is
/// applied to b, the initial residual and every preconditioned direction, which
/// restricts the solve to an invariant subspace (A must map it to itself).
KrylovResult conjugate_gradient(const FieldOp& A, const ComplexField& b, const FieldOp& precond,
                                const FieldOp& project, double rel_tol, int max_iter);

/// Preconditioned MINRES for A symmetric (possibly indefinite), SPD precond.
KrylovResult minres(const FieldOp& A, const ComplexField& b, const FieldOp& precond,
                    double rel_tol, int max_iter);

}  // namespace solab
