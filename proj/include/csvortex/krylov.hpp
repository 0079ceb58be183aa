#pragma once

// Matrix-free Krylov solvers on Fields: preconditioned conjugate gradients
// for the definite case and preconditioned MINRES as the symmetric
// indefinite fallback. Operators and preconditioners are any callables
// Field -> Field; preconditioners must be SPD.

#include <functional>

#include "csvortex/field.hpp"

namespace csvortex {

struct LinearSolveStalled : std::runtime_error {
  explicit LinearSolveStalled(const std::string& what) : std::runtime_error(what) {}
};

struct KrylovResult {
  Field x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
  bool indefinite = false;  // CG only: operator found not positive definite
};

template <class Op, class Prec>
KrylovResult pcg(const Op& A, const Field& b, const Prec& M, double rel_tol,
                 int max_iter) {
  KrylovResult out;
  out.x = Field(b.grid());
  Field r = b;
  const double bnorm = l2_norm(b);
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  Field z = M(r);
  Field p = z;
  double rz = inner(r, z);
  for (int it = 0; it < max_iter; ++it) {
    Field Ap = A(p);
    const double pAp = inner(p, Ap);
    if (pAp <= 0.0) {
      out.indefinite = true;
      out.iterations = it;
      out.rel_residual = l2_norm(r) / bnorm;
      return out;
    }
    const double alpha = rz / pAp;
    out.x += alpha * p;
    r -= alpha * Ap;
    const double rel = l2_norm(r) / bnorm;
    if (rel <= rel_tol) {
      out.converged = true;
      out.iterations = it + 1;
      out.rel_residual = rel;
      return out;
    }
    z = M(r);
    const double rz_new = inner(r, z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  out.iterations = max_iter;
  out.rel_residual = l2_norm(r) / bnorm;
  return out;
}

/// Preconditioned MINRES (Elman-Silvester-Wathen formulation). Handles
/// symmetric indefinite operators; requires an SPD preconditioner.
template <class Op, class Prec>
KrylovResult minres(const Op& A, const Field& b, const Prec& M, double rel_tol,
                    int max_iter) {
  KrylovResult out;
  out.x = Field(b.grid());
  const double bnorm = l2_norm(b);
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  Field v_prev(b.grid());
  Field v = b;
  Field z = M(v);
  double gamma = std::sqrt(inner(z, v));
  double gamma_prev = 1.0;
  double eta = gamma;
  const double eta0 = gamma;
  double s_prev = 0.0, s = 0.0, c_prev = 1.0, c = 1.0;
  Field w(b.grid()), w_prev(b.grid());

  for (int it = 0; it < max_iter; ++it) {
    if (gamma == 0.0) break;
    Field zj = (1.0 / gamma) * z;
    Field Az = A(zj);
    const double delta = inner(Az, zj);
    Field v_next = Az - (delta / gamma) * v - (gamma / gamma_prev) * v_prev;
    Field z_next = M(v_next);
    const double ip = inner(z_next, v_next);
    const double gamma_next = std::sqrt(std::max(ip, 0.0));
    const double a0 = c * delta - c_prev * s * gamma;
    const double a1 = std::sqrt(a0 * a0 + gamma_next * gamma_next);
    const double a2 = s * delta + c_prev * c * gamma;
    const double a3 = s_prev * gamma;
    if (a1 == 0.0) break;
    c_prev = c;
    s_prev = s;
    c = a0 / a1;
    s = gamma_next / a1;
    Field w_next = (1.0 / a1) * (zj - a3 * w_prev - a2 * w);
    out.x += (c * eta) * w_next;
    eta = -s * eta;

    v_prev = v;
    v = v_next;
    w_prev = w;
    w = w_next;
    gamma_prev = gamma;
    gamma = gamma_next;
    z = z_next;

    out.iterations = it + 1;
    if (std::abs(eta) / eta0 <= rel_tol) {
      out.converged = true;
      break;
    }
  }
  // report the true residual, not the preconditioned estimate
  out.rel_residual = l2_norm(b - A(out.x)) / bnorm;
  out.converged = out.converged || out.rel_residual <= rel_tol * 10.0;
  return out;
}

/// CG first, MINRES on indefiniteness; throws LinearSolveStalled if neither
/// reaches the tolerance.
template <class Op, class Prec>
Field symmetric_solve(const Op& A, const Field& b, const Prec& M,
                      double rel_tol, int max_iter, const char* context) {
  KrylovResult r = pcg(A, b, M, rel_tol, max_iter);
  if (r.converged) return r.x;
  KrylovResult m = minres(A, b, M, rel_tol, max_iter);
  if (m.converged) return m.x;
  throw LinearSolveStalled(std::string(context) +
                           ": inner solve stalled (rel residual " +
                           std::to_string(m.rel_residual) +
                           (r.indefinite ? ", operator indefinite)" : ")"));
}

}  // namespace csvortex
