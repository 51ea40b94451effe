#pragma once

#include <map>

#include "ncdx/matpoly.hpp"
#include "ncdx/oreop.hpp"
#include "ncdx/report.hpp"

namespace ncdx {

/// Generalized Airy operator M = D^N + Σ_{i=1}^{N-1} alpha_i D^{N-i} + alpha0 x.
/// Direct computation gives M(x, Dx) psi(x+z) = -alpha0 z psi(x+z), so the
/// engine's spectral weight is w(z) = -alpha0 z (equal to z for the classical
/// normalization alpha0 = -1), and a kernel element at spectral value lambda
/// carries the argument shift lambda_hat = -lambda/alpha0.
struct AiryContext {
    int N = 2;
    Rat alpha0 = Rat(-1);
    std::vector<Rat> alphas; // alpha_1 .. alpha_{N-1}

    void validate() const;
    Rat shift_of(const Rat &lambda) const { return -(lambda / alpha0); }
    /// w(z) = -alpha0 z as a rational function of z.
    RatFunc w_poly() const;
};

/// Formal symbol expression Σ psi^(j)(x + lambda_hat) * c_{lambda,j}(x):
/// one generic kernel symbol psi per spectral value (the kernel index i of
/// the paper never enters any coefficient), derivative index j kept < N by
/// the Airy ODE.
class AirySymbolExpr {
public:
    AirySymbolExpr(int n, int cols = 1) : n_(n), cols_(cols) {}

    int n() const { return n_; }
    int cols() const { return cols_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<std::pair<Rat, int>, Mat> &terms() const { return terms_; }

    void add_term(const Rat &lambda, int j, const Mat &coeff);
    AirySymbolExpr operator+(const AirySymbolExpr &o) const;
    AirySymbolExpr scale_left(const Mat &a) const;    // a(x) * expr
    AirySymbolExpr scale(const RatFunc &f) const;

    std::string str() const;

private:
    int n_, cols_;
    std::map<std::pair<Rat, int>, Mat> terms_; // (lambda, j) -> n x cols over Q(x)
};

/// Rewrites every derivative index >= N with
/// psi^(j)(y) = -Σ alpha_i psi^(j-i)(y) - alpha0 (y psi^(j-N)(y) + (j-N) psi^(j-N-1)(y)),
/// y = x + lambda_hat; idempotent.
AirySymbolExpr airy_reduce(const AirySymbolExpr &e, const AiryContext &ctx);

AirySymbolExpr symbol_derivative(const AirySymbolExpr &e, const AiryContext &ctx);

/// Σ A_k(x) (d/dx)^k applied to the expression, reduced.
AirySymbolExpr symbol_apply(const OreOp &p, const AirySymbolExpr &e, const AiryContext &ctx);

/// One Z_N-orbit of kernel elements: Σ_j psi^(j)(x, lambda) p_j(x) for the N
/// choices of the kernel symbol. ps holds the N polynomial columns p_0..p_{N-1}.
struct AiryOrbitSpec {
    Rat lambda;
    std::vector<Mat> ps; // N columns, n x 1, polynomial in x
};

AirySymbolExpr orbit_to_expr(const AiryOrbitSpec &spec, const AiryContext &ctx);

/// The orbit's N elements. The formal symbol is kernel-index free, so they
/// share the same coefficient data; sigma^N = identity.
std::vector<AirySymbolExpr> sigma_orbit(const AiryOrbitSpec &spec, const AiryContext &ctx);

/// M_Ai(x, Dx) I_n as an operator.
OreOp m_ai_op(const AiryContext &ctx, int n);
/// q(M_Ai(x, Dx)).
OreOp q_of_m_ai(const MatPolynomial &q, const AiryContext &ctx);

/// Kernel basis of q(M_Ai) as nd orbit specs (each expanding to N elements)
/// built from the Jordan chains of q at every root of det q(t);
/// IrrationalSpectrum when det q has a non-rational root. Every produced
/// element is checked to be annihilated by q(M_Ai).
std::vector<AiryOrbitSpec> airy_kernel_basis(const MatPolynomial &q, const AiryContext &ctx);

/// The unique monic operator of order dN (d = specs/n) over Q(x) whose
/// kernel contains every expanded orbit element, by an exact linear solve on
/// symbol coefficients. DegenerateKernel when the system is singular;
/// KernelMismatch when an element is not killed by q(M_Ai).
OreOp operator_from_kernel_airy(const std::vector<AiryOrbitSpec> &specs, const AiryContext &ctx,
                                const MatPolynomial &q);

/// b-map for the Airy pair: x^i D^k C -> Mtilde(z, Dz)^i (-Dz)^k C with
/// Mtilde = -(1/alpha0)[(-Dz)^N + Σ alpha_i (-Dz)^{N-i}] - z, which makes b a
/// homomorphism with b(M_Ai(x, Dx)) = -alpha0 z for every context and equals
/// the z-side Airy operator in the classical normalization.
OreOp b_map_airy(const OreOp &p, const AiryContext &ctx);
OreOp airy_dual_generator(const AiryContext &ctx, int n);

/// q(w(z)) as a matrix polynomial in z.
Mat q_of_w(const MatPolynomial &q, const AiryContext &ctx);

/// Bivariate wave expression Σ_j psi^(j)(x+z) A_j(x,z), j < N.
struct AiryBivariateExpr {
    int n = 0;
    std::vector<Mat> blocks; // N blocks, n x n over Q(x, z)

    bool is_zero() const;
    AiryBivariateExpr operator-(const AiryBivariateExpr &o) const;
    std::string str() const;
};

AiryBivariateExpr airy_wave(const AiryContext &ctx, int n); // Psi_Ai = psi(x+z) I_n
AiryBivariateExpr airy_reduce(const AiryBivariateExpr &e, const AiryContext &ctx);
AiryBivariateExpr biv_derivative(const AiryBivariateExpr &e, Var v, const AiryContext &ctx);
AiryBivariateExpr biv_apply_left(const OreOp &p, const AiryBivariateExpr &e, const AiryContext &ctx);
AiryBivariateExpr biv_scale_left(const Mat &a, const AiryBivariateExpr &e);
AiryBivariateExpr biv_mul_right(const AiryBivariateExpr &e, const Mat &a);
/// Signed right action of a z-operator per the bimodule convention.
AiryBivariateExpr biv_apply_right(const AiryBivariateExpr &e, const OreOp &s, const AiryContext &ctx);

struct AiryBundle {
    int n = 0;
    AiryContext ctx;
    std::vector<Mat> q_coeffs; // coefficients of q
    OreOp P, Q, L, PQ;         // L = q(M_Ai) = Q∘P
    OreOp Pp, Qp;
    MPoly d;                   // g = d^2 I_n
    OreOp bP, bQ;
    Mat qw;                    // q(w(z))
    OreOp dual;                // q(w)^{-1} ∘ b(Q') ∘ b(P')
    AiryBivariateExpr phi;     // P applied to Psi_Ai
    VerificationReport report;

    MatPolynomial q_poly() const { return MatPolynomial(n, q_coeffs); }
};

AiryBundle darboux_airy(const MatPolynomial &q, const std::vector<AiryOrbitSpec> &specs,
                        const AiryContext &ctx);

VerificationReport verify_airy(const AiryBundle &bundle);

} // namespace ncdx
