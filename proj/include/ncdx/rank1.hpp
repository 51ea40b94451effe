#pragma once

#include <optional>

#include "ncdx/oreop.hpp"
#include "ncdx/report.hpp"

namespace ncdx {

/// One kernel basis element e^{alpha x} p(x) with a vector polynomial p.
struct QuasiKernelEntry {
    Rat alpha;
    std::vector<MPoly> p; // n polynomials in x
};

/// Exact description of a quasipolynomial kernel subspace: kn basis elements
/// spanning the intended vector kernel of a monic order-k operator.
struct QuasiKernelSpec {
    int n = 0;
    std::vector<QuasiKernelEntry> entries;

    int k() const { return n == 0 ? 0 : static_cast<int>(entries.size()) / n; }
};

/// e^{alpha x} is carried as u^(alpha m) with m the lcm of all exponent
/// denominators in the spec, so that every basis element lives in Q(x, u)
/// with derivation u' = u/m.
struct KernelColumns {
    std::vector<Mat> columns; // n x 1 each
    Rat u_scale;              // 1/m
};
KernelColumns kernel_columns(const QuasiKernelSpec &spec);

/// Wronski matrix of a tuple of column blocks: derivative rows 0..k-1 of the
/// horizontal concatenation, k = total columns / n.
Mat wronski(const std::vector<Mat> &fs, int n);

/// Basis arrangement into blocks F_1..F_k such that every leading principal
/// minor chain of the Wronskian is nonzero. DegenerateKernel when det W = 0.
struct Arrangement {
    std::vector<int> perm;      // column permutation applied to the spec order
    std::vector<Mat> fblocks;   // F_1..F_k, each n x n
    std::vector<Mat> columns;   // permuted basis columns
    int n = 0;
    int k = 0;
};
Arrangement nondegenerate_arrange(const QuasiKernelSpec &spec);

/// The unique monic operator of order k with vector kernel spanned by the
/// spec, computed both by a Wronskian linear solve and as the product
/// (D - b_k)...(D - b_1) with quasideterminant factors; InternalMismatch if
/// the two routes disagree, and the coefficients are checked to be u-free
/// (rational in x).
OreOp operator_from_kernel_rank1(const QuasiKernelSpec &spec);

/// Scalar-shape constant-coefficient annihilator h(D) I_n with
/// h = Π (T - alpha)^(1 + max deg p) over the exponents of the spec.
OreOp minimal_constant_annihilator(const QuasiKernelSpec &spec);

/// Homomorphic image under b(D_x) = z, b(x) = -D_z, b(W) = W, applied
/// monomial-wise to the normal ordering x^i D^k C -> (-D_z)^i z^k C.
OreOp b_map_rank1(const OreOp &p);

/// Wave matrices: Phi = e^{xz} M(x, z) is stored as M.
/// Left action of an x-operator: D_x acts as M -> z M + dM/dx.
Mat wave_apply_left(const OreOp &p, const Mat &m);
/// Signed right action of a z-operator: M . (a Dz^k) = (-1)^k (x + d/dz)^k (M a).
Mat wave_apply_right(const Mat &m, const OreOp &s);

struct Rank1Bundle {
    int n = 0;
    OreOp P, Q, L, PQ; // x-side operators, L = Q∘P, PQ the transformed operator
    OreOp Pp, Qp;      // polynomial pair with L = Q'∘g^{-1}∘P'
    MPoly d;           // g = d^2 I_n
    OreOp bP, bQ;      // z-side images of P', Q'
    Mat bL;            // b(L), a matrix polynomial in z
    OreOp dual;        // b(L)^{-1} ∘ b(Q') ∘ b(P')
    Mat phi;           // wave matrix of Phi = P(e^{xz} I_n)
    VerificationReport report;
};

/// Full pipeline: P from the kernel, L supplied (constant-coefficient,
/// invertible leading coefficient, annihilating the kernel) or synthesized,
/// Q by right division (NonzeroRemainder when the kernel is not inside
/// vker L), denominator clearing, b-images, dual operator, wave function and
/// the exact verification report.
Rank1Bundle darboux_rank1(const QuasiKernelSpec &spec, const std::optional<OreOp> &l_opt = std::nullopt);

/// Evaluates both spectral identities (and the supporting factorization
/// contracts) on the bundle; residuals are exact.
VerificationReport verify_rank1(const Rank1Bundle &bundle);

std::string mat_str(const Mat &m);

} // namespace ncdx
