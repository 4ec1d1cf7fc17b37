#pragma once

#include "attbound/types.hpp"

namespace attbound {

/// Skew mapping: hat(v) * y == v.cross(y) for all y.
Mat3 hat(const Vec3& v);

/// Inverse of hat. The input is symmetrized as (A - A^T)/2 first; inputs
/// whose symmetric part exceeds `tol` (relative to the matrix scale) are
/// rejected.
Vec3 vee(const Mat3& a, double tol = 1e-9);

/// Exponential map so(3) -> SO(3), closed-form Rodrigues evaluation with a
/// series branch below ||f|| = 1e-6.
Mat3 exp_so3(const Vec3& f);

/// Logarithm map SO(3) -> so(3), principal branch (||result|| <= pi).
/// At rotation angle exactly pi the axis sign is ambiguous; the axis whose
/// first nonzero component is positive is returned.
Vec3 log_so3(const Mat3& c);

/// True when ||C^T C - I||_F <= tol and det(C) > 0.
bool is_rotation(const Mat3& c, double tol = 1e-9);

/// Throws DegenerateGeometryError when is_rotation fails. `label` names the
/// offending quantity in the message.
void require_rotation(const Mat3& c, const std::string& label, double tol = 1e-9);

/// True when M is square, symmetric to `sym_tol` (relative) and all
/// eigenvalues are positive.
bool is_spd(const Eigen::MatrixXd& m, double sym_tol = 1e-12);

/// Principal (symmetric positive definite) matrix square root, computed by
/// symmetric eigendecomposition. Fails when the smallest eigenvalue is
/// <= 1e-14 times the largest.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m);

/// Inverse principal square root, same guards as spd_sqrt.
Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& m);

struct QrFactors {
    Mat3 q;  // orthogonal, det +1
    Mat3 r;  // upper triangular
};

/// QR decomposition of an invertible 3x3 matrix, normalized so R has a
/// positive diagonal; if that leaves det(Q) = -1 the last column of Q and
/// last row of R are flipped so Q lands in SO(3). Deterministic: identical
/// input yields bit-identical output.
QrFactors qr_positive(const Mat3& l);

struct SpdProductEigen {
    Eigen::MatrixXd v;            // nonsingular, A*B = v^{-1} * diag(eigenvalues) * v
    Eigen::VectorXd eigenvalues;  // all positive, ascending
};

/// Diagonalizes the (generally non-symmetric) product A*B of two SPD
/// matrices: V = Q^T A^{-1/2} where Q diagonalizes A^{1/2} B A^{1/2}.
/// The eigenvalues are guaranteed real and positive.
SpdProductEigen diagonalize_spd_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace attbound
