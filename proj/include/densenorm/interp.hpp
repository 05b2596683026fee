#pragma once

#include <array>
#include <vector>

#include "densenorm/errors.hpp"
#include "densenorm/moments.hpp"

namespace densenorm {

// Upsampling a 2x2 cell q to NxN by bilinear interpolation can be written as
//
//   Q' = q00*M00 + q01*M01 + q10*M10 + q11*M11
//
// where the four NxN basis matrices depend only on N:
//
//   M00[i][j] = (N-v_i)(N-v_j)/N^2      M01[i][j] = (N-v_i) v_j / N^2
//   M10[i][j] = v_i (N-v_j) / N^2      M11[i][j] = v_i v_j / N^2
//
// with sample positions v_k = k*N/(N-1), so v_0 = 0 and v_{N-1} = N land
// exactly on the cell corners. The matrices are computed once per N and every
// later cell costs four multiply-adds per output element.
struct BasisMatrices {
    int n = 0;
    std::vector<double> m00, m01, m10, m11;  // row-major n*n
    std::vector<double> v;                   // v_k, k in [0, n)
};

// n >= 2. Odd n is permitted here (the matrices are well defined); the even
// requirement belongs to the grid/densify layer, whose central crop needs it.
BasisMatrices precompute_basis(int n);

// Cell corner values in row-major order: q[0]=q00, q[1]=q01, q[2]=q10, q[3]=q11.
using CellCorners = std::array<double, 4>;

// Weighted sum of the cached basis matrices; out must hold n*n doubles.
void fast_interp_cell(const CellCorners& q, const BasisMatrices& basis, double* out);

// Same algebraic form, but the basis matrices are rebuilt on every call into
// caller scratch (resized as needed). Keeps the reformulation's cost visible
// without the one-off cache.
void reformulated_interp_cell(const CellCorners& q, int n, std::vector<double>& scratch,
                              double* out);

// Reference evaluation: per output element the full
// (1/N^2) * [N-v_i, v_i] q [N-v_j; v_j] product with v rebuilt per element.
// Deliberately unoptimised; the fast paths are validated against it.
void naive_bilinear_cell(const CellCorners& q, int n, double* out);

// Bilinear value of the cell at a continuous position (u, v) in [0, N]^2.
double bilinear_cell_at(const CellCorners& q, int n, double u, double v);

// Per-pixel normalization fields for one patch: interpolated means and
// interpolated reciprocal standard deviations. inv_sigma is applied as a
// multiply and must never be re-inverted; interpolation already happened in
// reciprocal space.
struct PixelMomentField {
    int n = 0;
    int channels = 0;
    std::vector<double> mu;         // [ch*n*n + i*n + j]
    std::vector<double> inv_sigma;  // same layout

    std::size_t plane_size() const { return static_cast<std::size_t>(n) * n; }
    double mu_at(int ch, int i, int j) const { return mu[ch * plane_size() + i * static_cast<std::size_t>(n) + j]; }
    double inv_sigma_at(int ch, int i, int j) const {
        return inv_sigma[ch * plane_size() + i * static_cast<std::size_t>(n) + j];
    }
};

// Densify a 3x3 statistics neighbourhood into per-pixel fields:
//  1. the four overlapping 2x2 corner cells of the 3x3 are each interpolated
//     to NxN,
//  2. the four results tile a 2Nx2N assembly (corner cell (a,b) -> block (a,b)),
//  3. the central window rows/cols [N/2, 3N/2) is cropped; it is exactly
//     aligned so that the centre pixel (N/2, N/2) carries the centre patch's
//     own statistic.
// The sigma path inverts all nine sigma entries first and interpolates the
// reciprocals (linear in 1/sigma, not in sigma). Requires even n; sigma
// entries must be > 0.
PixelMomentField densify(const Neighborhood3x3& neighborhood, const BasisMatrices& basis);

// Coarsen a field in place: values become constant over g x g blocks, each
// block taking its top-left sample. g must divide n; g = 1 is the identity.
void quantize_granularity(PixelMomentField& field, int granularity);

}  // namespace densenorm
