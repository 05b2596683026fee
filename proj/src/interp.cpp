#include "densenorm/interp.hpp"

#include <cstddef>
#include <string>

namespace densenorm {

BasisMatrices precompute_basis(int n) {
    if (n < 2) throw Error(Errc::odd_patch_size, "basis needs n >= 2, got " + std::to_string(n));

    BasisMatrices b;
    b.n = n;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    b.m00.resize(nn);
    b.m01.resize(nn);
    b.m10.resize(nn);
    b.m11.resize(nn);
    b.v.resize(n);

    const double dn = static_cast<double>(n);
    for (int k = 0; k < n; ++k) b.v[k] = static_cast<double>(k) * dn / (dn - 1.0);

    const double inv_n2 = 1.0 / (dn * dn);
    for (int i = 0; i < n; ++i) {
        const double vi = b.v[i];
        const double wi = dn - vi;
        double* r00 = b.m00.data() + static_cast<std::size_t>(i) * n;
        double* r01 = b.m01.data() + static_cast<std::size_t>(i) * n;
        double* r10 = b.m10.data() + static_cast<std::size_t>(i) * n;
        double* r11 = b.m11.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double vj = b.v[j];
            const double wj = dn - vj;
            r00[j] = wi * wj * inv_n2;
            r01[j] = wi * vj * inv_n2;
            r10[j] = vi * wj * inv_n2;
            r11[j] = vi * vj * inv_n2;
        }
    }
    return b;
}

void fast_interp_cell(const CellCorners& q, const BasisMatrices& basis, double* out) {
    const std::size_t nn = static_cast<std::size_t>(basis.n) * basis.n;
    const double q00 = q[0], q01 = q[1], q10 = q[2], q11 = q[3];
    const double* m00 = basis.m00.data();
    const double* m01 = basis.m01.data();
    const double* m10 = basis.m10.data();
    const double* m11 = basis.m11.data();
    for (std::size_t p = 0; p < nn; ++p)
        out[p] = q00 * m00[p] + q01 * m01[p] + q10 * m10[p] + q11 * m11[p];
}

void reformulated_interp_cell(const CellCorners& q, int n, std::vector<double>& scratch,
                              double* out) {
    if (n < 2) throw Error(Errc::odd_patch_size, "cell interpolation needs n >= 2");
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    scratch.resize(4 * nn + 2 * static_cast<std::size_t>(n));
    double* m00 = scratch.data();
    double* m01 = m00 + nn;
    double* m10 = m01 + nn;
    double* m11 = m10 + nn;
    double* va = m11 + nn;  // sample positions, one division per axis node
    double* wa = va + n;    // complementary weights

    const double dn = static_cast<double>(n);
    const double inv_n2 = 1.0 / (dn * dn);
    for (int k = 0; k < n; ++k) {
        va[k] = static_cast<double>(k) * dn / (dn - 1.0);
        wa[k] = dn - va[k];
    }

    const double q00 = q[0], q01 = q[1], q10 = q[2], q11 = q[3];
    for (int i = 0; i < n; ++i) {
        const double wi = wa[i] * inv_n2;
        const double vi = va[i] * inv_n2;
        const std::size_t row = static_cast<std::size_t>(i) * n;
        double* r00 = m00 + row;
        double* r01 = m01 + row;
        double* r10 = m10 + row;
        double* r11 = m11 + row;
        double* dst = out + row;
        // Build this row of all four matrices, then consume it while cache-hot.
        for (int j = 0; j < n; ++j) {
            r00[j] = wi * wa[j];
            r01[j] = wi * va[j];
            r10[j] = vi * wa[j];
            r11[j] = vi * va[j];
        }
        for (int j = 0; j < n; ++j)
            dst[j] = q00 * r00[j] + q01 * r01[j] + q10 * r10[j] + q11 * r11[j];
    }
}

void naive_bilinear_cell(const CellCorners& q, int n, double* out) {
    if (n < 2) throw Error(Errc::odd_patch_size, "cell interpolation needs n >= 2");
    const double dn = static_cast<double>(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double vi = static_cast<double>(i) * dn / (dn - 1.0);
            const double vj = static_cast<double>(j) * dn / (dn - 1.0);
            const double left0 = (dn - vi) * q[0] + vi * q[2];   // column j = 0 weights
            const double left1 = (dn - vi) * q[1] + vi * q[3];   // column j = 1 weights
            out[static_cast<std::size_t>(i) * n + j] = ((dn - vj) * left0 + vj * left1) / (dn * dn);
        }
    }
}

double bilinear_cell_at(const CellCorners& q, int n, double u, double v) {
    const double dn = static_cast<double>(n);
    return ((dn - u) * ((dn - v) * q[0] + v * q[1]) + u * ((dn - v) * q[2] + v * q[3])) / (dn * dn);
}

namespace {

// Interpolates the four corner cells of one 3x3 plane into a 2Nx2N assembly,
// then crops rows/cols [N/2, 3N/2) into dst (NxN).
void densify_plane(const double plane9[9], const BasisMatrices& basis,
                   std::vector<double>& assembly, double* dst) {
    const int n = basis.n;
    const std::size_t two_n = 2 * static_cast<std::size_t>(n);
    assembly.resize(two_n * two_n);

    std::vector<double> block(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const CellCorners q{plane9[a * 3 + b], plane9[a * 3 + b + 1],
                                plane9[(a + 1) * 3 + b], plane9[(a + 1) * 3 + b + 1]};
            fast_interp_cell(q, basis, block.data());
            for (int i = 0; i < n; ++i) {
                double* row = assembly.data() + (static_cast<std::size_t>(a) * n + i) * two_n +
                              static_cast<std::size_t>(b) * n;
                const double* src = block.data() + static_cast<std::size_t>(i) * n;
                for (int j = 0; j < n; ++j) row[j] = src[j];
            }
        }
    }

    const int off = n / 2;
    for (int i = 0; i < n; ++i) {
        const double* row = assembly.data() + (static_cast<std::size_t>(i) + off) * two_n + off;
        for (int j = 0; j < n; ++j) dst[static_cast<std::size_t>(i) * n + j] = row[j];
    }
}

}  // namespace

PixelMomentField densify(const Neighborhood3x3& neighborhood, const BasisMatrices& basis) {
    const int n = basis.n;
    if (n < 2 || n % 2 != 0)
        throw Error(Errc::odd_patch_size,
                    "densify needs an even patch size for the central crop, got " + std::to_string(n));
    if (neighborhood.channels <= 0)
        throw Error(Errc::empty_patch, "densify: neighbourhood has no channels");

    PixelMomentField field;
    field.n = n;
    field.channels = neighborhood.channels;
    field.mu.resize(field.plane_size() * neighborhood.channels);
    field.inv_sigma.resize(field.plane_size() * neighborhood.channels);

    std::vector<double> assembly;
    double plane[9];
    for (int ch = 0; ch < neighborhood.channels; ++ch) {
        for (int cell = 0; cell < 9; ++cell)
            plane[cell] = neighborhood.mu[cell * neighborhood.channels + ch];
        densify_plane(plane, basis, assembly, field.mu.data() + ch * field.plane_size());

        for (int cell = 0; cell < 9; ++cell) {
            const double s = neighborhood.sigma[cell * neighborhood.channels + ch];
            if (!(s > 0.0))
                throw Error(Errc::non_positive_sigma,
                            "densify: sigma entry " + std::to_string(s) + " is not positive");
            plane[cell] = 1.0 / s;  // interpolate reciprocals, never re-invert
        }
        densify_plane(plane, basis, assembly, field.inv_sigma.data() + ch * field.plane_size());
    }
    return field;
}

void quantize_granularity(PixelMomentField& field, int granularity) {
    const int n = field.n;
    if (granularity < 1 || n % granularity != 0)
        throw Error(Errc::bad_granularity, "granularity " + std::to_string(granularity) +
                                               " must be >= 1 and divide the patch size " +
                                               std::to_string(n));
    if (granularity == 1) return;

    const int g = granularity;
    for (int ch = 0; ch < field.channels; ++ch) {
        for (double* plane : {field.mu.data() + ch * field.plane_size(),
                              field.inv_sigma.data() + ch * field.plane_size()}) {
            for (int bi = 0; bi < n; bi += g) {
                for (int bj = 0; bj < n; bj += g) {
                    const double value = plane[static_cast<std::size_t>(bi) * n + bj];
                    for (int i = bi; i < bi + g; ++i)
                        for (int j = bj; j < bj + g; ++j)
                            plane[static_cast<std::size_t>(i) * n + j] = value;
                }
            }
        }
    }
}

}  // namespace densenorm
