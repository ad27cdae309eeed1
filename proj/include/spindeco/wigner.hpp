// wigner.hpp - spherical-tensor (Wigner) harmonics of spin operators and phase-space fields
#pragma once

#include "spindeco/io.hpp"
#include "spindeco/su2.hpp"

#include <Eigen/Dense>

#include <complex>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace spindeco::wigner {

using su2::HalfInt;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Matrix row/column i corresponds to magnetic number m = i - j.

struct HarmonicSpectrum {
    HalfInt j;
    std::vector<Complex> coeffs;  // index l*l + l + m, 0 <= l <= 2j

    HarmonicSpectrum() = default;
    explicit HarmonicSpectrum(HalfInt spin);

    int lmax() const { return j.twice; }
    static std::size_t index(int l, int m) {
        return static_cast<std::size_t>(l * l + l + m);
    }
    Complex& operator()(int l, int m) { return coeffs[index(l, m)]; }
    const Complex& operator()(int l, int m) const { return coeffs[index(l, m)]; }

    // Sum of |W^(l,m)|^2, equal to tr(A^dagger A).
    double norm2() const;
};

// Real CG vectors u^(l,m)_r = sqrt((2l+1)/(2j+1)) <j r; l m | j r+m> for fixed m,
// stacked over l = |m|..2j. Entry k sits at matrix element (first_row + k, first_row + k + m).
struct ChannelBlock {
    int m = 0;
    int n = 0;
    int first_row = 0;
    std::vector<double> u;  // u[(l - |m|) * n + k]

    const double* vec(int l) const { return u.data() + static_cast<std::size_t>(l - std::abs(m)) * n; }
};

// Double-precision block from inverse iteration on the Casimir tridiagonal; cached for small j.
std::shared_ptr<const ChannelBlock> channel_block(HalfInt j, int m);

// <j j; l 0 | j j>, the Husimi/P-symbol weight.
double coherent_weight(HalfInt j, int l);

HarmonicSpectrum to_harmonics(const Matrix& A, HalfInt j);
Matrix from_harmonics(const HarmonicSpectrum& W);
Matrix spin_component(const Matrix& A, HalfInt j, int l);
Matrix unit_tensor(HalfInt j, int l, int m);

Matrix spin_z(HalfInt j);
Matrix spin_plus(HalfInt j);
Matrix spin_minus(HalfInt j);
Matrix spin_x(HalfInt j);
Matrix spin_y(HalfInt j);
// Sum_a [S_a, [S_a, A]]
Matrix double_commutator(const Matrix& A, HalfInt j);

// ---- phase-space grids and fields ----

enum class StereoMap { tan, arctan };
enum class FieldKind { wigner, husimi, p_symbol };

struct Grid {
    enum class Kind { sphere, stereographic };
    Kind kind = Kind::sphere;
    std::vector<double> theta, phi;
    std::vector<double> x, y;       // stereographic plane coordinates (empty for sphere grids)
    std::vector<double> weight;     // quadrature weight on S2 (sphere grids only)
    std::vector<char> inside;       // 0 for masked nodes
    int n_theta = 0, n_phi = 0;
    int resolution = 0;
    double r_max = 0.0;
    StereoMap map = StereoMap::tan;

    std::size_t size() const { return theta.size(); }
    io::json spec() const;
};

// Gauss-Legendre in cos(theta) times uniform phi.
Grid sphere_grid(int n_theta, int n_phi);
// Exact for products of two degree-2j harmonic expansions.
Grid quadrature_grid(HalfInt j);
Grid stereographic_grid(int resolution, double r_max, StereoMap map = StereoMap::tan);
// Plane radius to polar angle; NaN where the map has no preimage.
double stereo_theta(double r, StereoMap map);
double stereo_radius(double theta, StereoMap map);

struct PhaseSpaceField {
    Grid grid;
    std::vector<double> value;
    FieldKind kind = FieldKind::wigner;
    HalfInt j;
    double time = 0.0;
    bool bold = false;  // multiplied by sqrt(4 pi / (2j+1))

    io::json sidecar() const;
    std::string csv() const;
    // Writes <stem>.csv and <stem>.json, returns the CSV hash.
    std::string write(const std::filesystem::path& stem) const;
};

// Orthonormal spherical harmonics with the Condon-Shortley phase.
Complex spherical_harmonic(int l, int m, double theta, double phi);

PhaseSpaceField field(const HarmonicSpectrum& W, const Grid& grid, FieldKind kind,
                      bool bold = false);

// Integral over S2 of f * g with the grid weights.
double integrate(const PhaseSpaceField& f);

std::string to_string(FieldKind k);
FieldKind field_kind_from_string(const std::string& s);

}  // namespace spindeco::wigner
