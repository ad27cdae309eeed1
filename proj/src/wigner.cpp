#include "spindeco/wigner.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace spindeco::wigner {

namespace {

constexpr double kPi = std::numbers::pi;

// sqrt(j(j+1) - a(a+1)) written to avoid cancellation.
double ladder(double j, double a) {
    const double v = (j - a) * (j + a + 1.0);
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

// Solves (T - sigma) x = b in place for symmetric tridiagonal T, Gaussian elimination
// with partial pivoting. diag has n entries, off has n-1 (off[k] = T(k, k+1)).
void tridiagonal_solve(const std::vector<double>& diag, const std::vector<double>& off,
                       double sigma, std::vector<double>& b) {
    const int n = static_cast<int>(diag.size());
    std::vector<double> d(n), du(off), dl(off), du2(n, 0.0);
    for (int k = 0; k < n; ++k) d[k] = diag[k] - sigma;
    for (int k = 0; k + 1 < n; ++k) {
        if (std::abs(d[k]) >= std::abs(dl[k])) {
            const double f = d[k] == 0.0 ? 0.0 : dl[k] / d[k];
            d[k + 1] -= f * du[k];
            b[k + 1] -= f * b[k];
        } else {
            const double f = d[k] / dl[k];
            d[k] = dl[k];
            const double t = d[k + 1];
            d[k + 1] = du[k] - f * t;
            if (k + 2 < n) {
                du2[k] = du[k + 1];
                du[k + 1] = -f * du2[k];
            }
            du[k] = t;
            const double bt = b[k];
            b[k] = b[k + 1];
            b[k + 1] = bt - f * b[k + 1];
        }
    }
    constexpr double tiny = 1e-300;
    for (int k = n - 1; k >= 0; --k) {
        double s = b[k];
        if (k + 1 < n) s -= du[k] * b[k + 1];
        if (k + 2 < n) s -= du2[k] * b[k + 2];
        b[k] = s / (d[k] == 0.0 ? tiny : d[k]);
    }
}

std::shared_ptr<const ChannelBlock> build_block(HalfInt j, int m) {
    const double jj = j.value();
    const int dim = j.multiplicity();
    const int am = std::abs(m);
    auto block = std::make_shared<ChannelBlock>();
    block->m = m;
    block->n = dim - am;
    block->first_row = m >= 0 ? 0 : -m;
    const int n = block->n;
    block->u.assign(static_cast<std::size_t>(n) * n, 0.0);

    std::vector<double> diag(n), off(std::max(n - 1, 0));
    for (int k = 0; k < n; ++k) {
        const double r = (block->first_row + k) - jj;
        diag[k] = 2.0 * jj * (jj + 1.0) - 2.0 * r * (r + m);
        if (k + 1 < n) off[k] = -ladder(jj, r) * ladder(jj, r + m);
    }
    const int edge_sign = (m > 0 && (m % 2)) ? -1 : 1;

    std::vector<double> x(n), prev(n);
    for (int l = am; l <= j.twice; ++l) {
        const double lambda = static_cast<double>(l) * (l + 1);
        double* out = block->u.data() + static_cast<std::size_t>(l - am) * n;
        if (n == 1) {
            out[0] = edge_sign;
            continue;
        }
        const double sigma = lambda + 1e-11 * (1.0 + lambda);
        for (int k = 0; k < n; ++k) x[k] = 1.0 + 0.37 * std::sin(1.7 * k + 0.3 * l);
        for (int it = 0; it < 6; ++it) {
            tridiagonal_solve(diag, off, sigma, x);
            double norm = 0.0;
            for (double v : x) norm += v * v;
            norm = std::sqrt(norm);
            double change = 0.0;
            for (int k = 0; k < n; ++k) {
                x[k] /= norm;
                if (it > 0) change = std::max(change, std::abs(std::abs(x[k]) - std::abs(prev[k])));
                prev[k] = x[k];
            }
            if (it > 1 && change < 1e-15) break;
        }
        // Sign: recurse inward from the last entry, whose sign is fixed by the phase
        // convention, up to the first entry large enough to compare reliably.
        double vmax = 0.0;
        for (double v : x) vmax = std::max(vmax, std::abs(v));
        int kstar = n - 1;
        while (std::abs(x[kstar]) < 1e-3 * vmax) --kstar;
        double y_next = 0.0, y_cur = edge_sign;
        for (int k = n - 1; k > kstar; --k) {
            const double y_prev =
                -((diag[k] - lambda) * y_cur + (k + 1 < n ? off[k] * y_next : 0.0)) / off[k - 1];
            y_next = y_cur;
            y_cur = y_prev;
            const double s = std::max(std::abs(y_cur), std::abs(y_next));
            if (s > 1e100) {
                y_cur /= s;
                y_next /= s;
            }
        }
        const double flip = (y_cur * x[kstar] < 0.0) ? -1.0 : 1.0;
        for (int k = 0; k < n; ++k) out[k] = flip * x[k];
    }
    return block;
}

}  // namespace

HarmonicSpectrum::HarmonicSpectrum(HalfInt spin)
    : j(spin), coeffs(static_cast<std::size_t>(spin.multiplicity()) * spin.multiplicity(), 0.0) {}

double HarmonicSpectrum::norm2() const {
    double s = 0.0;
    for (const auto& c : coeffs) s += std::norm(c);
    return s;
}

std::shared_ptr<const ChannelBlock> channel_block(HalfInt j, int m) {
    if (j.twice < 0 || std::abs(m) > j.twice)
        throw std::invalid_argument("channel_block: m out of range");
    constexpr int kCacheMaxTwiceJ = 100;
    if (j.twice > kCacheMaxTwiceJ) return build_block(j, m);
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const ChannelBlock>> cache;
    const auto key = std::make_pair(j.twice, m);
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto block = build_block(j, m);
    std::lock_guard<std::mutex> lock(mutex);
    return cache.emplace(key, block).first->second;
}

double coherent_weight(HalfInt j, int l) {
    if (l < 0 || l > j.twice) throw std::out_of_range("coherent_weight: l outside [0, 2j]");
    const double tj = j.twice;
    const double lg = 2.0 * std::lgamma(tj + 1.0) + std::log(tj + 1.0) -
                      std::lgamma(tj + l + 2.0) - std::lgamma(tj - l + 1.0);
    return std::exp(0.5 * lg);
}

HarmonicSpectrum to_harmonics(const Matrix& A, HalfInt j) {
    const int dim = j.multiplicity();
    if (A.rows() != dim || A.cols() != dim)
        throw std::invalid_argument("to_harmonics: matrix is " + std::to_string(A.rows()) + "x" +
                                    std::to_string(A.cols()) + ", expected " +
                                    std::to_string(dim) + "x" + std::to_string(dim));
    HarmonicSpectrum W(j);
    for (int m = -j.twice; m <= j.twice; ++m) {
        auto block = channel_block(j, m);
        const int n = block->n, r0 = block->first_row;
        for (int l = std::abs(m); l <= j.twice; ++l) {
            const double* u = block->vec(l);
            Complex s = 0.0;
            for (int k = 0; k < n; ++k) s += u[k] * A(r0 + k, r0 + k + m);
            W(l, m) = s;
        }
    }
    return W;
}

Matrix from_harmonics(const HarmonicSpectrum& W) {
    const HalfInt j = W.j;
    const int dim = j.multiplicity();
    Matrix A = Matrix::Zero(dim, dim);
    for (int m = -j.twice; m <= j.twice; ++m) {
        auto block = channel_block(j, m);
        const int n = block->n, r0 = block->first_row;
        for (int l = std::abs(m); l <= j.twice; ++l) {
            const Complex w = W(l, m);
            if (w == 0.0) continue;
            const double* u = block->vec(l);
            for (int k = 0; k < n; ++k) A(r0 + k, r0 + k + m) += u[k] * w;
        }
    }
    return A;
}

Matrix spin_component(const Matrix& A, HalfInt j, int l) {
    const HarmonicSpectrum full = to_harmonics(A, j);
    HarmonicSpectrum part(j);
    for (int m = -l; m <= l; ++m) part(l, m) = full(l, m);
    return from_harmonics(part);
}

Matrix unit_tensor(HalfInt j, int l, int m) {
    HarmonicSpectrum W(j);
    W(l, m) = 1.0;
    return from_harmonics(W);
}

Matrix spin_z(HalfInt j) {
    const int dim = j.multiplicity();
    Matrix S = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) S(i, i) = i - j.value();
    return S;
}

Matrix spin_plus(HalfInt j) {
    const int dim = j.multiplicity();
    Matrix S = Matrix::Zero(dim, dim);
    for (int i = 0; i + 1 < dim; ++i) S(i + 1, i) = ladder(j.value(), i - j.value());
    return S;
}

Matrix spin_minus(HalfInt j) { return spin_plus(j).adjoint(); }

Matrix spin_x(HalfInt j) { return 0.5 * (spin_plus(j) + spin_minus(j)); }

Matrix spin_y(HalfInt j) { return Complex(0.0, -0.5) * (spin_plus(j) - spin_minus(j)); }

Matrix double_commutator(const Matrix& A, HalfInt j) {
    Matrix out = Matrix::Zero(A.rows(), A.cols());
    for (const Matrix& S : {spin_x(j), spin_y(j), spin_z(j)}) {
        const Matrix inner = S * A - A * S;
        out += S * inner - inner * S;
    }
    return out;
}

// ---- grids ----

double stereo_theta(double r, StereoMap map) {
    if (map == StereoMap::tan) return 2.0 * std::atan(r / 2.0);
    // inverse of r = 2 arctan(theta / 2)
    const double half = r / 2.0;
    if (half >= kPi / 2.0) return std::numeric_limits<double>::quiet_NaN();
    const double th = 2.0 * std::tan(half);
    return th <= kPi ? th : std::numeric_limits<double>::quiet_NaN();
}

double stereo_radius(double theta, StereoMap map) {
    return map == StereoMap::tan ? 2.0 * std::tan(theta / 2.0) : 2.0 * std::atan(theta / 2.0);
}

io::json Grid::spec() const {
    io::json j;
    if (kind == Kind::sphere) {
        j["type"] = "sphere";
        j["n_theta"] = n_theta;
        j["n_phi"] = n_phi;
        j["theta_rule"] = "gauss_legendre_cos";
    } else {
        j["type"] = "stereographic";
        j["resolution"] = resolution;
        j["r_max"] = r_max;
        j["radial_map"] = map == StereoMap::tan ? "r=2tan(theta/2)" : "r=2arctan(theta/2)";
    }
    return j;
}

Grid sphere_grid(int n_theta, int n_phi) {
    if (n_theta < 1 || n_phi < 1) throw std::invalid_argument("sphere_grid: need n_theta, n_phi >= 1");
    // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of Legendre polynomials.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_theta, n_theta);
    for (int k = 1; k < n_theta; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Grid g;
    g.kind = Grid::Kind::sphere;
    g.n_theta = n_theta;
    g.n_phi = n_phi;
    for (int a = 0; a < n_theta; ++a) {
        const double x = es.eigenvalues()(a);
        const double v0 = es.eigenvectors()(0, a);
        const double wx = 2.0 * v0 * v0;
        for (int b = 0; b < n_phi; ++b) {
            g.theta.push_back(std::acos(std::clamp(x, -1.0, 1.0)));
            g.phi.push_back(2.0 * kPi * b / n_phi);
            g.weight.push_back(wx * 2.0 * kPi / n_phi);
            g.inside.push_back(1);
        }
    }
    return g;
}

Grid quadrature_grid(HalfInt j) { return sphere_grid(j.twice + 1, 2 * j.twice + 1); }

Grid stereographic_grid(int resolution, double r_max, StereoMap map) {
    if (resolution < 2) throw std::invalid_argument("stereographic_grid: resolution must be >= 2");
    if (!(r_max > 0.0)) throw std::invalid_argument("stereographic_grid: r_max must be positive");
    Grid g;
    g.kind = Grid::Kind::stereographic;
    g.resolution = resolution;
    g.r_max = r_max;
    g.map = map;
    for (int a = 0; a < resolution; ++a) {
        const double y = -r_max + 2.0 * r_max * a / (resolution - 1);
        for (int b = 0; b < resolution; ++b) {
            const double x = -r_max + 2.0 * r_max * b / (resolution - 1);
            const double r = std::hypot(x, y);
            const double th = stereo_theta(r, map);
            const bool ok = r <= r_max * (1.0 + 1e-12) && !std::isnan(th);
            g.x.push_back(x);
            g.y.push_back(y);
            g.theta.push_back(ok ? th : 0.0);
            g.phi.push_back(std::atan2(y, x));
            g.inside.push_back(ok ? 1 : 0);
        }
    }
    return g;
}

// ---- fields ----

namespace {

// Normalized associated Legendre values Pbar_l^m(cos theta) for l = m..lmax,
// such that Y_l^m = Pbar_l^m e^{i m phi} (Condon-Shortley phase included).
void legendre_column(int m, int lmax, double x, double s, double pmm, std::vector<double>& out) {
    out.assign(lmax + 1, 0.0);
    if (m > lmax) return;
    out[m] = pmm;
    if (m + 1 > lmax) return;
    out[m + 1] = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int l = m + 2; l <= lmax; ++l) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
        const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        out[l] = a * (x * out[l - 1] - b * out[l - 2]);
    }
    (void)s;
}

double kind_weight(FieldKind kind, HalfInt j, int l) {
    switch (kind) {
        case FieldKind::wigner: return 1.0;
        case FieldKind::husimi: return coherent_weight(j, l);
        case FieldKind::p_symbol: return 1.0 / coherent_weight(j, l);
    }
    return 1.0;
}

}  // namespace

Complex spherical_harmonic(int l, int m, double theta, double phi) {
    if (l < 0 || std::abs(m) > l) return 0.0;
    const int am = std::abs(m);
    const double x = std::cos(theta), s = std::sin(theta);
    double pmm = 1.0 / std::sqrt(4.0 * kPi);
    for (int k = 1; k <= am; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
    std::vector<double> col;
    legendre_column(am, l, x, s, pmm, col);
    Complex y = col[l] * std::polar(1.0, am * phi);
    if (m < 0) y = ((am % 2) ? -1.0 : 1.0) * std::conj(y);
    return y;
}

// The harmonics are resummed as sum W^(l,m) conj(Y_l^m); with the amplitude convention
// e^{-i m phi} of the coherent states this makes the Husimi field equal <n|A|n>.
PhaseSpaceField field(const HarmonicSpectrum& W, const Grid& grid, FieldKind kind, bool bold) {
    const HalfInt j = W.j;
    const int L = j.twice;
    PhaseSpaceField f;
    f.grid = grid;
    f.kind = kind;
    f.j = j;
    f.bold = bold;
    f.value.assign(grid.size(), 0.0);
    std::vector<double> wl(L + 1);
    for (int l = 0; l <= L; ++l) wl[l] = kind_weight(kind, j, l);
    const double scale = bold ? std::sqrt(4.0 * kPi / j.multiplicity()) : 1.0;

    std::vector<double> col;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        if (!grid.inside[p]) {
            f.value[p] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double th = grid.theta[p], ph = grid.phi[p];
        const double x = std::cos(th), s = std::sin(th);
        double pmm = 1.0 / std::sqrt(4.0 * kPi);
        double total = 0.0;
        for (int m = 0; m <= L; ++m) {
            if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
            legendre_column(m, L, x, s, pmm, col);
            Complex sp = 0.0, sm = 0.0;
            for (int l = m; l <= L; ++l) {
                sp += wl[l] * col[l] * W(l, m);
                if (m > 0) sm += wl[l] * col[l] * W(l, -m);
            }
            // conj(Y_l^m) = Pbar e^{-i m phi}; conj(Y_l^{-m}) = (-1)^m Pbar e^{i m phi}
            const Complex e = std::polar(1.0, -m * ph);
            if (m == 0) {
                total += sp.real();
            } else {
                const double sign = (m % 2) ? -1.0 : 1.0;
                total += (sp * e + sign * sm * std::conj(e)).real();
            }
        }
        f.value[p] = scale * total;
    }
    return f;
}

double integrate(const PhaseSpaceField& f) {
    if (f.grid.weight.size() != f.value.size())
        throw std::invalid_argument("integrate: field grid carries no quadrature weights");
    double s = 0.0;
    for (std::size_t p = 0; p < f.value.size(); ++p) s += f.grid.weight[p] * f.value[p];
    return s;
}

std::string to_string(FieldKind k) {
    switch (k) {
        case FieldKind::wigner: return "wigner";
        case FieldKind::husimi: return "husimi";
        case FieldKind::p_symbol: return "p_symbol";
    }
    return "wigner";
}

FieldKind field_kind_from_string(const std::string& s) {
    if (s == "wigner") return FieldKind::wigner;
    if (s == "husimi") return FieldKind::husimi;
    if (s == "p_symbol" || s == "p") return FieldKind::p_symbol;
    throw std::invalid_argument("unknown field kind '" + s + "'");
}

io::json PhaseSpaceField::sidecar() const {
    io::json s;
    s["grid"] = grid.spec();
    s["two_j"] = j.twice;
    s["time"] = time;
    s["kind"] = to_string(kind);
    s["normalization"] = bold ? "bold" : "plain";
    s["columns"] = grid.kind == Grid::Kind::sphere ? io::json::array({"theta", "phi", "value"})
                                                    : io::json::array({"x", "y", "value"});
    return s;
}

std::string PhaseSpaceField::csv() const {
    const bool sphere = grid.kind == Grid::Kind::sphere;
    io::CsvTable t(sphere ? std::vector<std::string>{"theta", "phi", "value"}
                          : std::vector<std::string>{"x", "y", "value"});
    for (std::size_t p = 0; p < value.size(); ++p) {
        if (!grid.inside[p]) continue;
        if (sphere)
            t.add_row({grid.theta[p], grid.phi[p], value[p]});
        else
            t.add_row({grid.x[p], grid.y[p], value[p]});
    }
    return t.str();
}

std::string PhaseSpaceField::write(const std::filesystem::path& stem) const {
    const std::string text = csv();
    const std::string hash = io::write_file(stem.string() + ".csv", text);
    io::json side = sidecar();
    side["csv_hash"] = hash;
    io::write_file(stem.string() + ".json", side.dump(2) + "\n");
    return hash;
}

}  // namespace spindeco::wigner
