#include "lumisep/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

namespace lumisep {

std::vector<double> default_grid()
{
    std::vector<double> grid;
    for (int wl = 400; wl <= 700; wl += 10) grid.push_back(wl);
    return grid;
}

SpectralCurve::SpectralCurve(std::vector<double> wavelengths, std::vector<double> values)
    : wavelengths_(std::move(wavelengths)), values_(std::move(values))
{
    if (wavelengths_.size() != values_.size()) {
        throw Error(ErrorCode::InvalidArgument, "wavelength and value counts differ");
    }
    if (wavelengths_.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "a spectral curve needs at least two samples");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || !std::isfinite(wavelengths_[i])) {
            throw Error(ErrorCode::InvalidArgument, "non-finite spectral sample");
        }
        if (i > 0 && !(wavelengths_[i] > wavelengths_[i - 1])) {
            throw Error(ErrorCode::InvalidArgument, "wavelengths must be strictly increasing");
        }
    }
}

SpectralCurve SpectralCurve::constant(const std::vector<double>& grid, double value)
{
    return SpectralCurve(grid, std::vector<double>(grid.size(), value));
}

bool SpectralCurve::same_grid(const SpectralCurve& other) const
{
    if (wavelengths_.size() != other.wavelengths_.size()) return false;
    for (std::size_t i = 0; i < wavelengths_.size(); ++i) {
        if (std::abs(wavelengths_[i] - other.wavelengths_[i]) > 1e-9) return false;
    }
    return true;
}

SpectralCurve SpectralCurve::scaled(double s) const
{
    std::vector<double> v = values_;
    for (double& x : v) x *= s;
    return SpectralCurve(wavelengths_, std::move(v));
}

std::string role_name(SpectralRole role)
{
    return role == SpectralRole::Reflectance ? "reflectance" : "illumination";
}

SpectralRole parse_role(const std::string& name)
{
    if (name == "reflectance") return SpectralRole::Reflectance;
    if (name == "illumination") return SpectralRole::Illumination;
    throw Error(ErrorCode::InvalidArgument, "unknown spectral role '" + name + "'");
}

void validate_role(const SpectralCurve& curve, SpectralRole role)
{
    for (double v : curve.values()) {
        if (v < 0.0 || (role == SpectralRole::Reflectance && v > 1.0)) {
            throw Error(ErrorCode::InvalidArgument, role_name(role) + " curve out of range");
        }
    }
}

void require_same_grid(const SpectralCurve& a, const SpectralCurve& b, const char* what)
{
    if (!a.same_grid(b)) throw Error(ErrorCode::GridMismatch, what);
}

CameraResponse::CameraResponse(std::array<SpectralCurve, 3> rgb) : channels(std::move(rgb))
{
    for (const auto& c : channels) {
        require_same_grid(c, channels[0], "camera response channels");
        bool positive = false;
        for (double v : c.values()) {
            if (v < 0.0) throw Error(ErrorCode::InvalidArgument, "negative camera response");
            positive = positive || v > 0.0;
        }
        if (!positive) throw Error(ErrorCode::InvalidArgument, "camera response channel is all zero");
    }
}

SpectralCurve CameraResponse::total() const
{
    std::vector<double> w(grid().size(), 0.0);
    for (const auto& c : channels) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += c[i];
    }
    return SpectralCurve(grid(), std::move(w));
}

Mat3 CouplingTensor::flash_system(const Vec3& f) const
{
    Mat3 m;
    for (int k = 0; k < 3; ++k) m.row(k) = (E[k] * f).transpose();
    return m;
}

Mat3 CouplingTensor::reflectance_system(const Vec3& a) const
{
    Mat3 m;
    for (int k = 0; k < 3; ++k) m.row(k) = a.transpose() * E[k];
    return m;
}

std::vector<double> sample_widths(const std::vector<double>& grid)
{
    const std::size_t n = grid.size();
    std::vector<double> widths(n);
    widths[0] = grid[1] - grid[0];
    widths[n - 1] = grid[n - 1] - grid[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) widths[i] = 0.5 * (grid[i + 1] - grid[i - 1]);
    return widths;
}

double weighted_inner(const SpectralCurve& u, const SpectralCurve& v, const SpectralCurve& weight)
{
    require_same_grid(u, v, "inner product operands");
    require_same_grid(u, weight, "inner product weight");
    const auto widths = sample_widths(u.wavelengths());
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += weight[i] * u[i] * v[i] * widths[i];
    return acc;
}

double trapezoid_product(const SpectralCurve& a, const SpectralCurve& b, const SpectralCurve& c)
{
    require_same_grid(a, b, "quadrature operands");
    require_same_grid(a, c, "quadrature operands");
    const auto& wl = a.wavelengths();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < wl.size(); ++i) {
        double f0 = a[i] * b[i] * c[i];
        double f1 = a[i + 1] * b[i + 1] * c[i + 1];
        acc += 0.5 * (f0 + f1) * (wl[i + 1] - wl[i]);
    }
    return acc;
}

SpectralBasis weighted_pca(std::span<const SpectralCurve> database, const CameraResponse& response,
                           SpectralRole role)
{
    if (database.size() < 3) {
        throw Error(ErrorCode::DegenerateDatabase, "weighted PCA needs at least 3 curves");
    }
    const SpectralCurve weight = response.total();
    for (const auto& c : database) require_same_grid(c, weight, "database curve vs camera response");

    const auto n = static_cast<Eigen::Index>(weight.size());
    const auto m = static_cast<Eigen::Index>(database.size());
    const auto widths = sample_widths(weight.wavelengths());

    Eigen::MatrixXd X(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) X(i, j) = database[j][i];
    }
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = weight[i] * widths[i];

    // Principal directions lie in the span of the data, so work with the
    // m×m Gram matrix G = Xᵀ W X; u = X c / σ is then w-orthonormal.
    Eigen::MatrixXd G = X.transpose() * w.asDiagonal() * X;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    const auto& evals = eig.eigenvalues();  // ascending
    const double top = evals[m - 1];
    if (!(top > 0.0) || evals[m - 3] <= 1e-10 * top) {
        throw Error(ErrorCode::DegenerateDatabase, "effective rank below 3");
    }

    SpectralBasis basis;
    basis.role = role;
    basis.weight = weight;
    for (int k = 0; k < 3; ++k) {
        const double sigma2 = evals[m - 1 - k];
        Eigen::VectorXd u = X * eig.eigenvectors().col(m - 1 - k) / std::sqrt(sigma2);
        double orient = w.dot(u);
        if (std::abs(orient) < 1e-12) {
            Eigen::Index largest = 0;
            u.cwiseAbs().maxCoeff(&largest);
            orient = u[largest];
        }
        if (orient < 0) u = -u;
        basis.vectors[k] = SpectralCurve(weight.wavelengths(), std::vector<double>(u.data(), u.data() + n));
    }
    return basis;
}

CouplingTensor compute_coupling(const SpectralBasis& refl, const SpectralBasis& illum,
                                const CameraResponse& response)
{
    CouplingTensor t;
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                t.E[k](i, j) = trapezoid_product(refl.vectors[i], response.channels[k], illum.vectors[j]);
            }
        }
    }
    return t;
}

Vec3 project_spectrum(const SpectralCurve& curve, const SpectralBasis& basis)
{
    Vec3 c;
    for (int i = 0; i < 3; ++i) c[i] = weighted_inner(curve, basis.vectors[i], basis.weight);
    return c;
}

SpectralCurve reconstruct_spectrum(const Vec3& coeff, const SpectralBasis& basis)
{
    std::vector<double> v(basis.grid().size(), 0.0);
    for (int i = 0; i < 3; ++i) {
        for (std::size_t s = 0; s < v.size(); ++s) v[s] += coeff[i] * basis.vectors[i][s];
    }
    return SpectralCurve(basis.grid(), std::move(v));
}

FlashCoefficients flash_coefficients(const SpectralBasis& illum)
{
    Vec3 c = project_spectrum(SpectralCurve::constant(illum.grid(), 1.0), illum);
    const double norm = c.norm();
    if (!(norm > 1e-12)) throw Error(ErrorCode::ZeroProjection, "flat spectrum is orthogonal to the basis");
    return FlashCoefficients{c / norm};
}

Vec3 coeff_to_display_rgb(const Vec3& coeff, const SpectralBasis& basis, const CameraResponse& response)
{
    const SpectralCurve spd = reconstruct_spectrum(coeff, basis);
    const SpectralCurve one = SpectralCurve::constant(basis.grid(), 1.0);
    Vec3 rgb;
    for (int k = 0; k < 3; ++k) rgb[k] = std::max(0.0, trapezoid_product(spd, response.channels[k], one));
    return rgb;
}

SpectralModel SpectralModel::from_bases(CameraResponse response, SpectralBasis refl, SpectralBasis illum)
{
    require_same_grid(refl.vectors[0], response.channels[0], "reflectance basis vs response");
    require_same_grid(illum.vectors[0], response.channels[0], "illumination basis vs response");
    SpectralModel model;
    model.coupling = compute_coupling(refl, illum, response);
    model.flash = flash_coefficients(illum);
    model.response = std::move(response);
    model.reflectance = std::move(refl);
    model.illumination = std::move(illum);
    return model;
}

}  // namespace lumisep
