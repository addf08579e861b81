#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace oracle {

double integrate(const std::function<double(double)>& fn, double a, double b, double step)
{
    const int n = static_cast<int>(std::lround((b - a) / step));
    double sum = 0.5 * (fn(a) + fn(b));
    for (int i = 1; i < n; ++i) sum += fn(a + i * step);
    return sum * (b - a) / n;
}

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b)
{
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

std::vector<Vec2> brute_force_hull(const std::vector<Vec2>& points)
{
    const std::size_t n = points.size();
    std::vector<char> keep(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n && !keep[i]; ++j) {
            if (i == j) continue;
            bool all_left = true;
            for (std::size_t k = 0; k < n && all_left; ++k) {
                if (k == i || k == j) continue;
                if (cross(points[i], points[j], points[k]) <= 0) all_left = false;
            }
            if (all_left) keep[i] = keep[j] = 1;
        }
    }
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) out.push_back(points[i]);
    }
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Line {
    Vec2 n;
    double c;
};

Line support(const std::vector<Vec2>& poly, double psi)
{
    Line l{Vec2(std::cos(psi), std::sin(psi)), -kInf};
    for (const auto& v : poly) l.c = std::max(l.c, l.n.dot(v));
    return l;
}

double area3(const Line& a, const Line& b, const Line& c)
{
    const double x1 = a.n.x() * b.n.y() - a.n.y() * b.n.x();
    const double x2 = b.n.x() * c.n.y() - b.n.y() * c.n.x();
    const double x3 = c.n.x() * a.n.y() - c.n.y() * a.n.x();
    // Bounded only when the outward normals positively span the plane.
    const bool pos = x1 > 1e-14 && x2 > 1e-14 && x3 > 1e-14;
    const bool neg = x1 < -1e-14 && x2 < -1e-14 && x3 < -1e-14;
    if (!pos && !neg) return kInf;
    auto meet = [](const Line& p, const Line& q) {
        Eigen::Matrix2d m;
        m << p.n.x(), p.n.y(), q.n.x(), q.n.y();
        return Vec2(m.inverse() * Vec2(p.c, q.c));
    };
    const Vec2 A = meet(a, b), B = meet(b, c), C = meet(c, a);
    return 0.5 * std::abs(cross(A, B, C));
}

// Angular pieces on which the support line touches a single vertex.
std::vector<std::pair<double, double>> normal_cones(const std::vector<Vec2>& poly)
{
    const std::size_t h = poly.size();
    std::vector<double> edge_normal(h);
    for (std::size_t i = 0; i < h; ++i) {
        const Vec2 e = poly[(i + 1) % h] - poly[i];
        edge_normal[i] = std::atan2(-e.x(), e.y());  // outward for CCW
    }
    std::vector<std::pair<double, double>> cones;
    for (std::size_t i = 0; i < h; ++i) {
        double lo = edge_normal[(i + h - 1) % h];
        double hi = edge_normal[i];
        while (hi < lo) hi += 2 * M_PI;
        cones.emplace_back(lo, hi);
    }
    return cones;
}

double golden(const std::function<double(double)>& f, double a, double b, double tol)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return std::min({f(a), f(b), fc, fd});
}

// Global minimum of f over the union of the pieces: a grid on every piece,
// then golden-section on the brackets around the best few samples.
double piecewise_min(const std::function<double(double)>& f, const std::vector<std::pair<double, double>>& pieces,
                     int samples, double tol)
{
    struct Sample {
        double value;
        double lo, hi;
    };
    std::vector<Sample> s;
    double best = kInf;
    for (const auto& [lo, hi] : pieces) {
        const double step = (hi - lo) / samples;
        for (int i = 0; i <= samples; ++i) {
            const double x = lo + i * step;
            const double v = f(x);
            best = std::min(best, v);
            s.push_back({v, std::max(lo, x - step), std::min(hi, x + step)});
        }
    }
    std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.value < b.value; });
    for (std::size_t i = 0; i < std::min<std::size_t>(4, s.size()); ++i) {
        if (!std::isfinite(s[i].value)) break;
        best = std::min(best, golden(f, s[i].lo, s[i].hi, tol));
    }
    return best;
}

}  // namespace

double min_triangle_area(const std::vector<Vec2>& polygon)
{
    const std::size_t h = polygon.size();
    const auto cones = normal_cones(polygon);
    double best = kInf;
    for (std::size_t e = 0; e < h; ++e) {
        const Vec2 d = polygon[(e + 1) % h] - polygon[e];
        const Line flush = support(polygon, std::atan2(-d.x(), d.y()));
        auto inner = [&](double pa) {
            const Line la = support(polygon, pa);
            return piecewise_min([&](double pb) { return area3(flush, la, support(polygon, pb)); }, cones, 12, 1e-13);
        };
        best = std::min(best, piecewise_min(inner, cones, 12, 1e-12));
    }
    return best;
}

ConeSearch nnls_grid(const Vec3& target, const std::vector<Vec3>& columns)
{
    const std::size_t n = columns.size();
    auto eval = [&](const std::array<double, 3>& w, ConeSearch& out) {
        Vec3 d = Vec3::Zero();
        for (std::size_t i = 0; i < n; ++i) d += w[i] * columns[i];
        const double dd = d.squaredNorm();
        const double t = dd > 0 ? std::max(0.0, target.dot(d) / dd) : 0.0;
        out.residual = (target - t * d).norm();
        for (std::size_t i = 0; i < 3; ++i) out.z[i] = i < n ? t * w[i] : 0.0;
    };
    // Simplex coordinates (u, v) → w = (u, v, 1 − u − v) for three columns,
    // (u, 1 − u) for two and (1) for one.
    auto weights = [&](double u, double v) -> std::array<double, 3> {
        if (n == 1) return {1, 0, 0};
        if (n == 2) return {u, 1 - u, 0};
        return {u, v, 1 - u - v};
    };
    auto inside = [&](double u, double v) { return u >= 0 && v >= 0 && (n < 3 ? u <= 1 : u + v <= 1); };
    ConeSearch best;
    best.residual = target.norm();
    double bu = 0, bv = 0;
    double step = 1.0 / 200;
    for (double u = 0; u <= 1 + 1e-12; u += step) {
        for (double v = 0; v <= (n == 3 ? 1 + 1e-12 : 0); v += step) {
            if (!inside(u, v)) continue;
            ConeSearch c;
            eval(weights(u, v), c);
            if (c.residual < best.residual) {
                best = c;
                bu = u;
                bv = v;
            }
        }
    }
    for (int level = 0; level < 40; ++level) {
        const double fine = step / 10;
        double cu = bu, cv = bv;
        for (int i = -10; i <= 10; ++i) {
            for (int j = (n == 3 ? -10 : 0); j <= (n == 3 ? 10 : 0); ++j) {
                const double u = std::clamp(cu + i * fine, 0.0, 1.0);
                const double v = n == 3 ? std::clamp(cv + j * fine, 0.0, 1.0) : 0.0;
                if (!inside(u, v)) continue;
                ConeSearch c;
                eval(weights(u, v), c);
                if (c.residual < best.residual) {
                    best = c;
                    bu = u;
                    bv = v;
                }
            }
        }
        step = fine * 2;
        if (step < 1e-15) break;
    }
    return best;
}

namespace {

std::uint32_t bswap(std::uint32_t x)
{
    return ((x & 0xffu) << 24) | ((x & 0xff00u) << 8) | ((x & 0xff0000u) >> 8) | (x >> 24);
}

bool host_little()
{
    const std::uint16_t probe = 1;
    unsigned char b;
    std::memcpy(&b, &probe, 1);
    return b == 1;
}

}  // namespace

Pfm read_pfm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    char magic[3] = {0};
    int w = 0, h = 0;
    double scale = 0;
    int consumed = 0;
    if (std::sscanf(all.c_str(), "%2s %d %d %lf%n", magic, &w, &h, &scale, &consumed) != 4 || std::string(magic) != "PF") {
        throw std::runtime_error("bad header");
    }
    const std::size_t offset = static_cast<std::size_t>(consumed) + 1;
    const std::size_t count = static_cast<std::size_t>(w) * h * 3;
    if (all.size() < offset + count * 4) throw std::runtime_error("short file");
    const bool swap = (scale < 0) != host_little();
    Pfm out{w, h, std::vector<float>(count)};
    for (int row = 0; row < h; ++row) {
        for (int i = 0; i < w * 3; ++i) {
            std::uint32_t bits;
            std::memcpy(&bits, all.data() + offset + (static_cast<std::size_t>(row) * w * 3 + i) * 4, 4);
            if (swap) bits = bswap(bits);
            float v;
            std::memcpy(&v, &bits, 4);
            out.rgb[static_cast<std::size_t>(h - 1 - row) * w * 3 + i] = v;
        }
    }
    return out;
}

void write_pfm(const std::filesystem::path& path, const Pfm& image, bool big_endian)
{
    std::ofstream out(path, std::ios::binary);
    out << "PF\n" << image.width << " " << image.height << "\n" << (big_endian ? "1.0" : "-1.0") << "\n";
    const bool swap = big_endian == host_little();
    for (int row = image.height - 1; row >= 0; --row) {
        for (int i = 0; i < image.width * 3; ++i) {
            std::uint32_t bits;
            std::memcpy(&bits, &image.rgb[static_cast<std::size_t>(row) * image.width * 3 + i], 4);
            if (swap) bits = bswap(bits);
            out.write(reinterpret_cast<const char*>(&bits), 4);
        }
    }
}

std::vector<double> pca_reconstruction_errors(const std::vector<std::vector<double>>& curves,
                                              const std::vector<double>& weight, const std::vector<double>& widths)
{
    const std::size_t L = weight.size();
    Eigen::VectorXd s(L);
    for (std::size_t l = 0; l < L; ++l) s[l] = std::sqrt(weight[l] * widths[l]);
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(L, L);
    std::vector<Eigen::VectorXd> ys;
    for (const auto& c : curves) {
        Eigen::VectorXd y(L);
        for (std::size_t l = 0; l < L; ++l) y[l] = s[l] * c[l];
        scatter += y * y.transpose();
        ys.push_back(y);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter);
    const Eigen::MatrixXd top = eig.eigenvectors().rightCols(3);
    std::vector<double> err;
    for (const auto& y : ys) err.push_back((y - top * (top.transpose() * y)).squaredNorm());
    return err;
}

long double srgb(long double linear)
{
    if (linear <= 0.0031308L) return 12.92L * linear;
    return 1.055L * std::pow(linear, 1.0L / 2.4L) - 0.055L;
}

std::vector<double> matched_angles_deg(const std::vector<Vec3>& estimate, const std::vector<Vec3>& truth,
                                       std::vector<int>* assignment)
{
    std::vector<int> perm(truth.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> best;
    double best_max = kInf;
    if (estimate.size() != truth.size()) return std::vector<double>(truth.size(), 180.0);
    do {
        std::vector<double> err;
        double mx = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const Vec3& e = estimate[perm[i]];
            const double ang = std::atan2(e.cross(truth[i]).norm(), e.dot(truth[i])) * 180.0 / M_PI;
            err.push_back(ang);
            mx = std::max(mx, ang);
        }
        if (mx < best_max) {
            best_max = mx;
            best = err;
            if (assignment) *assignment = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace oracle
