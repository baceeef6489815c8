#include "kerr/media.hpp"

#include <cmath>
#include <stdexcept>

#include "kerr/quadrature.hpp"

namespace kerr {

SusceptibilityField SusceptibilityField::analytic(std::vector<GaussianBump> bumps,
                                                  double support_radius, double domain_radius) {
    if (!(support_radius > 0) || !(domain_radius > support_radius))
        throw std::invalid_argument("SusceptibilityField: need 0 < R < R0");
    for (const auto& b : bumps)
        if (!(b.width > 0)) throw std::invalid_argument("SusceptibilityField: bump width <= 0");
    SusceptibilityField f;
    f.bumps_ = std::move(bumps);
    f.cutoff_ = PlateauWindow(0.9 * support_radius, support_radius);
    f.support_radius_ = support_radius;
    f.domain_radius_ = domain_radius;
    return f;
}

SusceptibilityField SusceptibilityField::gridded(Grid3D grid, ScalarField samples,
                                                 double support_radius, double domain_radius) {
    if (samples.size() != grid.size())
        throw std::invalid_argument("SusceptibilityField: sample count != grid size");
    if (!(support_radius > 0) || !(domain_radius > support_radius))
        throw std::invalid_argument("SusceptibilityField: need 0 < R < R0");
    SusceptibilityField f;
    f.grid_ = grid;
    f.samples_ = std::move(samples);
    f.support_radius_ = support_radius;
    f.domain_radius_ = domain_radius;
    return f;
}

SusceptibilityField SusceptibilityField::zero(double domain_radius) {
    SusceptibilityField f;
    f.support_radius_ = 0.5 * domain_radius;
    f.domain_radius_ = domain_radius;
    f.cutoff_ = PlateauWindow(0.45 * domain_radius, 0.5 * domain_radius);
    return f;
}

const Grid3D& SusceptibilityField::grid() const {
    if (!grid_) throw std::logic_error("SusceptibilityField: not gridded");
    return *grid_;
}

const ScalarField& SusceptibilityField::samples() const {
    if (!grid_) throw std::logic_error("SusceptibilityField: not gridded");
    return samples_;
}

double SusceptibilityField::operator()(const Vec3& x) const {
    if (grid_) {
        const Grid3D& g = *grid_;
        const double fx = (x.x - g.origin.x) / g.spacing.x;
        const double fy = (x.y - g.origin.y) / g.spacing.y;
        const double fz = (x.z - g.origin.z) / g.spacing.z;
        if (fx < 0 || fy < 0 || fz < 0 ||
            fx > double(g.counts[0] - 1) || fy > double(g.counts[1] - 1) ||
            fz > double(g.counts[2] - 1))
            return 0.0;
        auto cell = [](double f, std::size_t n) {
            std::size_t i = std::size_t(f);
            if (i >= n - 1) i = n - 2;
            return i;
        };
        const std::size_t ix = cell(fx, g.counts[0]);
        const std::size_t iy = cell(fy, g.counts[1]);
        const std::size_t iz = cell(fz, g.counts[2]);
        const double tx = fx - double(ix), ty = fy - double(iy), tz = fz - double(iz);
        double v = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) {
                    const double w = (a ? tx : 1 - tx) * (b ? ty : 1 - ty) * (c ? tz : 1 - tz);
                    v += w * samples_[g.index(ix + a, iy + b, iz + c)];
                }
        return v;
    }
    const double r = norm(x - support_center_);
    if (r >= support_radius_) return 0.0;
    double v = 0.0;
    for (const auto& b : bumps_) {
        const double d2 = norm2(x - b.center);
        v += b.amplitude * std::exp(-d2 / (2.0 * b.width * b.width));
    }
    return v * cutoff_(r);
}

SusceptibilityField SusceptibilityField::translated(const Vec3& v) const {
    if (grid_) throw std::logic_error("SusceptibilityField: translate only analytic fields");
    SusceptibilityField f = *this;
    for (auto& b : f.bumps_) b.center += v;
    f.support_center_ += v;
    return f;
}

SusceptibilityField SusceptibilityField::rotated_about_e3(double alpha) const {
    if (grid_) throw std::logic_error("SusceptibilityField: rotate only analytic fields");
    SusceptibilityField f = *this;
    const double c = std::cos(alpha), s = std::sin(alpha);
    for (auto& b : f.bumps_)
        b.center = {c * b.center.x - s * b.center.y, s * b.center.x + c * b.center.y, b.center.z};
    return f;
}

std::optional<std::pair<double, double>> ball_chord(const Vec3& y, const Direction& omega,
                                                    double radius) {
    // |y + s w|^2 = R^2  with |w| = 1
    const double b = dot(y, omega.vec());
    const double c = norm2(y) - radius * radius;
    const double disc = b * b - c;
    if (disc <= 0) return std::nullopt;
    const double rt = std::sqrt(disc);
    return std::make_pair(-b - rt, -b + rt);
}

RetardationProfile::RetardationProfile(const SusceptibilityField& field, double e0_magnitude,
                                       Ray ray)
    : field_(&field), e0_(e0_magnitude), ray_(ray) {
    if (e0_ < 0) throw std::invalid_argument("RetardationProfile: e0 must be >= 0");
    chord_ = ball_chord(ray_.y - field.support_center(), ray_.omega, field.support_radius());
    if (chord_ && e0_ != 0.0 && !field.is_zero()) {
        const auto line = [&](double s) { return (*field_)(ray_.at(s)); };
        tau_infinity_ = 0.5 * e0_ * e0_ * integrate(line, chord_->first, chord_->second, 1e-10);
    }
}

double RetardationProfile::tau(double s) const {
    if (!chord_ || e0_ == 0.0 || field_->is_zero()) return 0.0;
    if (s <= chord_->first) return 0.0;
    if (s >= chord_->second) return tau_infinity_;
    const auto line = [&](double sigma) { return (*field_)(ray_.at(sigma)); };
    return 0.5 * e0_ * e0_ * integrate(line, chord_->first, s, 1e-10);
}

RetardationProfile retardation(const SusceptibilityField& field, double e0_magnitude,
                               const Ray& ray) {
    return RetardationProfile(field, e0_magnitude, ray);
}

double xray_transform(const SusceptibilityField& field, const Direction& omega, const Vec3& y) {
    if (field.is_zero()) return 0.0;
    const auto chord = ball_chord(y - field.support_center(), omega, field.support_radius());
    if (!chord) return 0.0;
    const auto line = [&](double s) { return field(y + s * omega.vec()); };
    return integrate(line, chord->first, chord->second, 1e-10);
}

double tau_at(const SusceptibilityField& field, double e0_magnitude, const Direction& omega,
              const Vec3& x) {
    // treat x as the s = 0 point of its own line
    if (e0_magnitude == 0.0 || field.is_zero()) return 0.0;
    const auto chord = ball_chord(x - field.support_center(), omega, field.support_radius());
    if (!chord || chord->first >= 0.0) return 0.0;
    const double upper = std::min(0.0, chord->second);
    const auto line = [&](double s) { return field(x + s * omega.vec()); };
    return 0.5 * e0_magnitude * e0_magnitude * integrate(line, chord->first, upper, 1e-10);
}

} // namespace kerr
