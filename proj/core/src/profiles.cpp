#include "kerr/profiles.hpp"

#include <algorithm>
#include <cmath>

#include "kerr/errors.hpp"

namespace kerr {

namespace {
constexpr double kFrameTol = 1e-12;

void require_transverse(const Direction& omega) {
    if (!omega.transverse_to_e3(kFrameTol))
        throw std::invalid_argument("profiles: direction must satisfy omega.e3 = 0 "
                                    "(bias field along e3)");
}
} // namespace

// ---------------------------------------------------------------------------
// beam construction

Vec3 BeamSpec::transverse_part(double x2, double x3) const {
    // (0, -d3 rho, d2 rho) for rho = (-a2 x3 + a3 x2) m(r)
    const double r = std::hypot(x2, x3);
    const double m = transverse(r);
    double u2 = a2 * m, u3 = a3 * m;
    if (r > 0) {
        const double md = transverse.d1(r) * (-a2 * x3 + a3 * x2) / r;
        u2 -= md * x3;
        u3 += md * x2;
    }
    return {0.0, u2, u3};
}

Vec3 BeamSpec::u_init(const Vec3& x) const {
    return transverse_part(x.y, x.z) * longitudinal(x.x - launch);
}

Vec3 BeamSpec::u_init_d1(const Vec3& x) const {
    return transverse_part(x.y, x.z) * longitudinal.d1(x.x - launch);
}

Vec3 BeamSpec::u_init_d2(const Vec3& x) const {
    return transverse_part(x.y, x.z) * longitudinal.d2(x.x - launch);
}

BeamSpec make_beam(double a2, double a3, double core_radius, double outer_radius, double h,
                   double launch, double window_inner, double window_outer) {
    if (a2 == 0.0 && a3 == 0.0)
        throw std::invalid_argument("make_beam: constant core needs (a2, a3) != (0, 0)");
    if (!(h > 0) || !(h < 1)) throw std::invalid_argument("make_beam: need h in (0, 1)");
    BeamSpec beam;
    beam.a2 = a2;
    beam.a3 = a3;
    beam.transverse = PlateauWindow(core_radius, outer_radius);
    beam.longitudinal = PlateauWindow(window_inner, window_outer);
    beam.launch = launch;
    beam.h = h;
    return beam;
}

SplitBeam split_initial(const BeamSpec& beam, const Direction& omega) {
    return SplitBeam{&beam, omega};
}

Vec3 dalembert_leading_field(const BeamSpec& beam, const Direction& omega, double t,
                             const Vec3& x) {
    const double phi_in = phase(t, x, omega);
    const double phi_out = outgoing_phase(t, x, omega);
    return beam.u_init(x - t * omega.vec()) * std::cos(phi_in / beam.h) +
           beam.u_init(x + t * omega.vec()) * std::cos(phi_out / beam.h);
}

// ---------------------------------------------------------------------------
// leading profile

RayProfileU0::RayProfileU0(const Vec3& initial, RetardationProfile retardation)
    : tau_(std::move(retardation)) {
    const Direction& omega = tau_.ray().omega;
    require_transverse(omega);
    operp_ = cross(Vec3{0, 0, 1}, omega.vec());
    init_perp_ = dot(initial, operp_);
    init_e3_ = initial.z;
    if (std::abs(dot(initial, omega.vec())) > 1e-10)
        throw std::invalid_argument("RayProfileU0: initial amplitude not orthogonal to omega");
}

std::pair<Complex, Complex> RayProfileU0::amplitude_frame(double s) const {
    const double tau = tau_(s);
    return {init_perp_ * std::exp(Complex(0, -tau)),
            init_e3_ * std::exp(Complex(0, -3.0 * tau))};
}

CVec3 RayProfileU0::amplitude(double s) const {
    const auto [ap, a3] = amplitude_frame(s);
    return {ap * operp_.x, ap * operp_.y, a3};
}

CVec3 RayProfileU0::initial() const {
    return {Complex(init_perp_ * operp_.x, 0), Complex(init_perp_ * operp_.y, 0),
            Complex(init_e3_, 0)};
}

RayProfileU0 propagate_U0(const BeamSpec& beam, const SusceptibilityField& field, double e0,
                          const Ray& ray) {
    require_transverse(ray.omega);
    return RayProfileU0(beam.u_init(ray.y), retardation(field, e0, ray));
}

Vec3 evaluate_leading_field(const BeamSpec& beam, const SusceptibilityField& field, double e0,
                            const Direction& omega, double t, const Vec3& x) {
    if (std::abs(omega[0] - 1.0) > kFrameTol || std::abs(omega[1]) > kFrameTol ||
        std::abs(omega[2]) > kFrameTol)
        throw std::invalid_argument("evaluate_leading_field: canonical frame omega = e1 required; "
                                    "rotate the susceptibility field instead");
    const double h = beam.h;
    const Vec3 u = beam.u_init(x - t * omega.vec());
    const double tau = tau_at(field, e0, omega, x);
    const double phi = phase(t, x, omega);
    const double amp = h * std::sqrt(h);
    Vec3 out{0.0, amp * u.y * std::cos(phi / h + tau), amp * u.z * std::cos(phi / h + 3.0 * tau)};
    out.z += std::sqrt(h) * e0;
    return out;
}

// ---------------------------------------------------------------------------
// polarization

Ellipse polarization_ellipse(Complex A2, Complex A3) {
    const double a = std::norm(A2), c = std::norm(A3);
    if (a == 0.0 && c == 0.0)
        throw std::invalid_argument("polarization_ellipse: (A2, A3) = (0, 0)");
    const double b = (A2 * std::conj(A3)).real();
    const double mean = 0.5 * (a + c);
    const double dev = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    Ellipse e;
    e.half_major = std::sqrt(std::max(mean + dev, 0.0));
    e.half_minor = std::sqrt(std::max(mean - dev, 0.0));
    e.orientation = 0.5 * std::atan2(2.0 * b, a - c);
    return e;
}

// ---------------------------------------------------------------------------
// higher-order modes

std::vector<ModeSolution> solve_nonzero_modes(int k, const std::vector<ModeSource>& sources,
                                              const RetardationProfile& retardation) {
    std::vector<ModeSolution> out;
    out.reserve(sources.size());
    for (const auto& src : sources) {
        if (src.ell == 0)
            throw Error("solve_nonzero_modes: ell = 0 is the zero harmonic; "
                        "use solve_zero_harmonic");
        if (std::abs(src.ell) > k + 2)
            throw std::invalid_argument("solve_nonzero_modes: |ell| > k + 2 cannot appear at "
                                        "this order");
        const std::size_t n = src.samples.size();
        if (n < 3 || !(src.ds > 0))
            throw std::invalid_argument("solve_nonzero_modes: need >= 3 uniform samples");

        std::vector<double> tau(n);
        for (std::size_t i = 0; i < n; ++i) tau[i] = retardation(src.s0 + double(i) * src.ds);

        const double ell = double(src.ell);
        const std::array<double, 3> mult{ell, ell, 3.0 * ell};
        const Complex pref = Complex(0, 1) / (2.0 * ell);

        ModeSolution sol;
        sol.order = k + 1;
        sol.ell = src.ell;
        sol.s0 = src.s0;
        sol.ds = src.ds;
        sol.values.assign(n, CVec3{});

        for (int c = 0; c < 3; ++c) {
            // integrating factor: U_c(s) = pref * e^{i m tau(s)} Int e^{-i m tau} f_c
            std::vector<Complex> g(n);
            for (std::size_t i = 0; i < n; ++i)
                g[i] = std::exp(Complex(0, -mult[c] * tau[i])) * src.samples[i][c];

            std::vector<Complex> I(n, Complex(0, 0));
            if (n >= 3) {
                I[1] = src.ds / 12.0 * (5.0 * g[0] + 8.0 * g[1] - g[2]);
                for (std::size_t i = 2; i < n; ++i)
                    I[i] = I[i - 1] + src.ds / 12.0 * (-g[i - 2] + 8.0 * g[i - 1] + 5.0 * g[i]);
            }
            for (std::size_t i = 0; i < n; ++i)
                sol.values[i][c] = pref * std::exp(Complex(0, mult[c] * tau[i])) * I[i];
        }
        out.push_back(std::move(sol));
    }
    return out;
}

// ---------------------------------------------------------------------------
// zero harmonics

Vec3 c2_source_at(const BeamSpec& beam, const SusceptibilityField& field, double e0, double t,
                  const Vec3& x) {
    const double chi = field(x);
    if (chi == 0.0 || e0 == 0.0) return {};
    const double tau = tau_at(field, e0, Direction::e1(), x);

    const Vec3 y = x - Vec3{t, 0, 0};
    const Vec3 u = beam.u_init(y);
    const Vec3 u1 = beam.u_init_d1(y);
    const Vec3 u2 = beam.u_init_d2(y);

    // A_j = U_j e^{-i m_j tau}; slow time derivatives hit the envelope only
    const Complex r1 = std::exp(Complex(0, -tau));
    const Complex r3 = std::exp(Complex(0, -3.0 * tau));
    const CVec3 A{u.x * r1, u.y * r1, u.z * r3};
    const CVec3 At{-u1.x * r1, -u1.y * r1, -u1.z * r3};
    const CVec3 Att{u2.x * r1, u2.y * r1, u2.z * r3};

    // theta averages of the quadratic forms: <Re(a e^{i t}) Re(b e^{i t})> = Re(a conj b)/2
    double at2 = 0.0, a_att = 0.0;
    Complex e0_att{}, e0_at{}, e0_a{};
    for (int j = 0; j < 3; ++j) {
        at2 += std::norm(At[j]);
        a_att += (A[j] * std::conj(Att[j])).real();
    }
    e0_att = e0 * Att[2];
    e0_at = e0 * At[2];
    e0_a = e0 * A[2];

    Vec3 F;
    // 2<|At|^2> E0 + 2<U.Utt> E0
    F.z += (at2 + a_att) * e0;
    for (int j = 0; j < 3; ++j) {
        // 2<(E0.Utt) U> + 4<(E0.Ut) Ut> + 2<(E0.U) Utt>
        F[j] += (e0_att * std::conj(A[j])).real();
        F[j] += 2.0 * (e0_at * std::conj(At[j])).real();
        F[j] += (e0_a * std::conj(Att[j])).real();
    }
    return F * (-chi);
}

SpaceTimeField sample_c2_source(const BeamSpec& beam, const SusceptibilityField& field, double e0,
                                const Grid3D& grid, double dt, std::size_t n_steps) {
    SpaceTimeField st;
    st.grid = grid;
    st.dt = dt;
    st.levels.assign(n_steps + 1, VectorField(grid.size(), Vec3{}));
    if (e0 == 0.0 || field.is_zero()) return st;

    // chi and tau are time independent; cache them and skip chi = 0 nodes
    const std::size_t nx = grid.counts[0], ny = grid.counts[1], nz = grid.counts[2];
    std::vector<std::pair<std::size_t, Vec3>> active;   // (index, node)
    ScalarField chi(grid.size(), 0.0), tau(grid.size(), 0.0);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t k = 0; k < nz; ++k) {
                const std::size_t id = grid.index(i, j, k);
                const Vec3 xn = grid.node(i, j, k);
                chi[id] = field(xn);
                if (chi[id] != 0.0) {
                    tau[id] = tau_at(field, e0, Direction::e1(), xn);
                    active.emplace_back(id, xn);
                }
            }

    for (std::size_t n = 0; n <= n_steps; ++n) {
        const double t = double(n) * dt;
        VectorField& level = st.levels[n];
        for (const auto& [id, xn] : active) {
            const Vec3 y = xn - Vec3{t, 0, 0};
            const Vec3 u = beam.u_init(y);
            const Vec3 u1 = beam.u_init_d1(y);
            const Vec3 u2 = beam.u_init_d2(y);
            const Complex r1 = std::exp(Complex(0, -tau[id]));
            const Complex r3 = std::exp(Complex(0, -3.0 * tau[id]));
            const CVec3 A{u.x * r1, u.y * r1, u.z * r3};
            const CVec3 At{-u1.x * r1, -u1.y * r1, -u1.z * r3};
            const CVec3 Att{u2.x * r1, u2.y * r1, u2.z * r3};

            double at2 = 0.0, a_att = 0.0;
            for (int j = 0; j < 3; ++j) {
                at2 += std::norm(At[j]);
                a_att += (A[j] * std::conj(Att[j])).real();
            }
            const Complex e0_att = e0 * Att[2], e0_at = e0 * At[2], e0_a = e0 * A[2];
            Vec3 F;
            F.z += (at2 + a_att) * e0;
            for (int j = 0; j < 3; ++j) {
                F[j] += (e0_att * std::conj(A[j])).real();
                F[j] += 2.0 * (e0_at * std::conj(At[j])).real();
                F[j] += (e0_a * std::conj(Att[j])).real();
            }
            level[id] = F * (-chi[id]);
        }
    }
    return st;
}

SpaceTimeField sample_ck_source_low_order(int k, const Grid3D& grid, double dt,
                                          std::size_t n_steps) {
    if (k != 0 && k != 1)
        throw std::invalid_argument("sample_ck_source_low_order: only orders 0 and 1 vanish "
                                    "identically");
    SpaceTimeField st;
    st.grid = grid;
    st.dt = dt;
    st.levels.assign(n_steps + 1, VectorField(grid.size(), Vec3{}));
    return st;
}

namespace {

// centered first difference along one axis, zero extension outside the grid
void centered_diff(const Grid3D& g, const ScalarField& f, int axis, ScalarField& out) {
    const std::size_t nx = g.counts[0], ny = g.counts[1], nz = g.counts[2];
    const double i2 = 0.5 / g.spacing[axis];
    out.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t k = 0; k < nz; ++k) {
                double plus = 0.0, minus = 0.0;
                if (axis == 0) {
                    if (i + 1 < nx) plus = f[g.index(i + 1, j, k)];
                    if (i >= 1) minus = f[g.index(i - 1, j, k)];
                } else if (axis == 1) {
                    if (j + 1 < ny) plus = f[g.index(i, j + 1, k)];
                    if (j >= 1) minus = f[g.index(i, j - 1, k)];
                } else {
                    if (k + 1 < nz) plus = f[g.index(i, j, k + 1)];
                    if (k >= 1) minus = f[g.index(i, j, k - 1)];
                }
                out[g.index(i, j, k)] = (plus - minus) * i2;
            }
}

ScalarField div_centered(const Grid3D& g, const VectorField& w) {
    ScalarField c(g.size()), tmp, comp(g.size());
    ScalarField out(g.size(), 0.0);
    for (int axis = 0; axis < 3; ++axis) {
        for (std::size_t id = 0; id < w.size(); ++id) comp[id] = w[id][axis];
        centered_diff(g, comp, axis, tmp);
        for (std::size_t id = 0; id < out.size(); ++id) out[id] += tmp[id];
    }
    return out;
}

VectorField grad_centered(const Grid3D& g, const ScalarField& f) {
    VectorField out(g.size(), Vec3{});
    ScalarField tmp;
    for (int axis = 0; axis < 3; ++axis) {
        centered_diff(g, f, axis, tmp);
        for (std::size_t id = 0; id < out.size(); ++id) out[id][axis] = tmp[id];
    }
    return out;
}

// wide Laplacian (centered first difference applied twice per axis),
// componentwise on a vector field
VectorField laplacian_wide(const Grid3D& g, const VectorField& w) {
    const std::size_t nx = g.counts[0], ny = g.counts[1], nz = g.counts[2];
    VectorField out(g.size(), Vec3{});
    const double cx = 0.25 / (g.spacing.x * g.spacing.x);
    const double cy = 0.25 / (g.spacing.y * g.spacing.y);
    const double cz = 0.25 / (g.spacing.z * g.spacing.z);
    auto get = [&](std::ptrdiff_t i, std::ptrdiff_t j, std::ptrdiff_t k) -> Vec3 {
        if (i < 0 || j < 0 || k < 0 || i >= std::ptrdiff_t(nx) || j >= std::ptrdiff_t(ny) ||
            k >= std::ptrdiff_t(nz))
            return {};
        return w[g.index(std::size_t(i), std::size_t(j), std::size_t(k))];
    };
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t k = 0; k < nz; ++k) {
                const std::ptrdiff_t I = std::ptrdiff_t(i), J = std::ptrdiff_t(j),
                                     K = std::ptrdiff_t(k);
                const Vec3 c = w[g.index(i, j, k)];
                Vec3 acc = (get(I + 2, J, K) - 2.0 * c + get(I - 2, J, K)) * cx;
                acc += (get(I, J + 2, K) - 2.0 * c + get(I, J - 2, K)) * cy;
                acc += (get(I, J, K + 2) - 2.0 * c + get(I, J, K - 2)) * cz;
                out[g.index(i, j, k)] = acc;
            }
    return out;
}

} // namespace

ZeroHarmonic solve_zero_harmonic(const SpaceTimeField& source, int order,
                                 bool keep_history) {
    const Grid3D& g = source.grid;
    const double dt = source.dt;
    const double dx_min = std::min({g.spacing.x, g.spacing.y, g.spacing.z});
    if (dt > 0.9 * dx_min / std::sqrt(3.0))
        throw CflError("solve_zero_harmonic: dt exceeds 0.9 dx / sqrt(3)");
    if (source.levels.size() < 3)
        throw std::invalid_argument("solve_zero_harmonic: need at least 3 time levels");
    for (const Vec3& v : source.levels.front())
        if (v.x != 0 || v.y != 0 || v.z != 0)
            throw std::invalid_argument("solve_zero_harmonic: source must vanish at t = 0");

    const std::size_t N = g.size();
    const std::size_t n_steps = source.levels.size() - 1;

    ZeroHarmonic zh;
    zh.order = order;
    zh.grid = g;
    zh.dt = dt;
    zh.sup_norm.reserve(n_steps + 1);

    VectorField c_prev(N, Vec3{}), c_curr(N, Vec3{});
    ScalarField i2_prev(N, 0.0), i2_curr(N, 0.0);
    ScalarField d_prev(N, 0.0), d_curr(N, 0.0);
    zh.sup_norm.push_back(0.0);
    zh.sup_norm.push_back(0.0);
    if (keep_history) {
        zh.history.push_back(c_prev);
        zh.history.push_back(c_curr);
    }

    double max_resid = 0.0;
    const double dt2 = dt * dt;
    for (std::size_t n = 1; n < n_steps; ++n) {
        const VectorField& F = source.levels[n];
        const ScalarField divF = div_centered(g, F);

        const VectorField lap = laplacian_wide(g, c_curr);
        const VectorField gI2 = grad_centered(g, i2_curr);
        VectorField c_next(N);
        double sup = 0.0;
        for (std::size_t id = 0; id < N; ++id) {
            c_next[id] = 2.0 * c_curr[id] - c_prev[id] +
                         dt2 * (lap[id] + F[id] - gI2[id]);
            sup = std::max(sup, norm(c_next[id]));
        }
        ScalarField i2_next(N);
        for (std::size_t id = 0; id < N; ++id)
            i2_next[id] = 2.0 * i2_curr[id] - i2_prev[id] + dt2 * divF[id];

        // divergence bookkeeping: d2/dt2 (div C) should reproduce div F
        const ScalarField d_next = div_centered(g, c_next);
        for (std::size_t id = 0; id < N; ++id) {
            const double lhs = (d_next[id] - 2.0 * d_curr[id] + d_prev[id]) / dt2;
            max_resid = std::max(max_resid, std::abs(lhs - divF[id]));
        }

        c_prev.swap(c_curr);
        c_curr = std::move(c_next);
        i2_prev.swap(i2_curr);
        i2_curr = std::move(i2_next);
        d_prev.swap(d_curr);
        d_curr = d_next;
        zh.sup_norm.push_back(sup);
        if (keep_history) zh.history.push_back(c_curr);
    }
    zh.final = std::move(c_curr);
    zh.divergence_residual = max_resid;
    return zh;
}

} // namespace kerr
