#include "kerr/stationary.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>

#include "kerr/errors.hpp"

namespace kerr {

namespace {

void check_cubic(const Grid3D& g) {
    if (g.spacing.x != g.spacing.y || g.spacing.y != g.spacing.z)
        throw std::invalid_argument("stationary: grid spacing must be equal per axis");
}

} // namespace

// ---------------------------------------------------------------------------
// discrete operators

VectorField gradient(const Grid3D& g, const ScalarField& u) {
    VectorField out(g.size());
    const std::size_t nx = g.counts[0], ny = g.counts[1], nz = g.counts[2];
    const double ix2 = 0.5 / g.spacing.x, iy2 = 0.5 / g.spacing.y, iz2 = 0.5 / g.spacing.z;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t k = 0; k < nz; ++k) {
                const std::size_t id = g.index(i, j, k);
                Vec3 v;
                // x
                if (i == 0)
                    v.x = (-3 * u[id] + 4 * u[g.index(1, j, k)] - u[g.index(2, j, k)]) * ix2;
                else if (i == nx - 1)
                    v.x = (3 * u[id] - 4 * u[g.index(nx - 2, j, k)] + u[g.index(nx - 3, j, k)]) * ix2;
                else
                    v.x = (u[g.index(i + 1, j, k)] - u[g.index(i - 1, j, k)]) * ix2;
                // y
                if (j == 0)
                    v.y = (-3 * u[id] + 4 * u[g.index(i, 1, k)] - u[g.index(i, 2, k)]) * iy2;
                else if (j == ny - 1)
                    v.y = (3 * u[id] - 4 * u[g.index(i, ny - 2, k)] + u[g.index(i, ny - 3, k)]) * iy2;
                else
                    v.y = (u[g.index(i, j + 1, k)] - u[g.index(i, j - 1, k)]) * iy2;
                // z
                if (k == 0)
                    v.z = (-3 * u[id] + 4 * u[g.index(i, j, 1)] - u[g.index(i, j, 2)]) * iz2;
                else if (k == nz - 1)
                    v.z = (3 * u[id] - 4 * u[g.index(i, j, nz - 2)] + u[g.index(i, j, nz - 3)]) * iz2;
                else
                    v.z = (u[g.index(i, j, k + 1)] - u[g.index(i, j, k - 1)]) * iz2;
                out[id] = v;
            }
    return out;
}

ScalarField divergence(const Grid3D& g, const VectorField& w) {
    ScalarField out(g.size(), 0.0);
    const std::size_t nx = g.counts[0], ny = g.counts[1], nz = g.counts[2];
    const double ix2 = 0.5 / g.spacing.x, iy2 = 0.5 / g.spacing.y, iz2 = 0.5 / g.spacing.z;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t k = 0; k < nz; ++k) {
                double d;
                if (i == 0)
                    d = (-3 * w[g.index(0, j, k)].x + 4 * w[g.index(1, j, k)].x -
                         w[g.index(2, j, k)].x) * ix2;
                else if (i == nx - 1)
                    d = (3 * w[g.index(nx - 1, j, k)].x - 4 * w[g.index(nx - 2, j, k)].x +
                         w[g.index(nx - 3, j, k)].x) * ix2;
                else
                    d = (w[g.index(i + 1, j, k)].x - w[g.index(i - 1, j, k)].x) * ix2;
                if (j == 0)
                    d += (-3 * w[g.index(i, 0, k)].y + 4 * w[g.index(i, 1, k)].y -
                          w[g.index(i, 2, k)].y) * iy2;
                else if (j == ny - 1)
                    d += (3 * w[g.index(i, ny - 1, k)].y - 4 * w[g.index(i, ny - 2, k)].y +
                          w[g.index(i, ny - 3, k)].y) * iy2;
                else
                    d += (w[g.index(i, j + 1, k)].y - w[g.index(i, j - 1, k)].y) * iy2;
                if (k == 0)
                    d += (-3 * w[g.index(i, j, 0)].z + 4 * w[g.index(i, j, 1)].z -
                          w[g.index(i, j, 2)].z) * iz2;
                else if (k == nz - 1)
                    d += (3 * w[g.index(i, j, nz - 1)].z - 4 * w[g.index(i, j, nz - 2)].z +
                          w[g.index(i, j, nz - 3)].z) * iz2;
                else
                    d += (w[g.index(i, j, k + 1)].z - w[g.index(i, j, k - 1)].z) * iz2;
                out[g.index(i, j, k)] = d;
            }
    return out;
}

ScalarField laplacian7(const Grid3D& g, const ScalarField& u) {
    ScalarField out(g.size(), 0.0);
    const std::size_t nx = g.counts[0], ny = g.counts[1], nz = g.counts[2];
    const double hx2 = 1.0 / (g.spacing.x * g.spacing.x);
    const double hy2 = 1.0 / (g.spacing.y * g.spacing.y);
    const double hz2 = 1.0 / (g.spacing.z * g.spacing.z);
    for (std::size_t i = 1; i + 1 < nx; ++i)
        for (std::size_t j = 1; j + 1 < ny; ++j)
            for (std::size_t k = 1; k + 1 < nz; ++k) {
                const std::size_t id = g.index(i, j, k);
                out[id] = (u[g.index(i + 1, j, k)] - 2 * u[id] + u[g.index(i - 1, j, k)]) * hx2 +
                          (u[g.index(i, j + 1, k)] - 2 * u[id] + u[g.index(i, j - 1, k)]) * hy2 +
                          (u[g.index(i, j, k + 1)] - 2 * u[id] + u[g.index(i, j, k - 1)]) * hz2;
            }
    return out;
}

double max_interior_abs(const Grid3D& g, const ScalarField& u, std::size_t margin) {
    double m = 0.0;
    const std::size_t nx = g.counts[0], ny = g.counts[1], nz = g.counts[2];
    for (std::size_t i = margin; i + margin < nx; ++i)
        for (std::size_t j = margin; j + margin < ny; ++j)
            for (std::size_t k = margin; k + margin < nz; ++k)
                m = std::max(m, std::abs(u[g.index(i, j, k)]));
    return m;
}

// ---------------------------------------------------------------------------
// sine-transform Poisson solver

struct PoissonDirichlet::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    double* buf = nullptr;
    std::vector<double> eig_x, eig_y, eig_z;
    std::size_t mx = 0, my = 0, mz = 0;   // interior counts

    ~Plans() {
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buf) fftw_free(buf);
    }
};

PoissonDirichlet::PoissonDirichlet(const Grid3D& grid) : grid_(grid), plans_(new Plans) {
    const std::size_t mx = grid.counts[0] - 2, my = grid.counts[1] - 2, mz = grid.counts[2] - 2;
    if (mx == 0 || my == 0 || mz == 0)
        throw std::invalid_argument("PoissonDirichlet: grid has no interior nodes");
    plans_->mx = mx;
    plans_->my = my;
    plans_->mz = mz;
    plans_->buf = fftw_alloc_real(mx * my * mz);
    // FFTW_ESTIMATE keeps planning deterministic run to run
    plans_->forward = fftw_plan_r2r_3d(int(mx), int(my), int(mz), plans_->buf, plans_->buf,
                                       FFTW_RODFT00, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_r2r_3d(int(mx), int(my), int(mz), plans_->buf, plans_->buf,
                                        FFTW_RODFT00, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    auto fill = [](std::vector<double>& eig, std::size_t m, double spacing) {
        eig.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double s = std::sin(M_PI * double(k + 1) / (2.0 * double(m + 1)));
            eig[k] = 4.0 * s * s / (spacing * spacing);
        }
    };
    fill(plans_->eig_x, mx, grid.spacing.x);
    fill(plans_->eig_y, my, grid.spacing.y);
    fill(plans_->eig_z, mz, grid.spacing.z);
}

PoissonDirichlet::~PoissonDirichlet() = default;

ScalarField PoissonDirichlet::solve(const ScalarField& g) const {
    const auto& p = *plans_;
    const std::size_t mx = p.mx, my = p.my, mz = p.mz;
    for (std::size_t i = 0; i < mx; ++i)
        for (std::size_t j = 0; j < my; ++j)
            for (std::size_t k = 0; k < mz; ++k)
                p.buf[(i * my + j) * mz + k] = g[grid_.index(i + 1, j + 1, k + 1)];
    fftw_execute(p.forward);
    const double nor = 1.0 / (8.0 * double(mx + 1) * double(my + 1) * double(mz + 1));
    for (std::size_t i = 0; i < mx; ++i)
        for (std::size_t j = 0; j < my; ++j)
            for (std::size_t k = 0; k < mz; ++k) {
                const double lam = p.eig_x[i] + p.eig_y[j] + p.eig_z[k];
                p.buf[(i * my + j) * mz + k] *= -nor / lam;
            }
    fftw_execute(p.backward);
    ScalarField v(grid_.size(), 0.0);
    for (std::size_t i = 0; i < mx; ++i)
        for (std::size_t j = 0; j < my; ++j)
            for (std::size_t k = 0; k < mz; ++k)
                v[grid_.index(i + 1, j + 1, k + 1)] = p.buf[(i * my + j) * mz + k];
    return v;
}

ScalarField poisson_dirichlet(const Grid3D& grid, const ScalarField& g) {
    return PoissonDirichlet(grid).solve(g);
}

ScalarField harmonic_extension(const DirichletProblem& problem) {
    const Grid3D& g = problem.grid;
    check_cubic(g);
    const std::size_t nx = g.counts[0], ny = g.counts[1], nz = g.counts[2];

    ScalarField u(g.size(), 0.0);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t k = 0; k < nz; ++k)
                if (g.is_boundary(i, j, k)) u[g.index(i, j, k)] = problem.boundary(g.node(i, j, k));

    // Lap_D v = -Lap(boundary extension) restricted to interior nodes
    ScalarField rhs = laplacian7(g, u);
    for (auto& r : rhs) r = -r;
    PoissonDirichlet solver(g);
    const ScalarField v = solver.solve(rhs);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += v[i];
    return u;
}

namespace {

ScalarField sample_chi(const Grid3D& g, const SusceptibilityField& chi) {
    ScalarField c(g.size());
    const std::size_t nx = g.counts[0], ny = g.counts[1], nz = g.counts[2];
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t k = 0; k < nz; ++k)
                c[g.index(i, j, k)] = chi(g.node(i, j, k));
    return c;
}

VectorField kerr_flux(const ScalarField& chi, const VectorField& grad) {
    VectorField w(grad.size());
    for (std::size_t id = 0; id < grad.size(); ++id)
        w[id] = grad[id] * (chi[id] * norm2(grad[id]));
    return w;
}

} // namespace

StrongFieldSolution fixed_point_solve(const DirichletProblem& problem, int max_iter, double tol,
                                      const ScalarField* initial) {
    const Grid3D& g = problem.grid;
    check_cubic(g);
    if (!(problem.h >= 0)) throw std::invalid_argument("fixed_point_solve: h must be >= 0");
    if (!problem.chi) throw std::invalid_argument("fixed_point_solve: chi not set");

    StrongFieldSolution sol;
    const ScalarField uf = harmonic_extension(problem);
    const ScalarField chi = sample_chi(g, *problem.chi);
    PoissonDirichlet solver(g);

    ScalarField psi = initial ? *initial : uf;
    if (psi.size() != g.size())
        throw std::invalid_argument("fixed_point_solve: initial iterate size mismatch");
    std::vector<double> diffs;
    int bad_ratio_streak = 0;
    const double stop = 0.1 * tol;
    for (int it = 0; it < max_iter; ++it) {
        const VectorField grad = gradient(g, psi);
        const ScalarField rhs = divergence(g, kerr_flux(chi, grad));
        const ScalarField corr = solver.solve(rhs);
        ScalarField next(psi.size());
        double diff = 0.0;
        for (std::size_t n = 0; n < psi.size(); ++n) {
            next[n] = uf[n] - problem.h * corr[n];
            diff = std::max(diff, std::abs(next[n] - psi[n]));
        }
        psi = std::move(next);
        diffs.push_back(diff);
        sol.iterations = it + 1;
        if (diffs.size() >= 2) {
            const double ratio = diffs.back() / std::max(diffs[diffs.size() - 2], 1e-300);
            if (ratio >= 1.0) {
                if (++bad_ratio_streak >= 3)
                    throw NonContractionError(
                        "fixed_point_solve: successive-difference ratio >= 1 for 3 iterations "
                        "(h too large for this chi/f)",
                        diffs);
            } else {
                bad_ratio_streak = 0;
            }
        }
        if (diff <= stop) break;
    }
    sol.difference_norms = diffs;
    sol.fixed_point_residual = diffs.empty() ? 0.0 : diffs.back();
    if (sol.fixed_point_residual > tol)
        throw NonContractionError("fixed_point_solve: max_iter reached before the tolerance",
                                  diffs);

    sol.psi = std::move(psi);
    sol.E = gradient(g, sol.psi);

    // PDE residual formed with the same discrete operators the iteration
    // uses: the 7-point Laplacian for the leading part, centered div for
    // the flux; reported away from the one-sided stencils at the faces
    const ScalarField lap = laplacian7(g, sol.psi);
    const ScalarField divw = divergence(g, kerr_flux(chi, sol.E));
    ScalarField resid(g.size());
    for (std::size_t n = 0; n < resid.size(); ++n)
        resid[n] = lap[n] + problem.h * divw[n];
    sol.residual_norm = max_interior_abs(g, resid, 2);
    return sol;
}

std::vector<ScalarField> expansion_terms(const DirichletProblem& problem, int n) {
    const Grid3D& g = problem.grid;
    check_cubic(g);
    if (n < 0) throw std::invalid_argument("expansion_terms: n must be >= 0");
    if (!problem.chi) throw std::invalid_argument("expansion_terms: chi not set");

    const ScalarField uf = harmonic_extension(problem);
    std::vector<ScalarField> coeff{uf};   // coeff[j] multiplies h^j
    if (n == 0) return coeff;

    const ScalarField chi = sample_chi(g, *problem.chi);
    PoissonDirichlet solver(g);
    const std::size_t N = g.size();

    // Picard in the polynomial-in-h representation: after m iterations the
    // coefficients through h^m are final.
    for (int sweep = 0; sweep < n; ++sweep) {
        std::vector<VectorField> grads(coeff.size());
        for (std::size_t j = 0; j < coeff.size(); ++j) grads[j] = gradient(g, coeff[j]);

        // W_m = sum_{a+b+c=m} (G_a . G_b) G_c, truncated above h^(n-1)
        std::vector<VectorField> W(std::min<std::size_t>(coeff.size() * 3 - 2, std::size_t(n)),
                                   VectorField(N, Vec3{}));
        for (std::size_t a = 0; a < coeff.size(); ++a)
            for (std::size_t b = 0; b < coeff.size(); ++b)
                for (std::size_t c = 0; c < coeff.size(); ++c) {
                    const std::size_t m = a + b + c;
                    if (m >= W.size()) continue;
                    for (std::size_t id = 0; id < N; ++id)
                        W[m][id] += grads[c][id] * dot(grads[a][id], grads[b][id]);
                }

        std::vector<ScalarField> next{uf};
        for (std::size_t m = 0; m < W.size(); ++m) {
            VectorField flux = W[m];
            for (std::size_t id = 0; id < N; ++id) flux[id] *= chi[id];
            const ScalarField corr = solver.solve(divergence(g, flux));
            ScalarField term(N);
            for (std::size_t id = 0; id < N; ++id) term[id] = -corr[id];
            next.push_back(std::move(term));
        }
        coeff = std::move(next);
    }

    coeff.resize(std::size_t(n) + 1, ScalarField(N, 0.0));
    return coeff;
}

} // namespace kerr
