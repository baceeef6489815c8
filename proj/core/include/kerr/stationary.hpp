#ifndef KERR_STATIONARY_HPP
#define KERR_STATIONARY_HPP

#include <functional>
#include <memory>
#include <vector>

#include "kerr/geometry.hpp"
#include "kerr/media.hpp"

namespace kerr {

/**
 * Dirichlet problem for the strong stationary field on the box
 * M = [-R0, R0]^3:
 *
 *     div( grad psi + h chi |grad psi|^2 grad psi ) = 0,   psi|dM = f.
 *
 * The box (rather than a ball) admits a direct sine-transform Poisson
 * solver; the support of chi stays well inside, so the choice of domain
 * shape does not enter the interior solution.
 */
struct DirichletProblem {
    Grid3D grid;                                   // cube grid including boundary nodes
    std::function<double(const Vec3&)> boundary;   // f, evaluated on boundary nodes
    const SusceptibilityField* chi = nullptr;
    double h = 0.01;
};

struct StrongFieldSolution {
    ScalarField psi;
    VectorField E;                    // discrete gradient of psi
    std::vector<ScalarField> expansion;
    double residual_norm = 0.0;       // max |div(grad psi + h chi |grad psi|^2 grad psi)|
                                      // away from a 2-cell boundary layer
    double fixed_point_residual = 0.0;
    int iterations = 0;
    std::vector<double> difference_norms;   // ||psi_{k+1} - psi_k||_inf per iteration
};

/** Direct solver for the 7-point Laplacian with zero Dirichlet data,
 *  diagonalized by the type-I discrete sine transform (FFTW). */
class PoissonDirichlet {
  public:
    explicit PoissonDirichlet(const Grid3D& grid);
    ~PoissonDirichlet();
    PoissonDirichlet(const PoissonDirichlet&) = delete;
    PoissonDirichlet& operator=(const PoissonDirichlet&) = delete;

    /** Solve Lap v = g, v = 0 on the boundary. g and v live on the full
     *  grid; boundary entries of g are ignored and v gets zeros there. */
    ScalarField solve(const ScalarField& g) const;

    const Grid3D& grid() const { return grid_; }

  private:
    struct Plans;
    Grid3D grid_;
    std::unique_ptr<Plans> plans_;
};

/** Discrete harmonic extension of the boundary data: 7-point Lap u = 0,
 *  u = f on the box faces. */
ScalarField harmonic_extension(const DirichletProblem& problem);

/** One-call variant of PoissonDirichlet::solve. */
ScalarField poisson_dirichlet(const Grid3D& grid, const ScalarField& g);

/**
 * Picard iteration psi <- u_f - h Lap_D^{-1} div(chi |grad psi|^2 grad psi),
 * run until the sup-norm of successive differences drops below tol (the
 * internal threshold is tol/10 so the reported PDE residual lands well
 * under 10 tol). Throws NonContractionError when the difference ratio
 * stays >= 1 for three consecutive iterations. `initial` overrides the
 * starting iterate (default u_f).
 */
StrongFieldSolution fixed_point_solve(const DirichletProblem& problem, int max_iter = 50,
                                      double tol = 1e-12, const ScalarField* initial = nullptr);

/** Coefficients psi^(0) .. psi^(n) of the h-expansion, extracted from the
 *  polynomial-in-h structure of the Picard iterates. */
std::vector<ScalarField> expansion_terms(const DirichletProblem& problem, int n);

// Discrete operators shared with tests: centered differences inside,
// second-order one-sided at the box faces.
VectorField gradient(const Grid3D& grid, const ScalarField& u);
ScalarField divergence(const Grid3D& grid, const VectorField& w);
ScalarField laplacian7(const Grid3D& grid, const ScalarField& u);
double max_interior_abs(const Grid3D& grid, const ScalarField& u, std::size_t margin);

} // namespace kerr

#endif
