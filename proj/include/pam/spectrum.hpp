#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <vector>

#include "pam/field.hpp"

namespace pam {

// Spectrum of kappa*Delta^d + V on the active (non-hard-trap) sites of the
// box, Dirichlet boundary. Eigenvalues sorted descending; eigenvector k is
// column k over active sites (zero elsewhere by convention).
struct DirichletSpectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;     // n_active x n_pairs
    std::vector<long> active_sites;   // box site indices matching rows
    long total_sites = 0;
    double kappa = 0.0;

    // lambda_1, or -inf when there are no active sites.
    double principal() const;
};

// Sparse operator kappa*Delta^d + V restricted to active sites.
Eigen::SparseMatrix<double> anderson_operator(const PotentialField& V, double kappa,
                                              std::vector<long>* active_sites = nullptr);

// Dense solve for <= 2000 active sites, Lanczos extremal pairs above.
DirichletSpectrum dirichlet_spectrum(const PotentialField& V, double kappa,
                                     std::optional<int> k_max = std::nullopt);

// Principal eigenvalue only (-inf when no active sites).
double principal_eigenvalue(const PotentialField& V, double kappa);

// lambda^d_{z;R}(V): principal eigenvalue in the shifted window z + Q_R.
double shifted_principal_eigenvalue(const PotentialField& ambient,
                                    const std::vector<int>& center, int radius,
                                    double kappa);

// Lanczos with full reorthogonalization for the top-k eigenpairs of a
// symmetric matrix given through its action.
struct LanczosResult {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // n x k
};
// start, when given, seeds the Krylov basis (a good guess cuts the iteration
// count by an order of magnitude for slowly varying operator families).
LanczosResult lanczos_topk(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
                           long n, int k, double tol = 1e-10, int max_iter = 600,
                           const Eigen::VectorXd* start = nullptr);

}  // namespace pam
