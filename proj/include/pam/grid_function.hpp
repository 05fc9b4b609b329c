#pragma once

#include <functional>
#include <vector>

namespace pam {

// Nodal values on the uniform grid of [-R,R]^d with m cells (m+1 nodes) per
// axis, lexicographic node order (first coordinate most significant).
// Elements of F_R carry nonnegative values, vanish on boundary nodes and are
// normalized to trapezoidal integral 1; shapes psi use the same grid with
// values <= 0.
class GridFunction {
public:
    GridFunction() : GridFunction(1, 1, 1.0) {}
    GridFunction(int d, int m, double R);
    static GridFunction from_fn(int d, int m, double R,
                                const std::function<double(const std::vector<double>&)>& fn);

    int dim() const { return d_; }
    int cells() const { return m_; }
    double radius() const { return R_; }
    double h() const { return 2.0 * R_ / m_; }
    long node_count() const { return static_cast<long>(values_.size()); }

    long node_index(const std::vector<int>& k) const;
    std::vector<int> node_coord(long idx) const;
    std::vector<double> node_point(long idx) const;
    bool boundary_node(long idx) const;

    double value(long idx) const { return values_[static_cast<std::size_t>(idx)]; }
    void set_value(long idx, double v) { values_[static_cast<std::size_t>(idx)] = v; }
    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    // Trapezoid quadrature weight of a node (h/2 per boundary-touching axis).
    double node_weight(long idx) const;
    double integral() const;
    void normalize();  // rescale so the trapezoidal integral is 1

    // Multilinear interpolation; 0 outside [-R,R]^d.
    double interpolate(const std::vector<double>& x) const;
    GridFunction resample(int m_new) const;

private:
    int d_;
    int m_;
    double R_;
    std::vector<double> values_;
};

// I(f) = kappa * ||grad sqrt(f)||_2^2, differences centered at cell edges.
double functional_I(const GridFunction& f, double kappa);

// H_R(f) = H1 * int f^gamma for gamma in (0,1); H1 * |supp f| (cells whose
// corners are all positive) at gamma = 0. H1 < 0.
double functional_H_R(const GridFunction& f, double gamma, double H1);

// Pointwise Legendre transform sup_{y>=0} (psi*y - H1*y^gamma) for psi <= 0;
// 0 at psi = 0 (support convention).
double legendre_pointwise(double psi, double gamma, double H1);

// L_R(psi) = int of the pointwise transform (gamma in (0,1)); -H1 * |supp psi|
// at gamma = 0.
double legendre_L_R(const GridFunction& psi, double gamma, double H1);

// Principal eigenvalue of the finite-difference kappa*Delta + psi with
// Dirichlet boundary; support_restricted confines trial functions to
// {psi < 0}. Empty index set returns -inf (the lambda_R(0) = -inf convention).
// When ground is non-null it receives g^2 per node (normalized, sum 1; zero on
// excluded nodes), the Hellmann-Feynman derivative of lambda in psi.
double continuum_eigenvalue(const GridFunction& psi, double kappa, bool support_restricted,
                            std::vector<double>* ground = nullptr);

// psi_b(x) = psi(x/b) / b^2 on [-bR, bR]. Node-for-node: the transformed grid
// keeps m, so both Llscaling identities are exact on the discrete objects
// (resample() gives the fixed-resolution variant).
GridFunction scaling_transform(const GridFunction& psi, double b);

}  // namespace pam
