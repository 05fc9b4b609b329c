#pragma once

#include <string>
#include <vector>

#include "pam/field.hpp"
#include "pam/spectrum.hpp"

namespace pam {

enum class SolveMethod { expm, eigen, rk_adaptive };

std::string to_string(SolveMethod m);
SolveMethod parse_method(const std::string& s);

// Solution of du = kappa*Delta^d u + V u on the box with Dirichlet boundary.
// Values are indexed by box site; hard-trap sites are pinned to 0.
struct SolutionGrid {
    LatticeBox box;
    double t;
    double kappa;
    SolveMethod method;
    std::vector<double> values;

    double at(const std::vector<int>& z) const { return values[static_cast<std::size_t>(box.index(z))]; }
};

// u_R^V(t,.) with u(0,.) = 1 on the box.
SolutionGrid solve_dirichlet(const PotentialField& V, double kappa, double t,
                             SolveMethod method = SolveMethod::expm);

// Fundamental solution p_R^V(t,.,z) with delta initial condition at source.
SolutionGrid fundamental_solution(const PotentialField& V, double kappa, double t,
                                  const std::vector<int>& source,
                                  SolveMethod method = SolveMethod::eigen);

}  // namespace pam
