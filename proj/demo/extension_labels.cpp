// Walks one extension through both labels: S_alpha on two half-lines, its
// unitary U_eps at a few eps, and T recovered from U_eps as eps -> 0.

#include <iostream>
#include <vector>

#include "extlab/calculus.hpp"
#include "extlab/models.hpp"

int main() {
    using namespace extlab;
    const double alpha = 1.5;
    const auto ext = make_salpha_extension(alpha);
    const auto probes = sample_domain(ext, 4);

    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const VnParameter vn = reconstruct_U(ext, Complex(0.0, eps), probes);
        std::cout << "eps=" << eps << "  U_eps =\n"
                  << "  [" << vn.matrix(0, 0) << ", " << vn.matrix(0, 1) << "]\n"
                  << "  [" << vn.matrix(1, 0) << ", " << vn.matrix(1, 1) << "]"
                  << "  unitarity defect " << vn.unitarity_defect << "\n";
    }

    const std::vector<double> grid{4e-4, 2e-4, 1e-4};
    const KvbReconstruction rec = reconstruct_T(ext, probes, grid);
    std::cout << "dim D(T) = " << rec.parameter.domain_basis.size() << ", T = " << rec.parameter.t_matrix(0, 0).real()
              << " (expected " << 2.0 + alpha << "), extrapolation error " << rec.extrapolation_error << "\n";
}
