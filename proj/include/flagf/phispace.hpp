#pragma once

// Homogeneous Phi-spaces SO(n)/SO(2)x...xSO(2)xSO(n-2m-1) generated by
// conjugation with a block-diagonal orthogonal matrix, and their canonical
// reductive decomposition so(n) = h + m.

#include "flagf/liealg.hpp"

namespace flagf {

/// Parameters and conjugating matrix of the inner automorphism X -> B X B^-1.
struct AutomorphismSpec {
    int n = 0;
    int m_blocks = 0;
    int k = 0;
    Eigen::MatrixXd B;
};

/// B = diag{1, eps_1, ..., eps_m, -1, ..., -1}, eps_t the rotation by 2*pi*t/k.
/// Throws std::invalid_argument unless n >= 4, m_blocks >= 1, k even, k > 2,
/// k >= 2*m_blocks - 2 and n - 2*m_blocks - 1 >= 0.
AutomorphismSpec build_automorphism(int n, int m_blocks, int k);

/// Expected dim h when the rotation angles 2*pi*t/k (t = 1..m) are pairwise
/// distinct up to sign and avoid 0 and pi, i.e. k > 2*m_blocks.
int expected_isotropy_dim(int n, int m_blocks);

struct PhiSpace {
    AutomorphismSpec spec;
    int order = 0;
    SubspacePtr g;  ///< so(n), standard basis
    EndoOnM phi;    ///< X -> B X B^T on g
    SubspacePtr h;  ///< ker(phi - id)
    SubspacePtr m;  ///< image(phi - id)
    EndoOnM theta;  ///< phi restricted to m
};

/// Throws std::runtime_error if conjugation does not have order exactly k
/// on so(n).
PhiSpace build_phi_space(const AutomorphismSpec& spec);

/// Lower-level constructor for an arbitrary orthogonal conjugator. `order`
/// is checked as the exact order of X -> B X B^T on so(n). Used for the
/// degenerate identity space and for other test fixtures.
PhiSpace build_phi_space_from_conjugator(const Eigen::MatrixXd& B, int order);

/// Smallest j in [1, max_order] with phi^j = id within tol::num, or 0.
int operator_order(const EndoOnM& phi, int max_order);

struct RegularityReport {
    bool direct_sum = false;              ///< g = h + A g
    bool restricted_nonsingular = false;  ///< A restricted to A g is invertible
    bool kernel_stable = false;           ///< ker A^2 = ker A
    bool theta_no_unit_eigenvalue = false;
    double min_singular_restricted = 0.0;
    double min_eigen_gap = 0.0;  ///< min |lambda - 1| over eigenvalues of theta

    bool all() const
    {
        return direct_sum && restricted_nonsingular && kernel_stable && theta_no_unit_eigenvalue;
    }
    bool consistent() const
    {
        return direct_sum == restricted_nonsingular && restricted_nonsingular == kernel_stable &&
               kernel_stable == theta_no_unit_eigenvalue;
    }
};

RegularityReport check_regularity(const PhiSpace& ps);

}  // namespace flagf
