#pragma once

// Compact subgroups of USp(4) with finitely many components, and the
// component-counting density: the proportion of components on which
// tr(wedge^2) is not constant.
//
// Conventions: the symplectic form is J = blockdiag(eps, eps) with
// eps = [[0, 1], [-1, 0]]. The similitude character is trivial on this
// unitary model, so tr(wedge^2 V (x) chi^-1) is just tr(wedge^2 V) here.

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ordinary/cyclotomic.hpp"

namespace ordinary {

using Complex = std::complex<double>;
using Mat4 = Eigen::Matrix4cd;
using Mat6 = Eigen::Matrix<Complex, 6, 6>;
using ExactMatrix = std::array<std::array<Cyclotomic, 4>, 4>;
using Fraction = boost::rational<std::int64_t>;

/// Identity components realized by abelian surfaces, embedded as
///   USP4     full group
///   SU2xSU2  blockdiag(A, B)
///   SU2_DIAG blockdiag(A, A)
///   U1xU1    diag(u, u^-1, v, v^-1)
///   SU2xU1   blockdiag(A, diag(v, v^-1))
///   U1_DIAG  diag(u, u^-1, u, u^-1)
enum class IdentityKind { USp4, SU2xSU2, SU2Diag, U1xU1, SU2xU1, U1Diag };

inline constexpr std::array<IdentityKind, 6> kAllKinds = {
    IdentityKind::USp4,  IdentityKind::SU2xSU2, IdentityKind::SU2Diag,
    IdentityKind::U1xU1, IdentityKind::SU2xU1,  IdentityKind::U1Diag};

std::string_view to_string(IdentityKind kind) noexcept;
std::optional<IdentityKind> kind_from_string(std::string_view text) noexcept;

/// Torus kinds have a diagonal identity component.
bool is_torus_kind(IdentityKind kind) noexcept;

struct GroupEntry {
    std::string id;
    IdentityKind kind = IdentityKind::USp4;
    bool realizable = true;
    int root_of_unity_order = 1;
    std::vector<ExactMatrix> exact_reps;                       // first one is the identity
    std::vector<Mat4> reps;                                    // floating-point rendering of exact_reps
    std::vector<std::pair<std::string, std::string>> metadata;  // in file order

    std::size_t component_count() const noexcept { return reps.size(); }

    /// Fills `reps` from `exact_reps`.
    void render();
};

const Mat4& symplectic_form();

/// Real basis of the identity component's Lie algebra, orthonormal for the
/// real Frobenius inner product.
const std::vector<Mat4>& lie_algebra_basis(IdentityKind kind);

/// Membership of a unitary symplectic matrix in the identity component,
/// decided by the block pattern of the embedding above.
bool in_identity_component(IdentityKind kind, const Mat4& x, double tol = 1e-10);

/// Element of the identity component: uniform angles on U(1) factors, uniform
/// unit quaternions on SU(2) factors, and for USP4 a product of exponentials
/// of three Gaussian Lie algebra elements.
Mat4 sample_identity_component(IdentityKind kind, std::mt19937_64& rng);

/// Haar-distributed element of the identity component up to conjugacy: exact
/// for every kind except USP4, where a maximal-torus element is drawn from the
/// Weyl density by rejection.
Mat4 haar_identity_component(IdentityKind kind, std::mt19937_64& rng);

/// (tr(M)^2 - tr(M^2)) / 2, the second elementary symmetric function of the eigenvalues.
Complex trace_wedge2(const Mat4& m);

/// Matrix of M acting on wedge^2 C^4 in the basis e_i ^ e_j, i < j.
Mat6 wedge2(const Mat4& m);

struct ConstancyOptions {
    std::uint64_t seed = 2024;
    int min_samples = 64;
    int stability_window = 16;
    int max_samples = 512;
    double rank_tol = 1e-8;
    double pairing_tol = 1e-9;
    double admissible_tol = 1e-6;
};

struct ComponentVerdict {
    std::size_t component_index = 0;
    bool constant = false;
    std::optional<double> value;       // present iff constant
    std::optional<bool> admissible;    // within tolerance of an integer in [-6, 6]
    int samples_used = 0;
    int span_rank = 0;
};

/// Decides whether h -> tr wedge^2(g h) is constant on the identity component,
/// g the component's representative. The function is linear in wedge^2(h), so
/// it is constant iff the functional vanishes on span{wedge^2(h) - I}. Throws
/// AnalysisError if the sampled span does not stabilize.
ComponentVerdict component_constancy(const GroupEntry& entry, std::size_t index, const ConstancyOptions& options = {});

struct ValidationCheck {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool passed() const noexcept;
    /// First failing check, if any.
    const ValidationCheck* first_failure() const noexcept;
};

/// identity-first, membership (g*g = I, g^T J g = J), normalizer (Lie algebra
/// conjugation), closure (every product lands in some coset) and distinct
/// cosets (no two representatives share a component).
ValidationReport validate_entry(const GroupEntry& entry);

struct DensityPrediction {
    Fraction density{0, 1};
    std::vector<ComponentVerdict> verdicts;
    std::vector<std::string> warnings;
};

/// (number of nonconstant components) / (number of components).
DensityPrediction predicted_density(const GroupEntry& entry, const ConstancyOptions& options = {});

struct MomentEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    int samples = 0;
};

/// Monte Carlo E[tr(wedge^2)^k] over a uniformly chosen component and Haar
/// samples of the identity component. k must lie in [0, 8].
MomentEstimate moment_estimate(const GroupEntry& entry, int k, int n_samples, std::uint64_t seed = 2024);

}  // namespace ordinary
