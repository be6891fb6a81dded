#include "ordinary/groups.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ordinary/errors.hpp"

namespace ordinary {

namespace {

constexpr Complex kI{0.0, 1.0};

Mat4 make_j() {
    Mat4 j = Mat4::Zero();
    j(0, 1) = 1.0;
    j(1, 0) = -1.0;
    j(2, 3) = 1.0;
    j(3, 2) = -1.0;
    return j;
}

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

Eigen::Matrix<double, 32, 1> to_real(const Mat4& m) {
    Eigen::Matrix<double, 32, 1> v;
    for (int i = 0; i < 16; ++i) {
        v(i) = m.data()[i].real();
        v(16 + i) = m.data()[i].imag();
    }
    return v;
}

Mat4 from_real(const Eigen::Matrix<double, 32, 1>& v) {
    Mat4 m;
    for (int i = 0; i < 16; ++i) m.data()[i] = Complex(v(i), v(16 + i));
    return m;
}

// Gram-Schmidt in the real inner product Re tr(A^* B).
std::vector<Mat4> orthonormalize(const std::vector<Mat4>& input) {
    std::vector<Eigen::Matrix<double, 32, 1>> basis;
    for (const Mat4& m : input) {
        Eigen::Matrix<double, 32, 1> v = to_real(m);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) v -= b.dot(v) * b;
        }
        if (v.norm() > 1e-12) basis.push_back(v / v.norm());
    }
    std::vector<Mat4> out;
    for (const auto& b : basis) out.push_back(from_real(b));
    return out;
}

Mat4 u1_generator(int a, int b) {
    Mat4 m = Mat4::Zero();
    m(a, a) = kI;
    m(b, b) = -kI;
    return m;
}

// su(2) on the coordinate pair (a, a+1), optionally repeated on (c, c+1).
std::vector<Mat4> su2_generators(int a, std::optional<int> c = std::nullopt) {
    std::vector<Mat4> out;
    const std::array<Eigen::Matrix2cd, 3> gens = [] {
        Eigen::Matrix2cd x, y, z;
        z << kI, 0.0, 0.0, -kI;
        x << 0.0, 1.0, -1.0, 0.0;
        y << 0.0, kI, kI, 0.0;
        return std::array<Eigen::Matrix2cd, 3>{z, x, y};
    }();
    for (const auto& g : gens) {
        Mat4 m = Mat4::Zero();
        m.block<2, 2>(a, a) = g;
        if (c) m.block<2, 2>(*c, *c) = g;
        out.push_back(m);
    }
    return out;
}

// Null space of X -> (X + X^*, X^T J + J X) over the reals.
std::vector<Mat4> usp4_algebra() {
    const Mat4& j = symplectic_form();
    Eigen::Matrix<double, 64, 32> constraint;
    for (int k = 0; k < 32; ++k) {
        Eigen::Matrix<double, 32, 1> e = Eigen::Matrix<double, 32, 1>::Zero();
        e(k) = 1.0;
        const Mat4 x = from_real(e);
        constraint.col(k).head<32>() = to_real(x + x.adjoint());
        constraint.col(k).tail<32>() = to_real(x.transpose() * j + j * x);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraint, Eigen::ComputeFullV);
    std::vector<Mat4> out;
    const auto& sv = svd.singularValues();
    for (int k = 0; k < 32; ++k) {
        if (sv(k) < 1e-10) out.push_back(from_real(svd.matrixV().col(k)));
    }
    return orthonormalize(out);
}

Eigen::Matrix2cd random_su2(std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double q[4];
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& x : q) {
            x = normal(rng);
            norm += x * x;
        }
    } while (norm < 1e-300);
    norm = std::sqrt(norm);
    const Complex alpha(q[0] / norm, q[1] / norm);
    const Complex beta(q[2] / norm, q[3] / norm);
    Eigen::Matrix2cd a;
    a << alpha, beta, -std::conj(beta), std::conj(alpha);
    return a;
}

Complex random_phase(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    return std::polar(1.0, angle(rng));
}

Mat4 torus_element(Complex u, Complex v) {
    Mat4 m = Mat4::Zero();
    m(0, 0) = u;
    m(1, 1) = std::conj(u);
    m(2, 2) = v;
    m(3, 3) = std::conj(v);
    return m;
}

// exp of an anti-Hermitian matrix through the Hermitian eigenproblem of iX.
Mat4 exp_anti_hermitian(const Mat4& x) {
    Eigen::SelfAdjointEigenSolver<Mat4> solver(kI * x);
    const auto& v = solver.eigenvectors();
    Eigen::Vector4cd phases;
    for (int i = 0; i < 4; ++i) phases(i) = std::polar(1.0, -solver.eigenvalues()(i));
    return v * phases.asDiagonal() * v.adjoint();
}

constexpr std::array<std::pair<int, int>, 6> kWedgeBasis = {
    std::pair{0, 1}, std::pair{0, 2}, std::pair{0, 3}, std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}};

bool exact_is_identity(const ExactMatrix& m) {
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const Cyclotomic delta(m[r][c].order(), r == c ? 1 : 0);
            if (!(m[r][c] - delta).is_zero()) return false;
        }
    }
    return true;
}

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

}  // namespace

std::string_view to_string(IdentityKind kind) noexcept {
    switch (kind) {
        case IdentityKind::USp4: return "USP4";
        case IdentityKind::SU2xSU2: return "SU2xSU2";
        case IdentityKind::SU2Diag: return "SU2_DIAG";
        case IdentityKind::U1xU1: return "U1xU1";
        case IdentityKind::SU2xU1: return "SU2xU1";
        case IdentityKind::U1Diag: return "U1_DIAG";
    }
    return "?";
}

std::optional<IdentityKind> kind_from_string(std::string_view text) noexcept {
    for (IdentityKind k : kAllKinds) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

bool is_torus_kind(IdentityKind kind) noexcept {
    return kind == IdentityKind::U1xU1 || kind == IdentityKind::U1Diag;
}

void GroupEntry::render() {
    reps.clear();
    for (const ExactMatrix& e : exact_reps) {
        Mat4 m;
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) m(r, c) = e[r][c].to_complex();
        }
        reps.push_back(m);
    }
}

const Mat4& symplectic_form() {
    static const Mat4 j = make_j();
    return j;
}

const std::vector<Mat4>& lie_algebra_basis(IdentityKind kind) {
    static const std::array<std::vector<Mat4>, 6> bases = [] {
        std::array<std::vector<Mat4>, 6> b;
        b[static_cast<int>(IdentityKind::USp4)] = usp4_algebra();
        {
            auto g = su2_generators(0);
            auto h = su2_generators(2);
            g.insert(g.end(), h.begin(), h.end());
            b[static_cast<int>(IdentityKind::SU2xSU2)] = orthonormalize(g);
        }
        b[static_cast<int>(IdentityKind::SU2Diag)] = orthonormalize(su2_generators(0, 2));
        b[static_cast<int>(IdentityKind::U1xU1)] = orthonormalize({u1_generator(0, 1), u1_generator(2, 3)});
        {
            auto g = su2_generators(0);
            g.push_back(u1_generator(2, 3));
            b[static_cast<int>(IdentityKind::SU2xU1)] = orthonormalize(g);
        }
        b[static_cast<int>(IdentityKind::U1Diag)] = orthonormalize({u1_generator(0, 1) + u1_generator(2, 3)});
        return b;
    }();
    return bases[static_cast<int>(kind)];
}

bool in_identity_component(IdentityKind kind, const Mat4& x, double tol) {
    const bool block_diagonal = x.block<2, 2>(0, 2).cwiseAbs().maxCoeff() < tol &&
                                x.block<2, 2>(2, 0).cwiseAbs().maxCoeff() < tol;
    const bool diagonal = block_diagonal && std::abs(x(0, 1)) < tol && std::abs(x(1, 0)) < tol &&
                          std::abs(x(2, 3)) < tol && std::abs(x(3, 2)) < tol;
    switch (kind) {
        case IdentityKind::USp4: return true;
        case IdentityKind::SU2xSU2: return block_diagonal;
        case IdentityKind::SU2Diag:
            return block_diagonal && (x.block<2, 2>(0, 0) - x.block<2, 2>(2, 2)).cwiseAbs().maxCoeff() < tol;
        case IdentityKind::SU2xU1:
            return block_diagonal && std::abs(x(2, 3)) < tol && std::abs(x(3, 2)) < tol;
        case IdentityKind::U1xU1: return diagonal;
        case IdentityKind::U1Diag: return diagonal && std::abs(x(0, 0) - x(2, 2)) < tol;
    }
    return false;
}

Mat4 sample_identity_component(IdentityKind kind, std::mt19937_64& rng) {
    Mat4 m = Mat4::Zero();
    switch (kind) {
        case IdentityKind::U1xU1: {
            const Complex u = random_phase(rng);
            const Complex v = random_phase(rng);
            return torus_element(u, v);
        }
        case IdentityKind::U1Diag: {
            const Complex u = random_phase(rng);
            return torus_element(u, u);
        }
        case IdentityKind::SU2xU1: {
            m.block<2, 2>(0, 0) = random_su2(rng);
            const Complex v = random_phase(rng);
            m(2, 2) = v;
            m(3, 3) = std::conj(v);
            return m;
        }
        case IdentityKind::SU2xSU2:
            m.block<2, 2>(0, 0) = random_su2(rng);
            m.block<2, 2>(2, 2) = random_su2(rng);
            return m;
        case IdentityKind::SU2Diag: {
            const Eigen::Matrix2cd a = random_su2(rng);
            m.block<2, 2>(0, 0) = a;
            m.block<2, 2>(2, 2) = a;
            return m;
        }
        case IdentityKind::USp4: {
            std::normal_distribution<double> normal(0.0, 1.0);
            const auto& basis = lie_algebra_basis(kind);
            Mat4 product = Mat4::Identity();
            for (int factor = 0; factor < 3; ++factor) {
                Mat4 x = Mat4::Zero();
                for (const Mat4& b : basis) x += normal(rng) * b;
                product = product * exp_anti_hermitian(x);
            }
            return product;
        }
    }
    return Mat4::Identity();
}

Mat4 haar_identity_component(IdentityKind kind, std::mt19937_64& rng) {
    if (kind != IdentityKind::USp4) return sample_identity_component(kind, rng);
    // Weyl density on eigenangles (t1, t2) in [0, pi]^2 is proportional to
    // (cos t1 - cos t2)^2 sin^2 t1 sin^2 t2, which is bounded by 4.
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr int kMaxAttempts = 100000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const double t1 = angle(rng);
        const double t2 = angle(rng);
        const double c = std::cos(t1) - std::cos(t2);
        const double density = c * c * std::sin(t1) * std::sin(t1) * std::sin(t2) * std::sin(t2);
        if (4.0 * unit(rng) <= density) return torus_element(std::polar(1.0, t1), std::polar(1.0, t2));
    }
    throw AnalysisError("USp(4) Weyl rejection sampler exceeded its attempt cap");
}

Complex trace_wedge2(const Mat4& m) {
    const Complex t = m.trace();
    return (t * t - (m * m).trace()) / 2.0;
}

Mat6 wedge2(const Mat4& m) {
    Mat6 w;
    for (int row = 0; row < 6; ++row) {
        const auto [i, j] = kWedgeBasis[row];
        for (int col = 0; col < 6; ++col) {
            const auto [k, l] = kWedgeBasis[col];
            w(row, col) = m(i, k) * m(j, l) - m(i, l) * m(j, k);
        }
    }
    return w;
}

ComponentVerdict component_constancy(const GroupEntry& entry, std::size_t index, const ConstancyOptions& options) {
    if (index >= entry.reps.size()) throw std::out_of_range("component index out of range");
    const Mat4& g = entry.reps[index];

    // f(h) - f(I) = tr(wedge2(g) (wedge2(h) - I)) = sum_{a,b} wedge2(g)(b, a) X(a, b)
    const Mat6 wg = wedge2(g);
    Eigen::Matrix<Complex, 36, 1> functional;
    for (int b = 0; b < 6; ++b) {
        for (int a = 0; a < 6; ++a) functional(a + 6 * b) = wg(b, a);
    }

    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(index)};
    std::mt19937_64 rng(seq);

    Eigen::MatrixXcd span(36, options.max_samples);
    int n = 0;
    int rank = -1;
    int stable = 0;
    auto numerical_rank = [&](const Eigen::JacobiSVD<Eigen::MatrixXcd>& svd) {
        int r = 0;
        for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
            if (svd.singularValues()(k) > options.rank_tol) ++r;
        }
        return r;
    };
    while (true) {
        if (n == options.max_samples) {
            throw AnalysisError("entry '" + entry.id + "' component " + std::to_string(index) +
                                ": span rank did not stabilize within " + std::to_string(options.max_samples) +
                                " samples");
        }
        const Mat4 h = sample_identity_component(entry.kind, rng);
        const Mat6 d = wedge2(h) - Mat6::Identity();
        span.col(n) = Eigen::Map<const Eigen::Matrix<Complex, 36, 1>>(d.data());
        ++n;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(span.leftCols(n));
        const int r = numerical_rank(svd);
        if (r == rank) {
            ++stable;
        } else {
            rank = r;
            stable = 0;
        }
        if (n >= options.min_samples && stable >= options.stability_window) break;
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(span.leftCols(n), Eigen::ComputeThinU);
    double worst = 0.0;
    for (int k = 0; k < rank; ++k) {
        const Complex pairing = (functional.transpose() * svd.matrixU().col(k))(0, 0);
        worst = std::max(worst, std::abs(pairing));
    }

    ComponentVerdict verdict;
    verdict.component_index = index;
    verdict.samples_used = n;
    verdict.span_rank = rank;
    verdict.constant = worst < options.pairing_tol;
    if (verdict.constant) {
        const double value = trace_wedge2(g).real();
        const double nearest = std::round(value);
        verdict.value = value;
        verdict.admissible = std::abs(value - nearest) < options.admissible_tol && std::abs(nearest) <= 6.0;
    }
    return verdict;
}

bool ValidationReport::passed() const noexcept { return first_failure() == nullptr; }

const ValidationCheck* ValidationReport::first_failure() const noexcept {
    for (const auto& c : checks) {
        if (!c.passed) return &c;
    }
    return nullptr;
}

ValidationReport validate_entry(const GroupEntry& entry) {
    constexpr double kTol = 1e-10;
    ValidationReport report;
    const Mat4& j = symplectic_form();
    const std::size_t n = entry.reps.size();

    {
        ValidationCheck c{"identity-first", true, ""};
        if (n == 0 || entry.exact_reps.size() != n) {
            c.passed = false;
            c.detail = "no representatives, or exact and floating renderings differ in length";
        } else if (!exact_is_identity(entry.exact_reps[0])) {
            c.passed = false;
            c.detail = "first representative is not the identity matrix";
        }
        report.checks.push_back(c);
    }
    {
        ValidationCheck c{"membership", true, ""};
        for (std::size_t i = 0; i < n; ++i) {
            const Mat4& g = entry.reps[i];
            const double unitary = max_abs(g.adjoint() * g - Mat4::Identity());
            const double symplectic = max_abs(g.transpose() * j * g - j);
            if (unitary >= kTol || symplectic >= kTol) {
                c.passed = false;
                c.detail = "representative " + std::to_string(i) + ": |g*g - I| = " + fmt_double(unitary) +
                           ", |g^T J g - J| = " + fmt_double(symplectic);
                break;
            }
        }
        report.checks.push_back(c);
    }
    {
        ValidationCheck c{"normalizer", true, ""};
        const auto& basis = lie_algebra_basis(entry.kind);
        for (std::size_t i = 0; i < n && c.passed; ++i) {
            const Mat4& g = entry.reps[i];
            const Mat4 g_inv = g.inverse();
            for (std::size_t b = 0; b < basis.size(); ++b) {
                const Mat4 y = g * basis[b] * g_inv;
                Eigen::Matrix<double, 32, 1> residual = to_real(y);
                for (const Mat4& x : basis) {
                    const auto xv = to_real(x);
                    residual -= xv.dot(residual) * xv;
                }
                if (residual.cwiseAbs().maxCoeff() >= kTol) {
                    c.passed = false;
                    c.detail = "representative " + std::to_string(i) + " moves Lie algebra basis element " +
                               std::to_string(b) + " off the algebra by " + fmt_double(residual.cwiseAbs().maxCoeff());
                    break;
                }
            }
        }
        report.checks.push_back(c);
    }
    std::vector<Mat4> inverses;
    for (const Mat4& g : entry.reps) inverses.push_back(g.inverse());
    {
        ValidationCheck c{"closure", true, ""};
        for (std::size_t a = 0; a < n && c.passed; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                const Mat4 gh = entry.reps[a] * entry.reps[b];
                bool found = false;
                for (std::size_t k = 0; k < n && !found; ++k) {
                    found = in_identity_component(entry.kind, gh * inverses[k], kTol);
                }
                if (!found) {
                    c.passed = false;
                    c.detail = "product of representatives " + std::to_string(a) + " and " + std::to_string(b) +
                               " lies in no listed component";
                    break;
                }
            }
        }
        report.checks.push_back(c);
    }
    {
        ValidationCheck c{"distinct-cosets", true, ""};
        for (std::size_t a = 0; a < n && c.passed; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (in_identity_component(entry.kind, entry.reps[a] * inverses[b], kTol)) {
                    c.passed = false;
                    c.detail = "representatives " + std::to_string(a) + " and " + std::to_string(b) +
                               " lie in the same component";
                    break;
                }
            }
        }
        report.checks.push_back(c);
    }
    return report;
}

DensityPrediction predicted_density(const GroupEntry& entry, const ConstancyOptions& options) {
    DensityPrediction out;
    std::int64_t nonconstant = 0;
    for (std::size_t i = 0; i < entry.component_count(); ++i) {
        ComponentVerdict v = component_constancy(entry, i, options);
        if (!v.constant) {
            ++nonconstant;
        } else if (!v.admissible.value_or(false)) {
            std::ostringstream os;
            os.precision(12);
            os << "component " << i << " has constant trace " << *v.value
               << ", not an integer in [-6, 6]";
            out.warnings.push_back(os.str());
        }
        out.verdicts.push_back(v);
    }
    if (entry.component_count() == 0) throw AnalysisError("entry '" + entry.id + "' has no components");
    if (!entry.realizable) out.warnings.push_back("entry '" + entry.id + "' is flagged as not realizable by an abelian surface");
    out.density = Fraction(nonconstant, static_cast<std::int64_t>(entry.component_count()));
    return out;
}

MomentEstimate moment_estimate(const GroupEntry& entry, int k, int n_samples, std::uint64_t seed) {
    if (k < 0 || k > 8) throw std::invalid_argument("moment order must lie in [0, 8]");
    if (n_samples <= 0) throw std::invalid_argument("moment estimate needs a positive sample count");
    if (k == 0) return {1.0, 0.0, n_samples};
    if (entry.kind == IdentityKind::USp4 && entry.component_count() > 1) {
        throw AnalysisError("USP4 is connected; torus sampling needs a single component");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, entry.component_count() - 1);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        const Mat4& g = entry.reps[pick(rng)];
        const Mat4 h = haar_identity_component(entry.kind, rng);
        const double x = std::pow(trace_wedge2(g * h).real(), k);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n_samples;
    const double var = n_samples > 1 ? (sum_sq - n_samples * mean * mean) / (n_samples - 1) : 0.0;
    return {mean, std::sqrt(std::max(var, 0.0) / n_samples), n_samples};
}

}  // namespace ordinary
