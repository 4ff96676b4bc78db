// SPDX-License-Identifier: Apache-2.0
#include "enclosure/brinkman.hpp"

#include "enclosure/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace enclosure {
namespace {

constexpr double pi = std::numbers::pi;
constexpr double inv4pi = 1.0 / (4.0 * pi);

// With psi = h(lambda r) / (4 pi lambda), h(z) = (exp(-z) - 1) / z, the tensor is
//   G = (1/mu) [C I - A xhat xhat^T],  C = Lap psi - psi'/r,  A = psi'' - psi'/r.
// dC and dA are the r-derivatives.
struct Radial {
    double C, A, dC, dA;
};

Radial radial_functions(double r, double lambda)
{
    const double z = lambda * r;
    double hz, Q, dQ; // h'/z, h'' - h'/z, and dQ/dz
    if (z < 2.0) {
        // h = sum_j c_j z^j with c_j = (-1)^{j+1} / (j+1)!
        hz = 0.0;
        Q = 0.0;
        dQ = 0.0;
        double c = 1.0; // |c_j|
        double zp = 1.0 / (z * z * z); // z^{j-3}
        for (int j = 0; j < 30; ++j) {
            if (j > 0)
                c /= (j + 1.0);
            const double cj = (j % 2 == 0) ? -c : c;
            hz += j * cj * zp * z;
            Q += j * (j - 2.0) * cj * zp * z;
            dQ += j * (j - 2.0) * (j - 2.0) * cj * zp;
            zp *= z;
        }
    } else {
        const double e = std::exp(-z);
        const double iz = 1.0 / z;
        const double iz2 = iz * iz, iz3 = iz2 * iz, iz4 = iz3 * iz;
        const double h1 = -(e * (iz + iz2) - iz2);
        const double h2 = e * (iz + 2.0 * iz2 + 2.0 * iz3) - 2.0 * iz3;
        const double h3 = -(e * (iz + 3.0 * iz2 + 6.0 * iz3 + 6.0 * iz4) - 6.0 * iz4);
        hz = h1 * iz;
        Q = h2 - h1 * iz;
        dQ = h3 - h2 * iz + h1 * iz2;
    }
    const double e = std::exp(-z);
    const double lap = e * inv4pi / r;
    const double dlap = -e * (1.0 + z) * inv4pi / (r * r);
    const double B = lambda * inv4pi * hz;
    const double A = lambda * inv4pi * Q;
    const double dA = lambda * lambda * inv4pi * dQ;
    const double dB = A / r;
    return {lap - B, A, dlap - dB, dA};
}

// Accumulates the field of a point force f at offset d (|d| = r, unit xhat).
void add_field(const Radial& k, const Vec3& xhat, double r, double inv_mu, const Vec3& f,
               Vec3& velocity, Mat3& grad, double& pressure, const Vec3& d)
{
    const double xf = xhat.dot(f);
    velocity += inv_mu * (k.C * f - k.A * xf * xhat);
    const Mat3 xx = xhat * xhat.transpose();
    grad += inv_mu * (k.dC * f * xhat.transpose() - k.dA * xf * xx -
                      (k.A / r) * (xf * Mat3::Identity() + xhat * f.transpose() - 2.0 * xf * xx));
    pressure += f.dot(d) * inv4pi / (r * r * r);
}

void check_lambda(double lambda, double mu)
{
    if (!(lambda > 0.0) || !(mu > 0.0))
        throw Error(ErrorCode::nonpositive_material, "brinkmanlet needs lambda > 0 and mu > 0");
}

} // namespace

BrinkmanTensor brinkman_tensor(const Vec3& offset, double lambda, double mu)
{
    check_lambda(lambda, mu);
    const double r = offset.norm();
    if (!(r > 0.0))
        throw Error(ErrorCode::evaluation_at_source, "brinkmanlet evaluated at its source");
    const Vec3 xhat = offset / r;
    const Radial k = radial_functions(r, lambda);
    const Mat3 xx = xhat * xhat.transpose();
    BrinkmanTensor t;
    t.G = (k.C * Mat3::Identity() - k.A * xx) / mu;
    for (int c = 0; c < 3; ++c) {
        Mat3 sym = Mat3::Zero(); // delta_ic xhat_j + delta_jc xhat_i
        sym.row(c) += xhat.transpose();
        sym.col(c) += xhat;
        t.dG[c] = (k.dC * xhat[c] * Mat3::Identity() - k.dA * xhat[c] * xx -
                   (k.A / r) * (sym - 2.0 * xhat[c] * xx)) /
                  mu;
    }
    t.P = offset * inv4pi / (r * r * r);
    return t;
}

FieldSample brinkmanlet_eval(const Brinkmanlet& b, const Vec3& x)
{
    check_lambda(b.lambda, b.mu);
    const Vec3 d = x - b.source;
    const double r = d.norm();
    if (!(r > 0.0))
        throw Error(ErrorCode::evaluation_at_source, "brinkmanlet evaluated at its source");
    FieldSample out;
    add_field(radial_functions(r, b.lambda), d / r, r, 1.0 / b.mu, b.strength, out.velocity,
              out.grad_velocity, out.pressure, d);
    out.stress = cauchy_stress(out.grad_velocity, out.pressure, b.mu);
    return out;
}

SourceSet place_sources(const Scene& scene, int inner_count, int outer_count, double alpha,
                        double beta)
{
    if (inner_count < 20 || outer_count < 20)
        throw Error(ErrorCode::too_few_nodes, "at least 20 sources per surface are required");
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 1.0))
        throw Error(ErrorCode::validation_error, "source factors need 0 < alpha < 1 < beta");
    // plain Fibonacci spiral; sphere_quadrature needs >= 50 nodes
    const auto lattice = [](const Ball& ball, int n) {
        std::vector<Vec3> pts(n);
        const double golden_angle = pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < n; ++i) {
            const double z = 1.0 - (2.0 * i + 1.0) / n;
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden_angle * i;
            pts[i] = ball.center + ball.radius * Vec3(rho * std::cos(phi), rho * std::sin(phi), z);
        }
        return pts;
    };
    SourceSet s;
    s.inner = lattice({scene.obstacle.center, alpha * scene.obstacle.radius}, inner_count);
    s.outer = lattice({scene.domain.center, beta * scene.domain.radius}, outer_count);
    return s;
}

Collocation default_collocation(const Scene& scene, const MfsOptions& options)
{
    const int nd = std::max(50, static_cast<int>(std::ceil(options.collocation_ratio *
                                                            options.inner_sources)));
    const int no = std::max(50, static_cast<int>(std::ceil(options.collocation_ratio *
                                                            options.outer_sources)));
    Collocation c;
    c.obstacle = sphere_quadrature(scene.obstacle, nd);
    c.domain = sphere_quadrature(scene.domain, no);
    // held-out nodes: a different lattice size never reproduces a fitting node
    c.obstacle_test = sphere_quadrature(scene.obstacle, nd + nd / 2 + 1);
    c.domain_test = sphere_quadrature(scene.domain, no + no / 2 + 1);
    return c;
}

double probe_samples(const ProbeSpec& probe, const SpectralParam& s, const std::vector<Vec3>& nodes,
                     std::vector<Vec3>& velocity)
{
    const ScaledValue coef = radial_coefficient(probe, s);
    std::vector<ScaledFieldSample> raw;
    raw.reserve(nodes.size());
    double scale = -std::numeric_limits<double>::infinity();
    for (const Vec3& x : nodes) {
        raw.push_back(probe_field_scaled(probe, s, x, coef));
        const double n = raw.back().mantissa.velocity.norm();
        if (n > 0.0)
            scale = std::max(scale, raw.back().log_scale + std::log(n));
    }
    if (!std::isfinite(scale))
        scale = 0.0;
    velocity.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        velocity[i] = raw[i].mantissa.velocity * std::exp(raw[i].log_scale - scale);
    return scale;
}

// A S = Q1 R1 (blocked Householder QR), then column-pivoted QR of R1 reveals
// the rank; pivots below truncation * max pivot are dropped.
struct MfsSystem::Factor {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr1;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr2;
    Eigen::VectorXd column_scale;

    Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const
    {
        const Eigen::MatrixXd c = qr1.householderQ().transpose() * b;
        return column_scale.asDiagonal() * qr2.solve(c.topRows(qr1.cols()));
    }
};

namespace {

void fill_rows(Eigen::MatrixXd& A, Eigen::Index row0, const std::vector<Vec3>& nodes,
               const std::vector<Vec3>& sources, double lambda, double mu)
{
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < sources.size(); ++j) {
            const Vec3 d = nodes[i] - sources[j];
            const double r = d.norm();
            const Vec3 xhat = d / r;
            const Radial k = radial_functions(r, lambda);
            A.block<3, 3>(row0 + 3 * i, 3 * j) =
                (k.C * Mat3::Identity() - k.A * xhat * xhat.transpose()) / mu;
        }
}

Eigen::MatrixXd assemble(const std::vector<Vec3>& obstacle_nodes,
                         const std::vector<Vec3>& domain_nodes, const std::vector<Vec3>& sources,
                         double lambda, double mu)
{
    const auto rows = static_cast<Eigen::Index>(3 * (obstacle_nodes.size() + domain_nodes.size()));
    Eigen::MatrixXd A(rows, static_cast<Eigen::Index>(3 * sources.size()));
    fill_rows(A, 0, obstacle_nodes, sources, lambda, mu);
    fill_rows(A, static_cast<Eigen::Index>(3 * obstacle_nodes.size()), domain_nodes, sources, lambda,
              mu);
    return A;
}

Vec3 model_velocity(const MfsModel& model, const Vec3& x)
{
    Vec3 u = Vec3::Zero();
    const std::size_t n_inner = model.inner_sources.size();
    for (std::size_t j = 0; j < model.coefficients.size(); ++j) {
        const Vec3& y = j < n_inner ? model.inner_sources[j] : model.outer_sources[j - n_inner];
        const Vec3 d = x - y;
        const double r = d.norm();
        const Vec3 xhat = d / r;
        const Radial k = radial_functions(r, model.lambda);
        const Vec3& f = model.coefficients[j];
        u += k.C * f - k.A * xhat.dot(f) * xhat;
    }
    return u / model.mu;
}

} // namespace

MfsSystem::MfsSystem(const Scene& scene, const SpectralParam& s, const MfsOptions& options)
    : MfsSystem(scene, s, options, default_collocation(scene, options))
{
}

MfsSystem::MfsSystem(const Scene& scene, const SpectralParam& s, const MfsOptions& options,
                     Collocation collocation)
    : scene_(validate_scene(scene)), s_(s), options_(options), collocation_(std::move(collocation))
{
    check_lambda(s.tau_tilde, s.medium.mu);
    sources_ = place_sources(scene_, options.inner_sources, options.outer_sources, options.alpha,
                             options.beta);
    if (collocation_.obstacle.size() < 2 * sources_.inner.size() ||
        collocation_.domain.size() < 2 * sources_.outer.size())
        throw Error(ErrorCode::too_few_nodes, "collocation needs at least twice the source count");
    std::vector<Vec3> all = sources_.inner;
    all.insert(all.end(), sources_.outer.begin(), sources_.outer.end());

    factor_ = std::make_unique<Factor>();
    Factor& f = *factor_;
    Eigen::MatrixXd A = assemble(collocation_.obstacle.nodes, collocation_.domain.nodes, all,
                                 s.tau_tilde, s.medium.mu);
    f.column_scale.resize(A.cols());
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        const double norm = A.col(j).norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw Error(ErrorCode::solver_failed, "degenerate collocation column");
        f.column_scale[j] = 1.0 / norm;
        A.col(j) /= norm;
    }
    f.qr1.compute(A);
    A.resize(0, 0);
    f.qr2.setThreshold(options.truncation);
    f.qr2.compute(f.qr1.matrixQR().topRows(f.qr1.cols()).triangularView<Eigen::Upper>());
    if (f.qr2.rank() == 0)
        throw Error(ErrorCode::solver_failed, "collocation matrix has rank zero");
}

MfsSystem::~MfsSystem() = default;
MfsSystem::MfsSystem(MfsSystem&&) noexcept = default;
MfsSystem& MfsSystem::operator=(MfsSystem&&) noexcept = default;

int MfsSystem::rank() const { return static_cast<int>(factor_->qr2.rank()); }

MfsModel MfsSystem::solve(const BoundaryData& target) const
{
    const std::size_t nd = collocation_.obstacle.size();
    const std::size_t no = collocation_.domain.size();
    const std::size_t td = collocation_.obstacle_test.size();
    const std::size_t to = collocation_.domain_test.size();
    if (target.obstacle.size() != nd || target.domain.size() != no ||
        target.obstacle_test.size() != td || target.domain_test.size() != to)
        throw Error(ErrorCode::validation_error, "boundary data does not match the collocation");

    double sup = 0.0;
    for (const auto* set : {&target.obstacle, &target.domain})
        for (const Vec3& v : *set)
            sup = std::max(sup, v.cwiseAbs().maxCoeff());
    double ref = 0.0;
    for (const auto* set : {&target.obstacle, &target.obstacle_test})
        for (const Vec3& v : *set)
            ref = std::max(ref, v.norm());

    MfsModel model;
    model.lambda = s_.tau_tilde;
    model.mu = s_.medium.mu;
    model.domain = scene_.domain;
    model.obstacle = scene_.obstacle;
    model.inner_sources = sources_.inner;
    model.outer_sources = sources_.outer;
    model.rank = rank();
    model.log_scale = target.log_scale;
    const std::size_t n_src = sources_.inner.size() + sources_.outer.size();
    model.coefficients.assign(n_src, Vec3::Zero());
    if (!(sup > 0.0))
        return model;

    // the factorization sees data of unit sup norm
    Eigen::VectorXd b(static_cast<Eigen::Index>(3 * (nd + no)));
    for (std::size_t i = 0; i < nd; ++i)
        b.segment<3>(static_cast<Eigen::Index>(3 * i)) = target.obstacle[i] / sup;
    for (std::size_t i = 0; i < no; ++i)
        b.segment<3>(static_cast<Eigen::Index>(3 * (nd + i))) = target.domain[i] / sup;
    const Eigen::VectorXd c = factor_->solve(b);
    if (!c.allFinite())
        throw Error(ErrorCode::solver_failed, "collocation solve produced non-finite coefficients");
    for (std::size_t j = 0; j < n_src; ++j)
        model.coefficients[j] = c.segment<3>(static_cast<Eigen::Index>(3 * j)) * sup;

    double worst = 0.0;
    for (std::size_t i = 0; i < td + to; ++i) {
        const bool on_obstacle = i < td;
        const Vec3& x = on_obstacle ? collocation_.obstacle_test.nodes[i]
                                    : collocation_.domain_test.nodes[i - td];
        const Vec3& want = on_obstacle ? target.obstacle_test[i] : target.domain_test[i - td];
        worst = std::max(worst, (model_velocity(model, x) - want).norm());
    }
    model.boundary_residual = ref > 0.0 ? worst / ref : worst;
    return model;
}

MfsModel MfsSystem::solve(const ProbeSpec& probe) const
{
    BoundaryData target;
    target.log_scale = probe_samples(probe, s_, collocation_.obstacle.nodes, target.obstacle);
    const double test_scale =
        probe_samples(probe, s_, collocation_.obstacle_test.nodes, target.obstacle_test);
    for (Vec3& v : target.obstacle)
        v = -v;
    for (Vec3& v : target.obstacle_test)
        v *= -std::exp(test_scale - target.log_scale);
    target.domain.assign(collocation_.domain.size(), Vec3::Zero());
    target.domain_test.assign(collocation_.domain_test.size(), Vec3::Zero());
    return solve(target);
}

MfsModel solve_reflected(const Scene& scene, const ProbeSpec& probe, const SpectralParam& s,
                         const MfsOptions& options)
{
    return MfsSystem(scene, s, options).solve(probe);
}

std::vector<ScaledFieldSample> evaluate_models_scaled(const std::vector<const MfsModel*>& models,
                                                      const Vec3& x)
{
    std::vector<ScaledFieldSample> out(models.size());
    if (models.empty())
        return out;
    const MfsModel& first = *models.front();
    const double tol = 1e-12 * first.domain.radius;
    if ((x - first.domain.center).norm() > first.domain.radius + tol ||
        (x - first.obstacle.center).norm() < first.obstacle.radius - tol)
        throw Error(ErrorCode::out_of_region, "model evaluated outside the closure of Omega \\ D");
    const double inv_mu = 1.0 / first.mu;
    const std::size_t n_inner = first.inner_sources.size();
    const std::size_t n_src = n_inner + first.outer_sources.size();
    for (std::size_t j = 0; j < n_src; ++j) {
        const Vec3& y = j < n_inner ? first.inner_sources[j] : first.outer_sources[j - n_inner];
        const Vec3 d = x - y;
        const double r = d.norm();
        const Vec3 xhat = d / r;
        const Radial k = radial_functions(r, first.lambda);
        for (std::size_t m = 0; m < models.size(); ++m) {
            FieldSample& f = out[m].mantissa;
            add_field(k, xhat, r, inv_mu, models[m]->coefficients[j], f.velocity, f.grad_velocity,
                      f.pressure, d);
        }
    }
    for (std::size_t m = 0; m < models.size(); ++m) {
        out[m].log_scale = models[m]->log_scale;
        FieldSample& f = out[m].mantissa;
        f.stress = cauchy_stress(f.grad_velocity, f.pressure, first.mu);
    }
    return out;
}

ScaledFieldSample evaluate_model_scaled(const MfsModel& model, const Vec3& x)
{
    return evaluate_models_scaled({&model}, x).front();
}

FieldSample evaluate_model(const MfsModel& model, const Vec3& x)
{
    return evaluate_model_scaled(model, x).value();
}

} // namespace enclosure
