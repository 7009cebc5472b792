#include "bosekin/collide.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bosekin {

CutoffParams::Family CutoffParams::family() const
{
    if (std::isfinite(n))
        return Family::Cutoff;
    if (std::isfinite(K))
        return Family::Intermediate;
    return Family::Original;
}

void CutoffParams::validate() const
{
    if (!(n > 0.0) || !(K > 0.0))
        throw InputError("CutoffParams: n and K must be positive (or infinite)");
}

CollisionOperator::CollisionOperator(KernelSpec kernel, VelocityGrid grid,
                                     AngularQuadrature quadrature)
    : kernel_(std::move(kernel)), grid_(grid), quadrature_(std::move(quadrature))
{
    kernel_.validate();
    if (quadrature_.size() == 0)
        throw InputError("CollisionOperator: empty angular quadrature");

    const auto partner = quadrature_.antipodal_partners();
    paired_ = !partner.empty();
    for (std::size_t a = 0; a < quadrature_.size(); ++a)
    {
        if (paired_)
        {
            // One representative per antipodal pair; it carries both weights.
            if (partner[a] < a)
                continue;
            sweep_sigma_.push_back(quadrature_.nodes()[a]);
            sweep_weight_.push_back(partner[a] == a ? quadrature_.weights()[a]
                                                    : 2.0 * quadrature_.weights()[a]);
        }
        else
        {
            sweep_sigma_.push_back(quadrature_.nodes()[a]);
            sweep_weight_.push_back(quadrature_.weights()[a]);
        }
    }
}

void CollisionOperator::check_field(const Eigen::ArrayXd& f, const char* where) const
{
    if (f.size() != grid_.size())
        throw InputError(std::string(where) + ": grid mismatch");
    for (Eigen::Index p = 0; p < f.size(); ++p)
        if (!(f[p] >= 0.0) || !std::isfinite(f[p]))
            throw InputError(std::string(where) + ": input must be finite and nonnegative");
}

namespace {

/// Zero-padded copy of a nodal field so that interpolation stencils never
/// need bounds checks.
struct PaddedField
{
    int n = 0;
    int pad = 0;
    int m = 0;
    std::vector<double> data;

    PaddedField(const VelocityGrid& grid, const Eigen::ArrayXd& f)
    {
        n = grid.points_per_axis();
        // v' stays within (sqrt(2)/2)(N-1) cells of the lattice; two more
        // cells cover the interpolation stencil.
        pad = static_cast<int>(std::ceil(0.7072 * (n - 1))) + 2;
        m = n + 2 * pad;
        data.assign(static_cast<std::size_t>(m) * m * m, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    data[index(i + pad, j + pad, k + pad)] = f[grid.index(i, j, k)];
    }

    std::size_t index(int i, int j, int k) const
    {
        return (static_cast<std::size_t>(i) * m + j) * m + k;
    }
};

/// Trilinear stencil for a fixed offset o (in cells) from the output node.
struct Stencil
{
    std::ptrdiff_t corner[8];
    double w[8];

    Stencil(const PaddedField& f, const Eigen::Vector3d& o)
    {
        const double flx = std::floor(o[0]), fly = std::floor(o[1]), flz = std::floor(o[2]);
        const std::ptrdiff_t m = f.m;
        const std::ptrdiff_t shift = (static_cast<std::ptrdiff_t>(flx) * m + static_cast<std::ptrdiff_t>(fly)) * m
                                     + static_cast<std::ptrdiff_t>(flz);
        const double ax = o[0] - flx, ay = o[1] - fly, az = o[2] - flz;
        int c = 0;
        for (int dx = 0; dx < 2; ++dx)
            for (int dy = 0; dy < 2; ++dy)
                for (int dz = 0; dz < 2; ++dz)
                {
                    w[c] = (dx ? ax : 1.0 - ax) * (dy ? ay : 1.0 - ay) * (dz ? az : 1.0 - az);
                    corner[c] = shift + (dx * m + dy) * m + dz;
                    ++c;
                }
    }

    /// Corner rows for output row (px, py): element pz of row c is corner c
    /// of the stencil around output node (px, py, pz).
    void rows(const PaddedField& f, int px, int py, const double* out[8]) const
    {
        const double* base = f.data.data() + f.index(px + f.pad, py + f.pad, f.pad);
        for (int c = 0; c < 8; ++c)
            out[c] = base + corner[c];
    }
};

inline double blend(const double* const r[8], const double w[8], int z)
{
    return w[0] * r[0][z] + w[1] * r[1][z] + w[2] * r[2][z] + w[3] * r[3][z] + w[4] * r[4][z]
           + w[5] * r[5][z] + w[6] * r[6][z] + w[7] * r[7][z];
}

int resolve_threads(int requested)
{
#ifdef _OPENMP
    return requested > 0 ? requested : omp_get_max_threads();
#else
    (void)requested;
    return 1;
#endif
}

/// B(speed, cos theta) with the hard-sphere case inlined.
KernelFunction kernel_function(const KernelSpec& spec)
{
    if (spec.family == KernelFamily::HardSphere)
    {
        const double scale = 1.0 / std::pow(spec.hbar, 4);
        return [scale](double speed, double) { return speed * scale; };
    }
    return [spec](double speed, double c) { return spec.evaluate(speed, c); };
}

/// Work is split into this many chunks independently of the thread count, and
/// chunk partial sums are reduced in chunk order, so results do not depend on
/// how many threads run.
constexpr int chunk_count = 32;

/// Output node box and the v*-node shift for one displacement D = P - Q.
struct PairBox
{
    int x0, x1, y0, y1, z0, z1;
    std::ptrdiff_t q_shift;  ///< flat index of Q minus flat index of P
};

/// Visits each unordered node pair once: displacements D in the half space
/// D > 0 (lexicographic) and the sweep sigma nodes. For each (D, sigma) the body
/// receives the node box, the kernel value, the weight (angular weight times
/// h^3) and the stencils of v' and v*' relative to P; the same v', v*' serve the
/// reversed pair (Q, P). The body writes into the chunk's `buffers` arrays.
template <typename KernelFn, typename Body>
std::vector<Eigen::ArrayXd> pair_sweep(const VelocityGrid& grid, KernelFn&& kernel,
                                       const PaddedField& layout,
                                       const std::vector<Eigen::Vector3d>& sigma,
                                       const std::vector<double>& weight, int threads,
                                       int outputs, Body&& body)
{
    const int n = grid.points_per_axis();
    const double h = grid.spacing();
    const double h3 = grid.cell_volume();

    std::vector<std::pair<int, int>> columns;
    for (int dx = 0; dx <= n - 1; ++dx)
        for (int dy = dx == 0 ? 0 : -(n - 1); dy <= n - 1; ++dy)
            columns.emplace_back(dx, dy);

    std::vector<std::vector<Eigen::ArrayXd>> partial(chunk_count);

#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
    for (int chunk = 0; chunk < chunk_count; ++chunk)
    {
        std::vector<Eigen::ArrayXd> buffers(outputs, Eigen::ArrayXd::Zero(grid.size()));
        for (std::size_t col = chunk; col < columns.size(); col += chunk_count)
        {
            const auto [dx, dy] = columns[col];
            const int dz_begin = (dx == 0 && dy == 0) ? 1 : -(n - 1);
            for (int dz = dz_begin; dz <= n - 1; ++dz)
            {
                const Eigen::Vector3d d(dx, dy, dz);
                const double len = d.norm();
                const double speed = h * len;
                PairBox box{std::max(0, dx), std::min(n - 1, n - 1 + dx),
                            std::max(0, dy), std::min(n - 1, n - 1 + dy),
                            std::max(0, dz), std::min(n - 1, n - 1 + dz),
                            -((static_cast<std::ptrdiff_t>(dx) * n + dy) * n + dz)};
                for (std::size_t a = 0; a < sigma.size(); ++a)
                {
                    const double b = kernel(speed, d.dot(sigma[a]) / len);
                    const Eigen::Vector3d o_prime = -0.5 * d + 0.5 * len * sigma[a];
                    const Eigen::Vector3d o_star = -d - o_prime;
                    const Stencil sp(layout, o_prime), ss(layout, o_star);
                    body(buffers, box, b, weight[a] * h3, sp, ss);
                }
            }
        }
        partial[chunk] = std::move(buffers);
    }

    std::vector<Eigen::ArrayXd> total(outputs, Eigen::ArrayXd::Zero(grid.size()));
    for (int chunk = 0; chunk < chunk_count; ++chunk)
        for (int k = 0; k < outputs; ++k)
            total[k] += partial[chunk][k];
    return total;
}

} // namespace

CollisionResult CollisionOperator::evaluate(const Eigen::ArrayXd& f,
                                            const CutoffParams& params) const
{
    params.validate();
    check_field(f, "collision operator");
    const double cap_n = params.n;
    const double cap_k = params.K;
    const int n = grid_.points_per_axis();

    const PaddedField padded(grid_, f);
    const Eigen::ArrayXd f_k = f.min(cap_k);
    const Eigen::ArrayXd f_n = f.min(cap_n);

    // Outputs: gain at P, gain at Q, loss rate at P, loss rate at Q.
    auto parts = pair_sweep(
        grid_, kernel_function(kernel_), padded, sweep_sigma_, sweep_weight_, threads_, 4,
        [&](std::vector<Eigen::ArrayXd>& buf, const PairBox& box, double b, double w,
            const Stencil& sp, const Stencil& ss) {
            const double c = w * std::min(b, cap_n);
            for (int px = box.x0; px <= box.x1; ++px)
            {
                for (int py = box.y0; py <= box.y1; ++py)
                {
                    const double* rp[8];
                    const double* rs[8];
                    sp.rows(padded, px, py, rp);
                    ss.rows(padded, px, py, rs);
                    const std::ptrdiff_t prow = (static_cast<std::ptrdiff_t>(px) * n + py) * n;
                    const std::ptrdiff_t qrow = prow + box.q_shift;
                    double* __restrict g_p = buf[0].data() + prow;
                    double* __restrict g_q = buf[1].data() + qrow;
                    double* __restrict r_p = buf[2].data() + prow;
                    double* __restrict r_q = buf[3].data() + qrow;
                    const double* fk_p = f_k.data() + prow;
                    const double* fk_q = f_k.data() + qrow;
                    const double* fn_p = f_n.data() + prow;
                    const double* fn_q = f_n.data() + qrow;
#pragma omp simd
                    for (int pz = box.z0; pz <= box.z1; ++pz)
                    {
                        const double a1 = blend(rp, sp.w, pz);
                        const double a2 = blend(rs, ss.w, pz);
                        const double t = c * (std::min(a1, cap_n) * std::min(a2, cap_n))
                                         * (1.0 + fk_p[pz] + fk_q[pz]);
                        const double bracket = c * (1.0 + std::min(a1, cap_k) + std::min(a2, cap_k));
                        g_p[pz] += t;
                        g_q[pz] += t;
                        r_p[pz] += bracket * fn_q[pz];
                        r_q[pz] += bracket * fn_p[pz];
                    }
                }
            }
        });

    CollisionResult result;
    result.gain = parts[0] + parts[1];
    result.loss_rate = parts[2] + parts[3];
    result.loss = f_n * result.loss_rate;
    result.net = result.gain - result.loss;
    result.velocity_nodes = grid_.size();
    result.angle_nodes = quadrature_.size();
    return result;
}

Eigen::ArrayXd CollisionOperator::gain_bilinear(const Eigen::ArrayXd& f, const Eigen::ArrayXd& g,
                                                double n) const
{
    if (!(n > 0.0))
        throw InputError("gain_bilinear: n must be positive");
    const auto b = kernel_function(kernel_);
    return gain_bilinear(f, g, [&](double speed, double c) { return std::min(b(speed, c), n); });
}

Eigen::ArrayXd CollisionOperator::gain_bilinear(const Eigen::ArrayXd& f, const Eigen::ArrayXd& g,
                                                const KernelFunction& kernel) const
{
    check_field(f, "q_plus_bilinear");
    check_field(g, "q_plus_bilinear");
    const int points = grid_.points_per_axis();
    const PaddedField pf(grid_, f);
    const PaddedField pg(grid_, g);
    // Every sweep node contributes the average of its two orientations, which
    // keeps the result symmetric in (f, g). A paired node carries both weights.
    const double fold = 0.5;

    auto parts = pair_sweep(
        grid_, kernel, pf, sweep_sigma_, sweep_weight_, threads_, 2,
        [&](std::vector<Eigen::ArrayXd>& buf, const PairBox& box, double b, double w,
            const Stencil& sp, const Stencil& ss) {
            const double c = fold * w * b;
            for (int px = box.x0; px <= box.x1; ++px)
            {
                for (int py = box.y0; py <= box.y1; ++py)
                {
                    const double* fp[8];
                    const double* fs[8];
                    const double* gp[8];
                    const double* gs[8];
                    sp.rows(pf, px, py, fp);
                    ss.rows(pf, px, py, fs);
                    sp.rows(pg, px, py, gp);
                    ss.rows(pg, px, py, gs);
                    const std::ptrdiff_t prow = (static_cast<std::ptrdiff_t>(px) * points + py) * points;
                    double* __restrict o_p = buf[0].data() + prow;
                    double* __restrict o_q = buf[1].data() + prow + box.q_shift;
#pragma omp simd
                    for (int pz = box.z0; pz <= box.z1; ++pz)
                    {
                        const double f1 = blend(fp, sp.w, pz);
                        const double f2 = blend(fs, ss.w, pz);
                        const double g1 = blend(gp, sp.w, pz);
                        const double g2 = blend(gs, ss.w, pz);
                        const double t = c * (f1 * g2 + g1 * f2);
                        o_p[pz] += t;
                        o_q[pz] += t;
                    }
                }
            }
        });
    return parts[0] + parts[1];
}

namespace {

void require_same_grid(const CollisionOperator& op, const DistributionState& f, const char* where)
{
    if (!(f.grid() == op.grid()))
        throw InputError(std::string(where) + ": grid mismatch");
}

} // namespace

Eigen::ArrayXd q_plus_bilinear(const CollisionOperator& op, const DistributionState& f,
                               const DistributionState& g, const CutoffParams& params)
{
    require_same_grid(op, f, "q_plus_bilinear");
    require_same_grid(op, g, "q_plus_bilinear");
    params.validate();
    return op.gain_bilinear(f.values(), g.values(), params.n);
}

CollisionResult collide(const CollisionOperator& op, const DistributionState& f,
                        const CutoffParams& params)
{
    require_same_grid(op, f, "collide");
    return op.evaluate(f.values(), params);
}

Eigen::ArrayXd q_gain(const CollisionOperator& op, const DistributionState& f,
                      const CutoffParams& params)
{
    return collide(op, f, params).gain;
}

Eigen::ArrayXd q_loss(const CollisionOperator& op, const DistributionState& f,
                      const CutoffParams& params)
{
    return collide(op, f, params).loss;
}

Eigen::ArrayXd l_k(const CollisionOperator& op, const DistributionState& f, double K)
{
    if (!(K > 0.0))
        throw InputError("l_k: K must be positive");
    return collide(op, f, CutoffParams::intermediate(K)).loss_rate;
}

} // namespace bosekin
