#include "attbound/ellipsoid.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "attbound/so3.hpp"

namespace attbound {

bool contains(const EllipsoidRn& e, const Eigen::VectorXd& x) {
    if (x.size() != e.center.size()) {
        throw Error("contains: dimension mismatch");
    }
    const Eigen::VectorXd d = x - e.center;
    const double quad = d.dot(e.shape.ldlt().solve(d));
    return quad <= 1.0 + 1e-9;
}

double size(const EllipsoidRn& e) {
    return e.shape.trace();
}

bool state_membership(const StateEllipsoid& se, const AttitudeState& s) {
    StateDeviation dev;
    dev.rotation = log_so3(se.center.attitude.transpose() * s.attitude);
    dev.omega_delta = s.omega - se.center.omega;
    return contains(EllipsoidRn{Vec6::Zero(), se.uncertainty}, dev.stacked());
}

StateEllipsoid inflate(const StateEllipsoid& se, double factor) {
    return StateEllipsoid{se.center, factor * factor * se.uncertainty};
}

Eigen::MatrixXd minimal_sum(const std::vector<Eigen::MatrixXd>& terms) {
    if (terms.empty()) {
        throw Error("minimal_sum: no summands");
    }
    const Eigen::Index n = terms.front().rows();
    double max_trace = 0.0;
    for (const Eigen::MatrixXd& p : terms) {
        if (p.rows() != n || p.cols() != n) {
            throw Error("minimal_sum: summand size mismatch");
        }
        max_trace = std::max(max_trace, p.trace());
    }

    // Summands negligibly small against the dominant one would blow up the
    // 1/sqrt(tr) weighting; drop them.
    double root_sum = 0.0;
    Eigen::MatrixXd weighted = Eigen::MatrixXd::Zero(n, n);
    int kept = 0;
    for (const Eigen::MatrixXd& p : terms) {
        const double tr = p.trace();
        if (tr <= 1e-14 * max_trace) continue;
        const double root = std::sqrt(tr);
        root_sum += root;
        weighted += p / root;
        ++kept;
    }
    if (kept == 0) {
        throw Error("minimal_sum: all summands are degenerate");
    }
    Eigen::MatrixXd out = root_sum * weighted;
    return 0.5 * (out + out.transpose());
}

StateDeviation center_difference(const AttitudeState& measured_center,
                                 const AttitudeState& flow_center) {
    StateDeviation dev;
    dev.rotation = log_so3(measured_center.attitude.transpose() * flow_center.attitude);
    dev.omega_delta = flow_center.omega - measured_center.omega;
    return dev;
}

namespace {

struct FusionEval {
    Eigen::VectorXd center;
    Eigen::MatrixXd shape;
    double beta;
    double trace;
};

FusionEval evaluate_fusion(const Eigen::MatrixXd& pa, const Eigen::MatrixXd& pb,
                           const Eigen::VectorXd& d, double q) {
    const Eigen::MatrixXd l = pa * (pa + pb / q).inverse();
    FusionEval out;
    out.beta = 1.0 + q - d.dot(pa.ldlt().solve(l * d));
    out.center = l * d;
    // (I - L) P_a equals (P_a^{-1} + q P_b^{-1})^{-1}; the inverse form stays
    // well conditioned when q drives L toward the identity.
    Eigen::MatrixXd info = pa.inverse() + q * pb.inverse();
    Eigen::MatrixXd p = out.beta * info.inverse();
    out.shape = 0.5 * (p + p.transpose());
    out.trace = out.shape.trace();
    return out;
}

}  // namespace

FusionResult fuse_intersection(const EllipsoidRn& a, const EllipsoidRn& b,
                               std::optional<double> fixed_q) {
    if (a.dim() != b.dim()) {
        throw Error("fuse_intersection: dimension mismatch");
    }
    const Eigen::VectorXd d = b.center - a.center;

    if (fixed_q) {
        if (!(*fixed_q > 0.0)) {
            throw Error("fuse_intersection: q must be positive");
        }
        const FusionEval eval = evaluate_fusion(a.shape, b.shape, d, *fixed_q);
        if (!(eval.beta > 1e-12)) {
            throw EmptyIntersectionError(
                "empty intersection: supplied fusion parameter is inadmissible (inconsistent "
                "bounds or filter divergence)");
        }
        return FusionResult{a.center + eval.center, eval.shape, *fixed_q};
    }

    // Coarse scan over log10 q in [-6, 6]; only q with beta > 0 admissible.
    constexpr int kScanPoints = 50;
    constexpr double kLogLo = -6.0;
    constexpr double kLogHi = 6.0;
    const auto trace_at = [&](double log_q) {
        const FusionEval eval = evaluate_fusion(a.shape, b.shape, d, std::pow(10.0, log_q));
        return eval.beta > 1e-12 ? eval.trace : std::numeric_limits<double>::infinity();
    };

    int best = -1;
    double best_trace = std::numeric_limits<double>::infinity();
    std::array<double, kScanPoints> grid;
    for (int i = 0; i < kScanPoints; ++i) {
        grid[i] = kLogLo + (kLogHi - kLogLo) * i / (kScanPoints - 1);
        const double tr = trace_at(grid[i]);
        if (tr < best_trace) {
            best_trace = tr;
            best = i;
        }
    }
    if (best < 0) {
        throw EmptyIntersectionError(
            "empty intersection: no admissible fusion parameter (inconsistent bounds or "
            "filter divergence)");
    }

    // Golden-section refinement around the best scan point.
    double lo = grid[std::max(0, best - 1)];
    double hi = grid[std::min(kScanPoints - 1, best + 1)];
    const double gold = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gold * (hi - lo);
    double x2 = lo + gold * (hi - lo);
    double f1 = trace_at(x1);
    double f2 = trace_at(x2);
    while (hi - lo > 1e-10) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gold * (hi - lo);
            f1 = trace_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gold * (hi - lo);
            f2 = trace_at(x2);
        }
    }

    double log_q = 0.5 * (lo + hi);
    if (trace_at(grid[best]) < trace_at(log_q)) {
        log_q = grid[best];  // refinement fell off an admissibility edge
    }
    const double q = std::pow(10.0, log_q);
    const FusionEval eval = evaluate_fusion(a.shape, b.shape, d, q);
    if (!(eval.beta > 1e-12)) {
        throw EmptyIntersectionError(
            "empty intersection: fusion parameter search ended outside the admissible range");
    }

    // The q -> 0 limit discards the second ellipsoid and covers the
    // intersection with the first one unchanged. Its trace is the infimum
    // when the partner is uninformative; q = 0 marks that choice.
    if (a.shape.trace() < eval.trace) {
        Eigen::MatrixXd p = 0.5 * (a.shape + a.shape.transpose());
        return FusionResult{a.center, p, 0.0};
    }
    return FusionResult{a.center + eval.center, eval.shape, q};
}

namespace {

// Uniform doubles in [0, 1) built directly from the engine's 64-bit output,
// so sample streams do not depend on the standard library's distribution
// implementations.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double normal01(std::mt19937_64& rng) {
    const double u1 = std::max(uniform01(rng), 0x1.0p-53);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

std::vector<Eigen::VectorXd> sample_in(const EllipsoidRn& e, int count, std::uint64_t seed,
                                       SampleMode mode) {
    if (count < 1) {
        throw Error("sample_in: count must be >= 1");
    }
    const int n = e.dim();
    const Eigen::MatrixXd root = spd_sqrt(e.shape);
    std::mt19937_64 rng(seed);

    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        Eigen::VectorXd direction(n);
        do {
            for (int i = 0; i < n; ++i) direction[i] = normal01(rng);
        } while (direction.norm() < 1e-12);
        direction /= direction.norm();
        const double radius =
            mode == SampleMode::boundary ? 1.0 : std::pow(uniform01(rng), 1.0 / n);
        out.push_back(e.center + root * (radius * direction));
    }
    return out;
}

}  // namespace attbound
