#include "far3/synth.hpp"

#include <cmath>

#include "far3/baselines.hpp"
#include "far3/errors.hpp"
#include "far3/fa3r.hpp"

namespace far3 {

double Rng::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) {
    return a + (b - a) * uniform();
}

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

Mat3 euler_to_rotation(double phi, double theta, double psi) {
    double cf = std::cos(phi), sf = std::sin(phi);
    double ct = std::cos(theta), st = std::sin(theta);
    double cp = std::cos(psi), sp = std::sin(psi);
    Mat3 c;
    c.m[0][0] = cp * ct;
    c.m[0][1] = cp * st * sf - sp * cf;
    c.m[0][2] = cp * st * cf + sp * sf;
    c.m[1][0] = sp * ct;
    c.m[1][1] = sp * st * sf + cp * cf;
    c.m[1][2] = sp * st * cf - cp * sf;
    c.m[2][0] = -st;
    c.m[2][1] = ct * sf;
    c.m[2][2] = ct * cf;
    return c;
}

EulerAngles euler_from_rotation(const Mat3& c) {
    EulerAngles e;
    double s = -c.m[2][0];
    if (s > 1.0) s = 1.0;
    if (s < -1.0) s = -1.0;
    e.theta = std::asin(s);
    if (M_PI / 2.0 - std::fabs(e.theta) < 1e-9) {
        e.gimbal_lock = true;
        e.phi = 0.0;
        // Only phi -+ psi is observable at the lock; attribute all of it to psi.
        if (s > 0.0)
            e.psi = -std::atan2(c.m[0][1], c.m[0][2]);
        else
            e.psi = std::atan2(-c.m[0][1], -c.m[0][2]);
    } else {
        e.phi = std::atan2(c.m[2][1], c.m[2][2]);
        e.psi = std::atan2(c.m[1][0], c.m[0][0]);
    }
    return e;
}

namespace {

Vec3 random_unit(Rng& rng) {
    for (;;) {
        Vec3 g{rng.gaussian(), rng.gaussian(), rng.gaussian()};
        double n = norm(g);
        if (n > 1e-12) return g / n;
    }
}

}  // namespace

std::pair<PointPairSet, RigidTransform> generate(const SynthSpec& spec) {
    Rng rng(spec.rng_seed);
    RigidTransform truth;
    truth.rotation = euler_to_rotation(spec.phi, spec.theta, spec.psi);
    truth.translation = spec.true_translation;

    Vec3 u, v;
    if (spec.target_rank <= 2) u = random_unit(rng);
    if (spec.target_rank == 2) {
        for (;;) {
            Vec3 g = random_unit(rng);
            Vec3 w = g - dot(g, u) * u;
            if (norm(w) > 1e-6) {
                v = normalized(w);
                break;
            }
        }
    }

    Vec3 sd{std::sqrt(spec.noise_variances.x), std::sqrt(spec.noise_variances.y),
            std::sqrt(spec.noise_variances.z)};

    PointPairSet pairs;
    pairs.reference_points.reserve(spec.n_points);
    pairs.body_points.reserve(spec.n_points);
    double box = spec.point_box;
    for (int i = 0; i < spec.n_points; ++i) {
        Vec3 r;
        switch (spec.target_rank) {
            case 1:
                r = rng.uniform(-box, box) * u;
                break;
            case 2:
                r = rng.uniform(-box, box) * u + rng.uniform(-box, box) * v;
                break;
            default:
                r = {rng.uniform(-box, box), rng.uniform(-box, box), rng.uniform(-box, box)};
                break;
        }
        Vec3 noise{sd.x * rng.gaussian(), sd.y * rng.gaussian(), sd.z * rng.gaussian()};
        pairs.reference_points.push_back(r);
        pairs.body_points.push_back(apply(truth, r) + noise);
    }
    return {std::move(pairs), truth};
}

double snr(const PointPairSet& pairs, const Vec3& true_translation) {
    auto [rm, bm] = centroids(pairs);
    double denom = norm(bm - true_translation);
    if (denom < 1e-300) throw ZeroDenominator("rotated centroid norm is zero");
    return norm(rm) / denom;
}

double metric_error(const PointPairSet& pairs, const RigidTransform& t) {
    double s = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        s += norm2(pairs.body_points[i] - apply(t, pairs.reference_points[i]));
    return s / static_cast<double>(pairs.size());
}

std::array<SynthSpec, 9> case_catalog_specs() {
    std::array<SynthSpec, 9> specs;
    auto motion = [&](int i, double f, double t, double p, Vec3 tr) {
        specs[i].phi = f;
        specs[i].theta = t;
        specs[i].psi = p;
        specs[i].true_translation = tr;
    };
    for (int i = 0; i < 3; ++i) {
        motion(i, -0.52359878, 1.1423973, -2.2439948, {100.0, -50.0, 80.0});
        specs[i].n_points = 100;
        specs[i].target_rank = 3 - i;
    }
    for (int i = 3; i < 6; ++i) {
        motion(i, 1.7951958, 1.5707963, -1.4137167, {-60.0, 70.0, 40.0});
        specs[i].noise_variances = {10.0, 10.0, 10.0};
    }
    specs[3].n_points = 100;
    specs[4].n_points = 1000;
    specs[5].n_points = 10000;
    for (int i = 6; i < 9; ++i) {
        motion(i, -1.3962634, -0.9424778, -2.1749488, {80.0, -20.0, -160.0});
        specs[i].n_points = 1000;
    }
    specs[6].noise_variances = {0.1, 10.0, 1000.0};
    specs[7].noise_variances = {1000.0, 10.0, 0.1};
    specs[8].noise_variances = {0.1, 0.1, 0.1};
    for (int i = 0; i < 9; ++i) specs[i].rng_seed = 9001 + i;
    return specs;
}

std::vector<EvalRecord> run_case_catalog() {
    std::vector<EvalRecord> records;
    auto specs = case_catalog_specs();
    for (int i = 0; i < 9; ++i) {
        auto [pairs, truth] = generate(specs[i]);
        SolverReport reports[3] = {svd_register(pairs),
                                   eig_register(pairs, EigMatrix::W),
                                   fa3r_register(pairs, Fa3rConfig{})};
        for (const SolverReport& rep : reports) {
            EvalRecord rec;
            rec.case_index = i + 1;
            rec.solver_name = rep.solver_name;
            rec.euler = euler_from_rotation(rep.transform.rotation);
            rec.translation = rep.transform.translation;
            rec.metric_error = metric_error(pairs, rep.transform);
            rec.geodesic_error = geodesic_angle(truth.rotation, rep.transform.rotation);
            rec.iterations = rep.trace.iterations_used;
            rec.wall_time = rep.wall_time;
            rec.degenerate_rank = rep.degenerate_rank;
            records.push_back(std::move(rec));
        }
    }
    return records;
}

}  // namespace far3
