#include "lcqkd/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace lcqkd {

const char* to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::r_e: return "r_e";
        case SweepVariable::spacing: return "spacing";
        case SweepVariable::dist_ab: return "dist_ab";
        case SweepVariable::dist_ae: return "dist_ae";
        case SweepVariable::gamma: return "gamma";
        case SweepVariable::theta: return "theta";
    }
    return "?";
}

std::optional<SweepVariable> sweep_variable_from_string(const std::string& name) {
    if (name == "r_e" || name == "re") return SweepVariable::r_e;
    if (name == "spacing" || name == "d") return SweepVariable::spacing;
    if (name == "dist_ab" || name == "dab") return SweepVariable::dist_ab;
    if (name == "dist_ae" || name == "dae") return SweepVariable::dist_ae;
    if (name == "gamma") return SweepVariable::gamma;
    if (name == "theta") return SweepVariable::theta;
    return std::nullopt;
}

namespace {

SweepPoint evaluate(const SweepSpec& spec, double value) {
    LineGeometry line = spec.base;
    std::optional<double> fixed_gamma, fixed_theta;
    switch (spec.variable) {
        case SweepVariable::r_e: line.r_e = value; break;
        case SweepVariable::spacing: line.spacing = value; break;
        case SweepVariable::dist_ab: line.dist_ab = value; break;
        case SweepVariable::dist_ae: line.dist_ae = value; break;
        case SweepVariable::gamma: fixed_gamma = value; break;
        case SweepVariable::theta: fixed_theta = value; break;
    }
    if (spec.dae_tracks_midpoint && spec.variable == SweepVariable::dist_ab)
        line.dist_ae = value / 2.0;

    SweepPoint pt;
    pt.value = value;
    pt.report = optimize_key_fraction(link_model(line), fixed_gamma, fixed_theta);
    return pt;
}

}  // namespace

std::vector<SweepPoint> run_sweep(const SweepSpec& spec) {
    if (spec.values.empty()) throw std::invalid_argument("sweep needs at least one value");

    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                              spec.values.size());
    std::vector<SweepPoint> points(spec.values.size());
    if (workers == 1) {
        for (std::size_t i = 0; i < spec.values.size(); ++i)
            points[i] = evaluate(spec, spec.values[i]);
        return points;
    }

    std::vector<std::future<void>> jobs;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = next.fetch_add(1); i < spec.values.size();
                 i = next.fetch_add(1))
                points[i] = evaluate(spec, spec.values[i]);
        }));
    }
    for (auto& job : jobs) job.get();  // rethrows worker exceptions
    return points;
}

void write_csv(std::ostream& out, const SweepSpec& spec,
               const std::vector<SweepPoint>& points) {
    out.precision(12);
    out << "variable,value,gamma_opt,theta_opt,p_ok,eve_bound,bob_entropy,rate\n";
    for (const auto& pt : points) {
        out << to_string(spec.variable) << ',' << pt.value << ',' << pt.report.gamma_opt
            << ',' << pt.report.theta_opt << ',' << pt.report.p_ok << ','
            << pt.report.eve_bound << ',' << pt.report.bob_entropy << ','
            << pt.report.fraction << "\n";
    }
}

}  // namespace lcqkd
