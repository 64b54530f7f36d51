#include "dandelion/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dandelion/errors.hpp"

namespace dandelion {

PrecisionRecallReport precision_recall(const Mapping& mapping, std::span<const NodeId> truth,
                                       std::span<const NodeId> nodes) {
    if (truth.size() != mapping.size()) throw InvalidParameters("truth and mapping sizes differ");
    PrecisionRecallReport report;
    report.nodes.assign(nodes.begin(), nodes.end());
    report.precision.assign(nodes.size(), 0.0);
    report.recall.assign(nodes.size(), 0.0);

    NodeId max_node = 0;
    for (NodeId v : nodes) max_node = std::max(max_node, v);
    for (NodeId v : truth) max_node = std::max(max_node, v);
    for (NodeId v : mapping.accused)
        if (v != kNoNode) max_node = std::max(max_node, v);
    const std::size_t span = static_cast<std::size_t>(max_node) + 1;
    std::vector<std::size_t> accused(span, 0), correct(span, 0), created(span, 0);

    for (std::size_t tx = 0; tx < truth.size(); ++tx) {
        ++created[truth[tx]];
        const NodeId a = mapping.accused[tx];
        if (a == kNoNode) {
            ++report.unassigned;
            continue;
        }
        ++report.assigned;
        ++accused[a];
        if (a == truth[tx]) ++correct[a];
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const NodeId v = nodes[i];
        if (accused[v] > 0) report.precision[i] = static_cast<double>(correct[v]) / static_cast<double>(accused[v]);
        if (created[v] > 0) report.recall[i] = static_cast<double>(correct[v]) / static_cast<double>(created[v]);
        report.avg_precision += report.precision[i];
        report.avg_recall += report.recall[i];
    }
    if (!nodes.empty()) {
        report.avg_precision /= static_cast<double>(nodes.size());
        report.avg_recall /= static_cast<double>(nodes.size());
    }
    return report;
}

namespace {

void require_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

std::pair<double, double> fundamental_bounds(double p) {
    require_probability(p, "p");
    return {p * p, p};
}

double oto_first_spy_precision(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("one-to-one precision needs 0 < p < 1 (limits: 0 at p=0, 1 at p=1)");
    return 2.0 * p * p / (1.0 - p) * std::log((1.0 + p) / (2.0 * p));
}

double ward_log_pmf(WardScheme scheme, std::size_t w, double p) {
    if (w < 1) throw InvalidParameters("ward size must be >= 1");
    const double wd = static_cast<double>(w);
    if (scheme == WardScheme::one_to_one) {
        if (!(p > 0.0 && p < 1.0)) throw DomainError("one-to-one ward pmf needs 0 < p < 1");
        return std::log(2.0 * p / (1.0 - p)) + wd * std::log((1.0 - p) / (1.0 + p));
    }
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("all-to-one ward pmf needs 0 <= p < 1");
    const double log_catalan = std::lgamma(2.0 * wd + 1.0) - std::lgamma(wd + 2.0) - std::lgamma(wd + 1.0);
    return log_catalan + (wd - 1.0) * std::log((1.0 - p) / 2.0) + (wd + 1.0) * std::log((1.0 + p) / 2.0);
}

double ward_pmf(WardScheme scheme, std::size_t w, double p) { return std::exp(ward_log_pmf(scheme, w, p)); }

std::vector<double> ward_pmf_table(WardScheme scheme, double p, double tail) {
    std::vector<double> pmf{0.0};
    // Compensated summation so the tail test is not swamped by rounding.
    double mass = 0.0, carry = 0.0;
    for (std::size_t w = 1;; ++w) {
        const double x = ward_pmf(scheme, w, p);
        pmf.push_back(x);
        const double y = x - carry;
        const double t = mass + y;
        carry = (t - mass) - y;
        mass = t;
        if (1.0 - mass < tail || w > 50'000'000) break;
    }
    return pmf;
}

std::vector<double> simulate_ward_size(WardScheme scheme, double p, std::size_t trials, Rng& rng) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("ward simulation needs 0 < p < 1");
    if (trials < 1) throw InvalidParameters("trials must be >= 1");
    std::vector<double> counts{0.0};
    std::bernoulli_distribution spy(p), keep(0.5), child((1.0 - p) / 2.0);
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t size = 1;
        if (scheme == WardScheme::one_to_one) {
            // Predecessor line: walk back until a spy, each honest predecessor joins with prob 1/2.
            while (!spy(rng))
                if (keep(rng)) ++size;
        } else {
            // Binary tree, each child survives with prob (1-p)/2; the root is kept.
            std::size_t pending = 0;
            for (int c = 0; c < 2; ++c) pending += child(rng) ? 1 : 0;
            while (pending > 0) {
                --pending;
                ++size;
                for (int c = 0; c < 2; ++c) pending += child(rng) ? 1 : 0;
            }
        }
        if (counts.size() <= size) counts.resize(size + 1, 0.0);
        counts[size] += 1.0;
    }
    for (double& c : counts) c /= static_cast<double>(trials);
    return counts;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = std::max(a.size(), b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i < a.size() ? a[i] : 0.0;
        const double y = i < b.size() ? b[i] : 0.0;
        sum += std::abs(x - y);
    }
    return sum / 2.0;
}

std::pair<double, double> ato_precision_bounds(double p) {
    require_probability(p, "p");
    const double e2 = std::numbers::e * std::numbers::e;
    return {p / 4.0, e2 / (2.0 * std::numbers::pi) * p};
}

MatchingBounds matching_precision_bounds(double p) {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("matching bounds need 0 <= p < 1");
    MatchingBounds b;
    b.lower = (p + p * p - 2.0 * p * p * p) / (1.0 - p * p);
    b.upper_raw = 2.0 * b.lower;
    b.upper = std::min(b.upper_raw, 1.0);
    return b;
}

OptimalPrecisionCheck optimal_precision_check(double d_opt, double d_fs, double p, double slack) {
    const double bound = 8.0 * d_fs + 6.0 * p * p + slack;
    return {d_opt <= bound, bound - d_opt};
}

double timer_threshold(std::size_t k, double delta_hop, double epsilon) {
    if (k < 1) throw DomainError("k must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
    if (!(delta_hop > 0.0)) throw DomainError("delta_hop must be positive");
    const double kd = static_cast<double>(k);
    return -kd * (kd - 1.0) * delta_hop / (2.0 * std::log1p(-epsilon));
}

double expected_extra_delay(double t_base, std::size_t k) {
    if (k < 1) throw DomainError("k must be >= 1");
    return t_base / static_cast<double>(k);
}

PartialDeploymentBounds partial_deployment_recall_bounds(std::size_t n, double p, double beta, double q,
                                                         std::size_t eta, DeploymentMode mode) {
    require_probability(p, "p");
    require_probability(beta, "beta");
    require_probability(q, "q");
    if (eta < 1 || n <= eta + 1) throw DomainError("need 1 <= eta < n - 1");
    PartialDeploymentBounds b;
    const double nd = static_cast<double>(n);
    const double ed = static_cast<double>(eta);
    b.f = p + (1.0 - p) * beta;
    if (b.f <= 0.0) throw DomainError("no protocol deployment (f = 0)");
    b.phi = 1.0 - std::pow(1.0 - 1.0 / (nd - ed), ed);
    const double nt = (1.0 - p) * nd;
    b.zeta = nt > 0.0 ? (1.0 - std::pow(1.0 - b.phi, nt)) / (nt * b.phi) : 0.0;
    const double miss = std::pow(1.0 - b.f, ed);  // no supporting out-neighbor
    const double ratio = p / b.f;
    b.c = (1.0 - ratio) * (1.0 - miss) * b.zeta;

    if (mode == DeploymentMode::no_version_checking) {
        b.lower = p;
        b.upper = p + (1.0 - beta * (1.0 - q)) * (1.0 - p) * b.zeta;
        b.refined_upper = b.upper;
        const double tail = nt > 1.0 ? nt / (nt - 1.0) : 1.0;
        b.finite_upper = p * nd / (nd - 1.0) +
                         (1.0 - p) * nd / (nd - 1.0) * b.zeta * (1.0 - beta * (1.0 - q)) * tail;
        return b;
    }
    b.lower = ratio * (1.0 - miss);
    b.upper = b.lower + miss + b.c * (1.0 - beta);
    b.refined_upper = (ratio + (1.0 - ratio) * q * b.zeta) * (1.0 - miss) + miss;
    const double per_edge = std::min(1.0, b.f * nd / (nd - ed));
    const double spy_share = b.f * nd > 1.0 ? p * nd / (b.f * nd - 1.0) : ratio;
    b.finite_upper = (1.0 - std::pow(1.0 - per_edge, ed)) * (spy_share + (1.0 - ratio) * q * b.zeta) + miss;
    return b;
}

double BoundsReport::at(const std::string& name) const {
    for (const auto& [key, value] : values)
        if (key == name) return value;
    throw std::out_of_range("no bound named " + name);
}

BoundsReport bounds_report(const BoundsParameters& params) {
    BoundsReport report;
    report.params = params;
    auto& v = report.values;
    const double p = params.p;
    const double t_base = params.t_base > 0.0 ? params.t_base : timer_threshold(params.k, params.delta_hop, params.epsilon);
    report.params.t_base = t_base;

    v.emplace_back("p", p);
    v.emplace_back("q", params.q);
    v.emplace_back("n", static_cast<double>(params.n));
    v.emplace_back("eta", static_cast<double>(params.eta));
    v.emplace_back("beta", params.beta);
    v.emplace_back("k", static_cast<double>(params.k));
    v.emplace_back("epsilon", params.epsilon);
    v.emplace_back("delta_hop", params.delta_hop);
    v.emplace_back("t_base", t_base);

    const auto [prec_floor, rec_floor] = fundamental_bounds(p);
    v.emplace_back("precision_floor", prec_floor);
    v.emplace_back("recall_floor", rec_floor);
    if (p > 0.0 && p < 1.0) v.emplace_back("oto_first_spy_precision", oto_first_spy_precision(p));
    const auto [ato_lo, ato_hi] = ato_precision_bounds(p);
    v.emplace_back("ato_precision_lower", ato_lo);
    v.emplace_back("ato_precision_upper", ato_hi);
    if (p < 1.0) {
        const auto m = matching_precision_bounds(p);
        v.emplace_back("matching_precision_lower", m.lower);
        v.emplace_back("matching_precision_upper", m.upper);
        v.emplace_back("matching_precision_upper_raw", m.upper_raw);
    }
    v.emplace_back("timer_threshold", timer_threshold(params.k, params.delta_hop, params.epsilon));
    v.emplace_back("expected_extra_delay", expected_extra_delay(t_base, params.k));

    if (p + (1.0 - p) * params.beta > 0.0) {
        const auto vc = partial_deployment_recall_bounds(params.n, p, params.beta, params.q, params.eta,
                                                         DeploymentMode::version_checking);
        const auto nvc = partial_deployment_recall_bounds(params.n, p, params.beta, params.q, params.eta,
                                                          DeploymentMode::no_version_checking);
        v.emplace_back("f", vc.f);
        v.emplace_back("phi", vc.phi);
        v.emplace_back("zeta", vc.zeta);
        v.emplace_back("c", vc.c);
        v.emplace_back("vc_recall_lower", vc.lower);
        v.emplace_back("vc_recall_upper", vc.upper);
        v.emplace_back("vc_recall_refined_upper", vc.refined_upper);
        v.emplace_back("vc_recall_finite_upper", vc.finite_upper);
        v.emplace_back("nvc_recall_lower", nvc.lower);
        v.emplace_back("nvc_recall_upper", nvc.upper);
        v.emplace_back("nvc_recall_finite_upper", nvc.finite_upper);
    }
    return report;
}

}  // namespace dandelion
