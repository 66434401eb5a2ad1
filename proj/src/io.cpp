#include "sandpile/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "sandpile/error.hpp"
#include "sandpile/stats.hpp"

namespace sandpile {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

namespace {

const char* policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Leftmost: return "leftmost";
        case PolicyKind::FifoQueue: return "fifo";
        case PolicyKind::Random: return "random";
    }
    return "?";
}

json stats_json(const StreamingStats& s) {
    return json{{"count", s.count}, {"mean", s.mean},          {"variance", s.variance()},
                {"min", s.min},     {"max", s.max}};
}

json histogram_json(const Histogram& h) {
    return json{{"edges", h.edges},
                {"counts", h.counts},
                {"underflow", h.underflow},
                {"overflow", h.overflow}};
}

}  // namespace

json batch_config_json(const BatchParams& params) {
    json cfg{{"n", params.n},
             {"p", params.p},
             {"trials", params.trials},
             {"seed", params.base_seed},
             {"policy", policy_name(params.policy.kind)},
             {"workers", params.workers}};
    if (params.policy.kind == PolicyKind::Random) cfg["policy_seed"] = params.policy.policy_seed;
    if (params.max_topplings) cfg["max_topplings"] = params.max_topplings;
    return cfg;
}

json batch_summary_json(const BatchSummary& summary) {
    json out;
    out["config"] = batch_config_json(summary.params);
    out["trials"] = summary.trials;
    out["total_topplings"] = summary.total_topplings;
    json obs;
    for (const auto& [key, stats] : summary.observables) obs[key] = stats_json(stats);
    out["observables"] = obs;
    if (!summary.histograms.empty()) {
        json hists;
        for (const auto& [key, hist] : summary.histograms) hists[key] = histogram_json(hist);
        out["histograms"] = hists;
    }
    return out;
}

std::string trials_csv(const BatchSummary& summary) {
    std::string out = "trial_index,seed,L,R,hole,K,M,S,right_fluct,left_fluct\n";
    for (const TrialRecord& r : summary.records) {
        out += std::to_string(r.index);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += std::to_string(r.left);
        out += ',';
        out += std::to_string(r.right);
        out += ',';
        if (r.hole) out += std::to_string(*r.hole);
        out += ',';
        out += std::to_string(r.topplings);
        out += ',';
        out += std::to_string(r.mass_center);
        out += ',';
        out += std::to_string(r.square_mass);
        out += ',';
        out += format_double(r.right_fluct);
        out += ',';
        out += format_double(r.left_fluct);
        out += '\n';
    }
    return out;
}

json rational_json(const Rational& r) {
    return json{{"num", numerator_string(r)}, {"den", denominator_string(r)}};
}

json exact_distribution_json(const ExactDistribution& dist, const ExactMarginals& marg) {
    json out;
    out["config"] = {{"n", dist.n},
                     {"p", rational_string(dist.p)},
                     {"order", dist.order == SelectionOrder::Leftmost ? "leftmost" : "fifo"}};
    out["expected_topplings"] = rational_json(dist.expected_topplings);
    out["moments"] = {{"mean_M", rational_json(dist.mean_mass_center)},
                      {"mean_M2", rational_json(dist.mean_mass_center_sq)},
                      {"mean_S", rational_json(dist.mean_square_mass)}};

    json support = json::array();
    for (const ExactOutcome& o : dist.support) {
        json entry{{"counts", o.counts}, {"left", o.left}, {"right", o.right}};
        entry["hole"] = o.hole ? json(*o.hole) : json(nullptr);
        entry["M"] = o.mass_center;
        entry["S"] = o.square_mass;
        entry["prob"] = rational_json(o.probability);
        support.push_back(std::move(entry));
    }
    out["support"] = std::move(support);

    auto law_json = [](const std::map<std::int64_t, Rational>& law) {
        json arr = json::array();
        for (const auto& [site, prob] : law)
            arr.push_back(json{{"site", site}, {"prob", rational_json(prob)}});
        return arr;
    };
    json joint = json::array();
    for (const auto& [sig, prob] : marg.joint) {
        json entry{{"left", sig.left}, {"right", sig.right}};
        entry["hole"] = sig.hole ? json(*sig.hole) : json(nullptr);
        entry["prob"] = rational_json(prob);
        joint.push_back(std::move(entry));
    }
    out["marginals"] = {{"left", law_json(marg.left_law)},
                        {"right", law_json(marg.right_law)},
                        {"hole_position", law_json(marg.hole_position_law)},
                        {"hole_present", rational_json(marg.hole_present)},
                        {"joint", std::move(joint)}};
    return out;
}

json report_json(const TestReport& report) {
    return json{{"name", report.name},          {"statistic", report.statistic},
                {"threshold", report.threshold}, {"pass", report.pass},
                {"sample_size", report.sample_size}, {"params", report.params}};
}

json report_bundle_json(const std::vector<TestReport>& reports) {
    json arr = json::array();
    bool all = true;
    for (const TestReport& r : reports) {
        arr.push_back(report_json(r));
        if (!r.pass && !r.params.value("diagnostic", false)) all = false;
    }
    return json{{"all_pass", all}, {"reports", std::move(arr)}};
}

std::string plotdata_csv(const Histogram& hist, double p) {
    const double sigma2 = (1.0 - p) / 12.0;
    std::int64_t in_range = 0;
    for (auto c : hist.counts) in_range += c;

    std::string out = "bin_center,empirical_density,theoretical_density\n";
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        const double lo = hist.edges[i];
        const double hi = hist.edges[i + 1];
        const double center = (lo + hi) / 2.0;
        const double width = hi - lo;
        const double density =
            in_range > 0
                ? static_cast<double>(hist.counts[i]) / (static_cast<double>(in_range) * width)
                : 0.0;
        out += format_double(center);
        out += ',';
        out += format_double(density);
        out += ',';
        out += format_double(normal_pdf(center, 0.0, sigma2));
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace sandpile
