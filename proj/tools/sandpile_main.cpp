// Command-line front end: run simulation batches, verify the model's limit
// laws, query the exact small-n oracle, and emit plot-ready data files.
//
// Exit codes: 0 success / all checks pass, 1 usage error, 2 invariant or
// test failure, 3 resource limit.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sandpile/io.hpp"
#include "sandpile/montecarlo.hpp"
#include "sandpile/oracle.hpp"
#include "sandpile/verify.hpp"

namespace fs = std::filesystem;
using namespace sandpile;

namespace {

struct Probability {
    double value = 0.5;
    std::optional<Rational> exact;
};

Probability parse_probability(const std::string& text) {
    Probability p;
    if (text.find('/') != std::string::npos) {
        p.exact = parse_rational(text);
        p.value = p.exact->get_d();
    } else {
        std::size_t pos = 0;
        p.value = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("malformed probability '" + text + "'");
    }
    if (!(p.value > 0.0 && p.value < 1.0))
        throw std::invalid_argument("probability must lie strictly inside (0,1)");
    return p;
}

PolicyKind parse_policy(const std::string& name) {
    if (name == "leftmost") return PolicyKind::Leftmost;
    if (name == "fifo") return PolicyKind::FifoQueue;
    if (name == "random") return PolicyKind::Random;
    throw std::invalid_argument("unknown policy '" + name + "' (leftmost|fifo|random)");
}

std::uint64_t default_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SANDPILE_SEED")) return std::stoull(env);
    return 1;
}

void write_in(const std::string& dir, const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    write_file((fs::path(dir) / name).string(), content);
}

void print_reports(const std::vector<TestReport>& reports) {
    for (const TestReport& r : reports) {
        const bool diagnostic = r.params.value("diagnostic", false);
        std::cout << (r.pass ? "PASS" : (diagnostic ? "info" : "FAIL")) << "  " << r.name
                  << "  statistic=" << r.statistic << " threshold=" << r.threshold;
        if (diagnostic) std::cout << "  (diagnostic)";
        std::cout << "\n";
    }
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case Errc::StateLimitExceeded:
            return 3;
        case Errc::MissingSamples:
        case Errc::TooFewSamples:
        case Errc::NonMonotoneEdges:
        case Errc::NonPositiveVariance:
        case Errc::ExpectedTooSmall:
        case Errc::EmptyConfiguration:
            return 1;
        default:
            return 2;
    }
}

struct CommonFlags {
    std::int64_t n = 0;
    std::string p_text;
    std::int64_t trials = 0;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    std::string out_dir = ".";
};

int cmd_simulate(const CommonFlags& flags, const std::string& policy,
                 std::uint64_t policy_seed, const std::string& format, bool with_histogram,
                 std::uint64_t max_topplings) {
    BatchParams params;
    params.n = flags.n;
    params.p = parse_probability(flags.p_text).value;
    params.trials = flags.trials;
    params.base_seed = default_seed(flags.seed);
    params.policy = {parse_policy(policy), policy_seed};
    params.workers = flags.workers;
    params.max_topplings = max_topplings;
    params.keep_trials = format == "csv" || format == "both";
    if (with_histogram) params.histogram_edges = fluctuation_histogram_edges(params.p);

    const BatchSummary summary = run_batch(params);
    if (format == "json" || format == "both")
        write_in(flags.out_dir, "summary.json", batch_summary_json(summary).dump(2) + "\n");
    if (params.keep_trials) write_in(flags.out_dir, "trials.csv", trials_csv(summary));

    std::cout << "simulated " << summary.trials << " trials (n=" << params.n
              << ", p=" << params.p << "), " << summary.total_topplings << " topplings in "
              << summary.wall_seconds << "s\n";
    std::cout << "mean scaled_K = " << summary.observables.at("scaled_K").mean << "\n";
    return 0;
}

int cmd_verify(const std::string& check, const CommonFlags& flags, std::int64_t seeds,
               double eps, std::int64_t nmax) {
    VerifyDefaults d;
    d.seed = default_seed(flags.seed);
    d.workers = flags.workers;

    std::vector<TestReport> reports;
    auto append = [&reports](std::vector<TestReport> r) {
        for (auto& x : r) reports.push_back(std::move(x));
    };

    if (check == "structure") {
        const std::vector<std::int64_t> ns =
            flags.n ? std::vector<std::int64_t>{flags.n} : std::vector<std::int64_t>{2, 5, 20, 100};
        const std::vector<double> ps = !flags.p_text.empty()
                                           ? std::vector<double>{parse_probability(flags.p_text).value}
                                           : std::vector<double>{0.3, 0.5, 0.7};
        const std::int64_t trials = flags.trials ? flags.trials : 10000;
        for (auto n : ns)
            for (auto p : ps) append(verify_structure(n, p, trials, d));
    } else if (check == "abelian") {
        const std::vector<std::int64_t> ns =
            flags.n ? std::vector<std::int64_t>{flags.n} : std::vector<std::int64_t>{10, 30, 50};
        const std::vector<double> ps = !flags.p_text.empty()
                                           ? std::vector<double>{parse_probability(flags.p_text).value}
                                           : std::vector<double>{0.3, 0.7};
        for (auto n : ns)
            for (auto p : ps) append(verify_abelian(n, p, seeds, d));
    } else if (check == "oracle") {
        append(verify_identities());
        append(verify_oracle_identities(nmax, d));
        const std::int64_t n = flags.n ? flags.n : 4;
        const std::int64_t trials = flags.trials ? flags.trials : 100000;
        const std::vector<Rational> ps =
            !flags.p_text.empty()
                ? std::vector<Rational>{*parse_probability(flags.p_text).exact}
                : std::vector<Rational>{make_rational(3, 10), make_rational(1, 2)};
        for (const auto& p : ps) append(verify_oracle_mc(n, p, trials, d));
    } else if (check == "lln") {
        const double p = !flags.p_text.empty() ? parse_probability(flags.p_text).value : 0.5;
        if (flags.n) {
            append(verify_lln(flags.n, p, flags.trials ? flags.trials : 2000, eps, 0.99, d));
        } else {
            append(verify_lln(100, p, flags.trials ? flags.trials : 2000, 0.2, 0.99, d));
            append(verify_lln(400, p, flags.trials ? flags.trials : 2000, 0.1, 0.99, d));
        }
    } else if (check == "moments") {
        const std::int64_t n = flags.n ? flags.n : 200;
        const std::int64_t trials = flags.trials ? flags.trials : 5000;
        const std::vector<double> ps = !flags.p_text.empty()
                                           ? std::vector<double>{parse_probability(flags.p_text).value}
                                           : std::vector<double>{0.3, 0.5, 0.7};
        for (auto p : ps) append(verify_moments(n, p, trials, d));
    } else if (check == "clt") {
        const std::int64_t n = flags.n ? flags.n : 200;
        const std::int64_t trials = flags.trials ? flags.trials : 5000;
        const std::vector<double> ps = !flags.p_text.empty()
                                           ? std::vector<double>{parse_probability(flags.p_text).value}
                                           : std::vector<double>{0.5, 0.3};
        for (auto p : ps) append(verify_clt(n, p, trials, d));
    } else {
        throw std::invalid_argument("unknown check '" + check +
                                    "' (structure|abelian|oracle|lln|moments|clt)");
    }

    print_reports(reports);
    write_in(flags.out_dir, "verify_" + check + ".json",
             report_bundle_json(reports).dump(2) + "\n");
    return all_pass(reports) ? 0 : 2;
}

int cmd_oracle(const CommonFlags& flags, const std::string& order_name,
               std::int64_t crosscheck, std::int64_t state_limit) {
    const Probability prob = parse_probability(flags.p_text);
    if (!prob.exact)
        throw std::invalid_argument(
            "the oracle works in exact arithmetic; pass --p as a rational a/b");
    const SelectionOrder order =
        order_name == "fifo" ? SelectionOrder::Fifo : SelectionOrder::Leftmost;

    OracleOptions options;
    options.state_limit = state_limit;
    const ExactDistribution dist = absorption_distribution(flags.n, *prob.exact, order, options);
    const ExactMarginals marg = marginals(dist);
    json out = exact_distribution_json(dist, marg);

    std::cout << "n=" << flags.n << " p=" << rational_string(*prob.exact) << ": "
              << dist.support.size() << " stable outcomes, E[K] = "
              << rational_string(dist.expected_topplings) << " = "
              << dist.expected_topplings.get_d() << "\n";

    int rc = 0;
    if (crosscheck > 0) {
        VerifyDefaults d;
        d.seed = default_seed(flags.seed);
        d.workers = flags.workers;
        const auto reports = verify_oracle_mc(flags.n, *prob.exact, crosscheck, d);
        print_reports(reports);
        out["crosscheck"] = report_bundle_json(reports);
        if (!all_pass(reports)) rc = 2;
    }
    write_in(flags.out_dir, "oracle_n" + std::to_string(flags.n) + ".json", out.dump(2) + "\n");
    return rc;
}

int cmd_plotdata(const std::string& from, const std::string& observable,
                 const std::string& out_path) {
    const json summary = json::parse(read_file(from));
    if (!summary.contains("histograms") || !summary["histograms"].contains(observable))
        throw Error(Errc::MissingSamples,
                    "summary has no histogram for '" + observable +
                        "'; rerun simulate with --histogram");
    const json& h = summary["histograms"][observable];
    Histogram hist(h["edges"].get<std::vector<double>>());
    hist.counts = h["counts"].get<std::vector<std::int64_t>>();
    hist.underflow = h["underflow"].get<std::int64_t>();
    hist.overflow = h["overflow"].get<std::int64_t>();
    const double p = summary["config"]["p"].get<double>();

    if (const auto dir = fs::path(out_path).parent_path(); !dir.empty())
        fs::create_directories(dir);
    write_file(out_path, plotdata_csv(hist, p));
    std::cout << "wrote " << out_path << " (" << hist.counts.size() << " bins)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-source stochastic sandpile on Z: simulator, exact oracle, verifier"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string policy = "leftmost";
    std::uint64_t policy_seed = 0;
    std::string format = "both";
    bool with_histogram = false;
    std::uint64_t max_topplings = 0;
    std::string check;
    std::int64_t seeds = 100;
    double eps = 0.2;
    std::int64_t nmax = 5;
    std::string order_name = "leftmost";
    std::int64_t crosscheck = 0;
    std::int64_t state_limit = 200000;
    std::string from, observable = "right_fluct", out_path = "plot.csv";

    auto add_common = [&](CLI::App* cmd, bool need_n, bool need_trials) {
        auto* n_opt = cmd->add_option("--n", flags.n, "number of particles");
        if (need_n) n_opt->required();
        cmd->add_option("--p", flags.p_text, "toppling probability (decimal or a/b)");
        auto* t_opt = cmd->add_option("--trials", flags.trials, "number of trials");
        if (need_trials) t_opt->required();
        cmd->add_option("--seed", [&flags](const std::vector<std::string>& vals) {
                flags.seed = std::stoull(vals.at(0));
                return true;
            },
            "base seed (default: $SANDPILE_SEED or 1)");
        cmd->add_option("--workers", flags.workers, "worker threads (default: all cores)");
        cmd->add_option("--out", flags.out_dir, "output directory");
    };

    auto* sim = app.add_subcommand("simulate", "run a batch of stabilizations");
    add_common(sim, true, true);
    sim->get_option("--p")->required();
    sim->add_option("--policy", policy, "toppling order: leftmost|fifo|random");
    sim->add_option("--policy-seed", policy_seed, "seed for the random policy");
    sim->add_option("--format", format, "output files: json|csv|both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    sim->add_flag("--histogram", with_histogram, "collect fluctuation histograms");
    sim->add_option("--max-topplings", max_topplings, "override the toppling cap");

    auto* ver = app.add_subcommand("verify", "run verification checks");
    ver->add_option("check", check, "structure|abelian|oracle|lln|moments|clt")->required();
    add_common(ver, false, false);
    ver->add_option("--seeds", seeds, "seeds for the abelian check");
    ver->add_option("--eps", eps, "shape tolerance for the lln check");
    ver->add_option("--nmax", nmax, "largest n for oracle identities");

    auto* orc = app.add_subcommand("oracle", "exact law of the stabilized pile");
    add_common(orc, true, false);
    orc->get_option("--p")->required();
    orc->add_option("--order", order_name, "enumeration order: leftmost|fifo");
    orc->add_option("--crosscheck", crosscheck, "Monte Carlo trials to test against the law");
    orc->add_option("--state-limit", state_limit, "abort above this many chain states");

    auto* plot = app.add_subcommand("plotdata", "density table from a simulation summary");
    plot->add_option("--from", from, "summary.json produced by simulate --histogram")->required();
    plot->add_option("--observable", observable, "left_fluct|right_fluct");
    plot->add_option("--out", out_path, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(flags, policy, policy_seed, format, with_histogram, max_topplings);
        if (ver->parsed()) return cmd_verify(check, flags, seeds, eps, nmax);
        if (orc->parsed()) return cmd_oracle(flags, order_name, crosscheck, state_limit);
        if (plot->parsed()) return cmd_plotdata(from, observable, out_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == Errc::StateLimitExceeded)
            std::cerr << "hint: lower --n or raise --state-limit\n";
        return exit_code_for(e);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
