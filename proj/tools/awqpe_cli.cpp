// Command-line frontend: estimation runs, table reproductions, grid and
// Monte Carlo campaigns, oracle checks, shot-budget and resource calculators.

#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "awqpe/harness.hpp"
#include "awqpe/phase_expr.hpp"
#include "awqpe/resources.hpp"
#include "awqpe/shot_bounds.hpp"

using namespace awqpe;

namespace {

enum class Format { kText, kCsv, kRecord };

struct CommonOpts {
    std::string format = "text";
    std::uint64_t seed = 0;
    int threads = 1;
    std::string backend = "kernel-sampling";
    std::uint64_t shots = 10240;
    double epsilon = 0.9;

    Format fmt() const {
        if (format == "text") return Format::kText;
        if (format == "csv") return Format::kCsv;
        if (format == "record") return Format::kRecord;
        throw CLI::ValidationError("--format must be text, csv or record");
    }

    Backend backend_value() const {
        auto b = backend_from_name(backend);
        if (!b) throw CLI::ValidationError("--backend must be kernel-sampling, "
                                           "statevector-sampling or infinite-shot");
        return *b;
    }
};

std::vector<int> parse_m_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw CLI::ValidationError("--m: empty entry in list");
        out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw CLI::ValidationError("--m: expected a comma-separated list");
    return out;
}

std::string join_m(const std::vector<int>& m_list) {
    std::string s;
    for (std::size_t i = 0; i < m_list.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(m_list[i]);
    }
    return s;
}

// Every invocation prints its effective configuration. Thread count is
// execution detail, not configuration: records must not depend on it.
void print_config(const CommonOpts& opts, const std::string& cmd,
                  const std::vector<std::pair<std::string, std::string>>& extra) {
    if (opts.fmt() == Format::kRecord) {
        nlohmann::ordered_json j;
        j["record"] = "config";
        j["command"] = cmd;
        for (const auto& [k, v] : extra) j[k] = v;
        j["seed"] = opts.seed;
        std::cout << j.dump() << '\n';
        return;
    }
    std::cout << "# config: command=" << cmd;
    for (const auto& [k, v] : extra) std::cout << ' ' << k << '=' << v;
    std::cout << " seed=" << opts.seed << '\n';
}

constexpr const char* kCsvHeader =
    "test_case,input_parameters,raw_binary_estimate,final_binary_estimate,"
    "final_decimal_estimate\n";

// one table row per case, in the reference-table column order
std::string csv_row(const CaseReport& r, std::uint64_t index) {
    std::ostringstream os;
    os << index << ",\"phi=" << r.phi_decimal << "; m=[" << join_m(r.m_list) << "]\","
       << r.raw_bits << ',' << r.est_bits << ',' << shortest_double(r.est_value) << '\n';
    return os.str();
}

void print_case(const CaseReport& r, Format fmt) {
    if (fmt == Format::kRecord) {
        std::cout << record_line(r) << '\n';
        return;
    }
    if (fmt == Format::kCsv) {
        std::cout << kCsvHeader << csv_row(r, 1);
        return;
    }
    std::cout << "phase (exact):    " << r.phi_decimal << '\n';
    std::cout << "target bits:      " << r.phi_bits << '\n';
    for (const auto& w : r.windows) {
        std::cout << "window " << w.block << ": k=" << w.start_bit << " m=" << w.width
                  << " chunk=" << w.chunk.str() << " t1=" << w.t1 << " t2=" << w.t2
                  << " ratio=" << shortest_double(w.ratio) << (w.flag_amb ? " AMBIGUOUS" : "");
        std::cout << "  counts:";
        auto j = window_record_json(w);
        for (const auto& pair : j["top_counts"])
            std::cout << " (" << pair[0] << ":" << pair[1] << ")";
        std::cout << '\n';
    }
    std::cout << "raw bits:         " << r.raw_bits << '\n';
    std::cout << "flags:            ";
    for (bool f : r.flags) std::cout << (f ? 'T' : 'F');
    std::cout << '\n';
    std::cout << "special chunk:    " << (r.last_idx ? std::to_string(*r.last_idx) : "none")
              << '\n';
    std::cout << "final bits:       " << r.est_bits << '\n';
    std::cout << "final decimal:    " << r.est_decimal << " (" << shortest_double(r.est_value)
              << ")\n";
    std::cout << "success:          " << (r.success ? "yes" : "no") << '\n';
}

// per-case emission for campaign subcommands
CaseSink make_case_sink(Format fmt) {
    if (fmt == Format::kRecord)
        return [](const CaseReport& r) { std::cout << record_line(r) << '\n'; };
    if (fmt == Format::kCsv) {
        std::cout << kCsvHeader;
        auto index = std::make_shared<std::uint64_t>(0);
        return [index](const CaseReport& r) { std::cout << csv_row(r, ++*index); };
    }
    return {};
}

void print_summary(const CampaignSummary& sum, Format fmt) {
    if (fmt == Format::kRecord) {
        auto j = summary_record(sum);
        j["record"] = "summary";
        std::cout << j.dump() << '\n';
        return;
    }
    const char* pre = fmt == Format::kCsv ? "# " : "";
    std::cout << pre << "trials " << sum.trials << ", successes " << sum.successes << " (rate "
              << shortest_double(sum.success_rate()) << "), exact-tie cases " << sum.tie_trials
              << " (recovered " << sum.tie_successes << ")\n";
    for (const auto& c : sum.by_composition)
        std::cout << pre << "  m=[" << join_m(c.m_list) << "]: " << c.successes << "/" << c.trials
                  << " (ties " << c.tie_successes << "/" << c.tie_trials << ")\n";
    std::cerr << "wall time: " << sum.wall_seconds << " s\n";
}

EstimationConfig make_cfg(const CommonOpts& opts, const std::vector<int>& m_list) {
    EstimationConfig cfg;
    cfg.m_list = m_list;
    cfg.shots = opts.shots;
    cfg.epsilon = opts.epsilon;
    cfg.seed = opts.seed;
    cfg.backend = opts.backend_value();
    return cfg;
}

std::vector<std::pair<std::string, std::string>> common_extra(const CommonOpts& opts,
                                                              const std::vector<int>& m_list) {
    return {{"m", join_m(m_list)},
            {"shots", std::to_string(opts.shots)},
            {"epsilon", shortest_double(opts.epsilon)},
            {"backend", opts.backend}};
}

int cmd_estimate(const CommonOpts& opts, const std::string& phi_str, const std::string& model_path,
                 const std::vector<int>& m_list) {
    auto cfg = make_cfg(opts, m_list);
    auto extra = common_extra(opts, m_list);
    CaseReport rep;
    if (!model_path.empty()) {
        extra.emplace_back("model", model_path);
        print_config(opts, "estimate", extra);
        rep = run_case(load_dense_model(model_path), cfg);
    } else {
        extra.emplace_back("phi", phi_str);
        print_config(opts, "estimate", extra);
        rep = run_case(parse_phase(phi_str, cfg.n_total() + 64), cfg);
    }
    print_case(rep, opts.fmt());
    return rep.success ? 0 : 1;
}

int cmd_walkthrough(const CommonOpts& opts) {
    std::vector<int> m_list = {3, 2, 3};
    auto cfg = make_cfg(opts, m_list);
    auto extra = common_extra(opts, m_list);
    extra.emplace_back("phi", "0.8203125");
    print_config(opts, "walkthrough", extra);
    auto rep = run_case(PhaseValue::parse_decimal("0.8203125", cfg.n_total() + 64), cfg);
    print_case(rep, opts.fmt());
    bool ok = rep.raw_bits == "11110010" && rep.est_bits == "11010010" && rep.success;
    if (opts.fmt() == Format::kText)
        std::cout << (ok ? "walkthrough reproduced\n" : "walkthrough MISMATCH\n");
    return ok ? 0 : 1;
}

int cmd_table1(const CommonOpts& opts) {
    struct Row {
        const char* phi;
        std::vector<int> m;
        const char* exact_decimal;
    };
    const std::vector<Row> rows = {
        {"0.3", {2, 2}, "0.3125"},
        {"pi/6", {3, 2, 2, 3}, "0.5234375"},
        {"0.671875", {4, 4}, "0.671875"},
        {"1/sqrt2", {3, 3, 3, 3, 3, 3, 3, 3, 3, 3}, ""},
        {"sin(pi/12)", {5, 6, 7, 4}, ""},
    };
    print_config(opts, "table1",
                 {{"shots", std::to_string(opts.shots)},
                  {"epsilon", shortest_double(opts.epsilon)},
                  {"backend", opts.backend}});
    bool all_ok = true;
    std::ostringstream csv;
    csv << "test_case,input_parameters,raw_binary_estimate,final_binary_estimate,"
           "final_decimal_estimate\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto cfg = make_cfg(opts, rows[i].m);
        cfg.seed = derive_seed(opts.seed, i);
        int n = cfg.n_total();
        PhaseValue phi = parse_phase(rows[i].phi, n + 64);
        auto rep = run_case(phi, cfg);
        bool ok = rep.success;
        if (ok && rows[i].exact_decimal[0] != '\0') ok = rep.est_decimal == rows[i].exact_decimal;
        all_ok = all_ok && ok;
        csv << (i + 1) << ",\"phi=" << rows[i].phi << "; m=[" << join_m(rows[i].m) << "]\","
            << rep.raw_bits << ',' << rep.est_bits << ',' << shortest_double(rep.est_value)
            << '\n';
        if (opts.fmt() == Format::kRecord) std::cout << record_line(rep) << '\n';
    }
    if (opts.fmt() != Format::kRecord) std::cout << csv.str();
    if (opts.fmt() == Format::kText)
        std::cout << (all_ok ? "all rows reproduced\n" : "row MISMATCH\n");
    return all_ok ? 0 : 1;
}

int cmd_grid(const CommonOpts& opts, int n, bool all_compositions, const std::string& m_str,
             bool backend_given) {
    std::vector<std::vector<int>> comps;
    if (all_compositions)
        comps = compositions_min2(n);
    else if (!m_str.empty())
        comps.push_back(parse_m_list(m_str));
    else
        throw CLI::ValidationError("grid: pass --all-compositions or --m");

    // the exhaustive sweep defaults to the deterministic backend
    CommonOpts grid_opts = opts;
    if (!backend_given) grid_opts.backend = "infinite-shot";
    EstimationConfig base = make_cfg(grid_opts, {2, 2});
    print_config(opts, "grid",
                 {{"n", std::to_string(n)},
                  {"compositions", std::to_string(comps.size())},
                  {"backend", grid_opts.backend},
                  {"epsilon", shortest_double(opts.epsilon)}});
    CaseSink sink = make_case_sink(opts.fmt());
    auto sum = exhaustive_grid(n, comps, base, opts.threads, sink);
    print_summary(sum, opts.fmt());

    std::uint64_t clean_failures = 0;
    for (const auto& f : sum.failures)
        if (!f.exact_half_tie) ++clean_failures;
    return clean_failures == 0 ? 0 : 1;
}

int cmd_montecarlo(const CommonOpts& opts, std::uint64_t trials, int n, const std::string& m_str,
                   double min_rate) {
    auto m_list = parse_m_list(m_str);
    auto cfg = make_cfg(opts, m_list);
    auto extra = common_extra(opts, m_list);
    extra.emplace_back("trials", std::to_string(trials));
    extra.emplace_back("n", std::to_string(n));
    print_config(opts, "montecarlo", extra);
    CaseSink sink = make_case_sink(opts.fmt());
    auto sum = monte_carlo(trials, n, m_list, cfg, opts.threads, sink);
    print_summary(sum, opts.fmt());
    return sum.success_rate() >= min_rate ? 0 : 1;
}

int cmd_oracle_check(const CommonOpts& opts, int m_max, int k_max, int phis) {
    print_config(opts, "oracle-check",
                 {{"m-max", std::to_string(m_max)},
                  {"k-max", std::to_string(k_max)},
                  {"phis", std::to_string(phis)}});
    std::mt19937_64 gen(opts.seed == 0 ? 0xC3 : opts.seed);
    double worst = 0.0;
    for (int trial = 0; trial < phis; ++trial) {
        PhaseValue phi(BigInt(gen()), 64);
        auto model = UnitaryModel::diagonal(phi);
        for (int m = 2; m <= m_max; ++m)
            for (int k = 0; k <= k_max; ++k) {
                auto circuit = window_distribution_exact(model, m, k);
                auto kernel = dirichlet_pmf(window_fraction(phi.widened(k + 64), k), m);
                for (std::size_t j = 0; j < circuit.probs.size(); ++j)
                    worst = std::max(worst, std::abs(circuit.probs[j] - kernel.probs[j]));
            }
    }
    bool ok = worst <= 1e-10;
    std::cout << "max-norm distance kernel vs statevector: " << shortest_double(worst) << " ("
              << (ok ? "PASS" : "FAIL") << ", tolerance 1e-10)\n";
    return ok ? 0 : 1;
}

int cmd_bounds(const CommonOpts& opts, int m, double eps1, bool amb, double delta_r, double p1,
               double eps2) {
    print_config(opts, "bounds",
                 {{"m", std::to_string(m)}, {"eps1", shortest_double(eps1)}});
    BoundParams params;
    std::cout << "shots_for_top_outcome(m=" << m << ", eps1=" << shortest_double(eps1)
              << ") = " << shots_for_top_outcome(m, eps1, params) << '\n';
    if (amb) {
        std::cout << "shots_for_ambiguity(epsilon=" << shortest_double(opts.epsilon)
                  << ", delta_r=" << shortest_double(delta_r) << ", p1=" << shortest_double(p1)
                  << ", eps2=" << shortest_double(eps2)
                  << ") = " << shots_for_ambiguity(opts.epsilon, delta_r, p1, eps2) << '\n';
    }
    return 0;
}

int cmd_resources(const CommonOpts& opts, const std::string& m_str) {
    auto m_list = parse_m_list(m_str);
    print_config(opts, "resources", {{"m", join_m(m_list)}});
    auto rep = resource_report(m_list);
    if (opts.fmt() == Format::kCsv)
        std::cout << to_csv(rep);
    else
        std::cout << to_text(rep);
    return 0;
}

int cmd_perturb(const CommonOpts& opts, const std::string& phi_str, const std::string& dphi_str,
                const std::string& m_str) {
    auto m_list = parse_m_list(m_str);
    auto cfg = make_cfg(opts, m_list);
    auto extra = common_extra(opts, m_list);
    extra.emplace_back("phi", phi_str);
    extra.emplace_back("dphi", dphi_str);
    print_config(opts, "perturb", extra);
    PhaseValue phi = parse_phase(phi_str, cfg.n_total() + 64);
    PhaseValue dphi = parse_phase(dphi_str, cfg.n_total() + 64);
    auto v = perturbation_check(phi, dphi, cfg);
    if (opts.fmt() == Format::kRecord) {
        std::cout << record_line(v.base) << '\n' << record_line(v.shifted) << '\n';
        nlohmann::ordered_json j;
        j["record"] = "perturbation";
        j["dphi"] = v.dphi_decimal;
        j["difference"] = v.difference_decimal;
        j["pass"] = v.pass;
        std::cout << j.dump() << '\n';
    } else {
        std::cout << "base estimate:    " << v.base.est_bits << " (" << v.base.est_decimal
                  << ")\n";
        std::cout << "shifted estimate: " << v.shifted.est_bits << " (" << v.shifted.est_decimal
                  << ")\n";
        std::cout << "difference:       " << v.difference_decimal << " vs dphi " << v.dphi_decimal
                  << '\n';
        std::cout << "verdict:          " << (v.pass ? "PASS" : "FAIL") << '\n';
    }
    return v.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive windowed quantum phase estimation toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string phi_str, dphi_str, m_str, model_path;
    int n = 8, m_max = 6, k_max = 10, phis = 100, bounds_m = 3;
    std::uint64_t trials = 1000;
    bool all_compositions = false, amb = false;
    double eps1 = 0.01, delta_r = 0.05, p1 = BoundParams{}.p1, eps2 = 0.01, min_rate = 0.99;

    auto add_common = [&opts](CLI::App* cmd, bool with_sampling = true) {
        cmd->add_option("--format", opts.format, "output format: text, csv or record");
        cmd->add_option("--seed", opts.seed, "master seed; fully determines random output");
        cmd->add_option("--threads", opts.threads, "worker thread cap for campaigns")
            ->check(CLI::Range(1, 256));
        if (with_sampling) {
            cmd->add_option("--shots", opts.shots, "measurement repetitions per window");
            cmd->add_option("--epsilon", opts.epsilon, "ambiguity threshold in (0,1)");
            cmd->add_option("--backend", opts.backend,
                            "kernel-sampling, statevector-sampling or infinite-shot");
        }
    };

    auto* estimate = app.add_subcommand("estimate", "estimate one phase");
    estimate->add_option("--phi", phi_str, "phase: decimal, 0b<bits>, pi/6, 1/sqrt2, sin(pi/12)");
    estimate->add_option("--model", model_path, "dense unitary model file instead of --phi");
    estimate->add_option("--m", m_str, "window sizes, e.g. 3,2,3")->required();
    add_common(estimate);

    auto* walkthrough = app.add_subcommand("walkthrough", "reproduce the worked example");
    add_common(walkthrough);

    auto* table1 = app.add_subcommand("table1", "reproduce the five summary rows");
    add_common(table1);

    auto* grid = app.add_subcommand("grid", "exhaustive dyadic sweep at n bits");
    grid->add_option("--n", n, "total bits")->required();
    grid->add_flag("--all-compositions", all_compositions, "sweep every composition with parts >= 2");
    grid->add_option("--m", m_str, "single composition to sweep");
    add_common(grid);

    auto* montecarlo = app.add_subcommand("montecarlo", "random-phase campaign");
    montecarlo->add_option("--trials", trials, "number of random phases")->required();
    montecarlo->add_option("--n", n, "total bits")->required();
    montecarlo->add_option("--m", m_str, "window sizes")->required();
    montecarlo->add_option("--min-rate", min_rate, "success-rate threshold for exit status");
    add_common(montecarlo);

    auto* oracle = app.add_subcommand("oracle-check", "kernel vs statevector distributions");
    oracle->add_option("--m-max", m_max, "largest window size");
    oracle->add_option("--k-max", k_max, "largest start bit");
    oracle->add_option("--phis", phis, "number of random phases");
    add_common(oracle, false);

    auto* bounds = app.add_subcommand("bounds", "measurement budget calculators");
    bounds->add_option("--m", bounds_m, "window size");
    bounds->add_option("--eps1", eps1, "top-outcome error budget");
    bounds->add_flag("--amb", amb, "also print the ambiguity-detection budget");
    bounds->add_option("--delta-r", delta_r, "margin from the threshold");
    bounds->add_option("--p1", p1, "peak probability lower bound");
    bounds->add_option("--eps2", eps2, "ambiguity-decision error budget");
    add_common(bounds);

    auto* resources = app.add_subcommand("resources", "circuit resource accounting");
    resources->add_option("--m", m_str, "window sizes")->required();
    add_common(resources, false);

    auto* perturb = app.add_subcommand("perturb", "perturbed-operator cross-check");
    perturb->add_option("--phi", phi_str, "base phase")->required();
    perturb->add_option("--dphi", dphi_str, "perturbation in (0,1)")->required();
    perturb->add_option("--m", m_str, "window sizes")->required();
    add_common(perturb);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage errors exit with status 2
    }

    try {
        if (estimate->parsed()) {
            if (phi_str.empty() == model_path.empty())
                throw CLI::ValidationError("estimate: pass exactly one of --phi or --model");
            return cmd_estimate(opts, phi_str, model_path, parse_m_list(m_str));
        }
        if (walkthrough->parsed()) return cmd_walkthrough(opts);
        if (table1->parsed()) return cmd_table1(opts);
        if (grid->parsed())
            return cmd_grid(opts, n, all_compositions, m_str,
                            grid->count("--backend") > 0);
        if (montecarlo->parsed()) return cmd_montecarlo(opts, trials, n, m_str, min_rate);
        if (oracle->parsed()) return cmd_oracle_check(opts, m_max, k_max, phis);
        if (bounds->parsed()) return cmd_bounds(opts, bounds_m, eps1, amb, delta_r, p1, eps2);
        if (resources->parsed()) return cmd_resources(opts, m_str);
        if (perturb->parsed()) return cmd_perturb(opts, phi_str, dphi_str, m_str);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2; // rejected input values count as usage errors
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
