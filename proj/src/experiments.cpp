#include "dormcoal/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "dormcoal/coalescent.hpp"
#include "dormcoal/forward.hpp"
#include "dormcoal/genealogy.hpp"
#include "dormcoal/parallel.hpp"
#include "dormcoal/special.hpp"

namespace dormcoal {

using nlohmann::json;

namespace {

constexpr const char* kSchemaVersion = "dormcoal.v1";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double require_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw std::invalid_argument("config field missing or not a number: " + path + "." + key);
    return j.at(key).get<double>();
}

std::uint64_t require_u64(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw std::invalid_argument("config field missing or not a number: " + path + "." + key);
    return j.at(key).get<std::uint64_t>();
}

std::string require_string(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw std::invalid_argument("config field missing or not a string: " + path + "." + key);
    return j.at(key).get<std::string>();
}

// Deterministic CSV sink: metadata comment lines, then an RFC-4180 header row.
class CsvFile {
  public:
    CsvFile(const std::filesystem::path& path, const std::string& schema,
            const std::string& hash, std::uint64_t master_seed) {
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot open output file " + path.string());
        out_ << "# schema=" << kSchemaVersion << "." << schema << "\n";
        out_ << "# config_hash=" << hash << "\n";
        out_ << "# master_seed=" << master_seed << "\n";
    }
    void header(const std::string& cols) { out_ << cols << "\n"; }
    void row(const std::string& line) { out_ << line << "\n"; }
    std::ofstream out_;
};

struct RunContext {
    json resolved;
    std::filesystem::path out_dir;
    std::string hash;
    std::uint64_t master_seed;
    std::uint64_t replicates;
    int workers;
    std::vector<std::string> outputs;

    CsvFile csv(const std::string& name, const std::string& schema) {
        outputs.push_back((out_dir / name).string());
        return CsvFile(out_dir / name, schema, hash, master_seed);
    }
};

RunContext make_context(json& config, const char* command) {
    json& c = config;
    if (!c.contains("master_seed")) c["master_seed"] = 20240101;
    if (!c.contains("replicates")) c["replicates"] = 100000;
    if (!c.contains("workers")) c["workers"] = 0;
    if (!c.contains("out")) c["out"] = std::string("out_") + command;
    RunContext ctx;
    ctx.master_seed = require_u64(c, "", "master_seed");
    ctx.replicates = require_u64(c, "", "replicates");
    ctx.workers = int(require_u64(c, "", "workers"));
    ctx.out_dir = require_string(c, "", "out");
    std::filesystem::create_directories(ctx.out_dir);
    c["command"] = command;
    ctx.resolved = c;
    ctx.hash = config_hash(c);
    return ctx;
}

json finish(RunContext& ctx, const char* command, json results) {
    json summary;
    summary["schema"] = std::string(kSchemaVersion) + ".summary";
    summary["command"] = command;
    summary["config_hash"] = ctx.hash;
    summary["resolved_config"] = ctx.resolved;
    summary["outputs"] = ctx.outputs;
    summary["results"] = std::move(results);
    const auto path = ctx.out_dir / (std::string(command) + "_summary.json");
    std::ofstream out(path);
    out << summary.dump(2) << "\n";
    return summary;
}

}  // namespace

std::string config_hash(const json& resolved) {
    const std::string dump = resolved.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char ch : dump) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

json model_config_to_json(const ModelConfig& cfg) {
    json w;
    if (const auto* tp = std::get_if<WakeLaw::TwoPoint>(&cfg.wake.law)) {
        w = {{"type", "two_point"}, {"omega", tp->omega}, {"late_time", tp->late_time}};
    } else if (const auto* ex = std::get_if<WakeLaw::ExponentialTail>(&cfg.wake.law)) {
        w = {{"type", "exponential_tail"},
             {"gamma", ex->gamma},
             {"c", ex->c},
             {"truncate_at", ex->truncate_at}};
    } else if (const auto* mx = std::get_if<WakeLaw::Mixture>(&cfg.wake.law)) {
        json atoms = json::array();
        for (const auto& a : mx->atoms)
            atoms.push_back({{"sigma", a.sigma}, {"weight", a.weight}});
        w = {{"type", "mixture"}, {"atoms", atoms}};
    } else {
        const auto& dg = std::get<WakeLaw::Degenerate>(cfg.wake.law);
        w = {{"type", "degenerate"}, {"time", dg.time}};
    }
    return {{"N", cfg.N},
            {"lambda", cfg.lambda},
            {"t_spring", cfg.t_spring},
            {"t_total", cfg.t_total},
            {"wake", w}};
}

ModelConfig model_config_from_json(const json& j) {
    ModelConfig cfg;
    cfg.N = require_u64(j, "model", "N");
    cfg.lambda = require_number(j, "model", "lambda");
    cfg.t_spring = require_number(j, "model", "t_spring");
    cfg.t_total = require_number(j, "model", "t_total");
    if (!j.contains("wake") || !j.at("wake").is_object())
        throw std::invalid_argument("config field missing or not an object: model.wake");
    const json& w = j.at("wake");
    const std::string type = require_string(w, "model.wake", "type");
    if (type == "two_point") {
        cfg.wake = WakeLaw::two_point(require_number(w, "model.wake", "omega"),
                                      require_number(w, "model.wake", "late_time"));
    } else if (type == "exponential_tail") {
        cfg.wake = WakeLaw::exponential_tail(require_number(w, "model.wake", "gamma"),
                                             require_number(w, "model.wake", "c"),
                                             require_number(w, "model.wake", "truncate_at"));
    } else if (type == "mixture") {
        if (!w.contains("atoms") || !w.at("atoms").is_array())
            throw std::invalid_argument("config field missing: model.wake.atoms");
        std::vector<WakeLaw::MixtureAtom> atoms;
        for (const auto& a : w.at("atoms"))
            atoms.push_back({require_number(a, "model.wake.atoms[]", "sigma"),
                             require_number(a, "model.wake.atoms[]", "weight")});
        cfg.wake = WakeLaw::mixture(std::move(atoms));
    } else if (type == "degenerate") {
        cfg.wake = WakeLaw::degenerate(require_number(w, "model.wake", "time"));
    } else {
        throw std::invalid_argument("model.wake.type: unknown wake law '" + type + "'");
    }
    cfg.validate();
    return cfg;
}

LambdaMeasure measure_from_json(const json& j) {
    const std::string type = require_string(j, "measure", "type");
    if (type == "kingman") return LambdaMeasure::kingman();
    if (type == "star") return LambdaMeasure::star();
    if (type == "beta") return LambdaMeasure::beta(require_number(j, "measure", "a"));
    if (type == "kappa") {
        const double k = require_number(j, "measure", "kappa");
        const bool normalized = j.value("normalized", true);
        return normalized ? LambdaMeasure::kappa_normalized(k) : LambdaMeasure::kappa(k);
    }
    if (type == "eta_mixture") {
        if (!j.contains("atoms") || !j.at("atoms").is_array())
            throw std::invalid_argument("config field missing: measure.atoms");
        std::vector<EtaAtom> atoms;
        for (const auto& a : j.at("atoms"))
            atoms.push_back({require_number(a, "measure.atoms[]", "kappa"),
                             require_number(a, "measure.atoms[]", "mass")});
        return LambdaMeasure::eta_mixture(std::move(atoms), j.value("a1", 0.0),
                                          j.value("a2", 0.0));
    }
    throw std::invalid_argument("measure.type: unknown measure '" + type + "'");
}

RegimeSpec regime_from_json(const json& j) {
    const std::string type = require_string(j, "regime", "type");
    if (type == "two_point") {
        OmegaRule omega{j.value("omega_coefficient", 1.0), j.value("omega_power", 2.0)};
        return RegimeSpec::two_point(require_number(j, "regime", "beta"),
                                     require_number(j, "regime", "kappa"), omega);
    }
    if (type == "exponential")
        return RegimeSpec::exponential(require_number(j, "regime", "a"), j.value("c", 1.0));
    if (type == "mixture") {
        std::vector<EtaAtom> eta;
        if (j.contains("eta"))
            for (const auto& a : j.at("eta"))
                eta.push_back({require_number(a, "regime.eta[]", "kappa"),
                               require_number(a, "regime.eta[]", "mass")});
        return RegimeSpec::mixture(std::move(eta), j.value("a1", 0.0), j.value("a2", 0.0),
                                   j.value("r", 0.25));
    }
    throw std::invalid_argument("regime.type: unknown regime '" + type + "'");
}

// --- forward -----------------------------------------------------------------

json cmd_forward(json config) {
    RunContext ctx = make_context(config, "forward");
    if (!config.contains("model"))
        throw std::invalid_argument("config field missing: model");
    const ModelConfig cfg = model_config_from_json(config.at("model"));

    struct DayStat {
        std::uint64_t s_spring, s_total, max_spring, max_total, nu_max;
        double pair_prob;
    };
    std::vector<DayStat> stats(ctx.replicates);
    parallel_replicates(salt_seed(ctx.master_seed, "forward"), ctx.replicates, ctx.workers,
                        [&](std::uint64_t r, RandomStream& rs) {
                            const GenerationRecord rec = step_generation(cfg, rs);
                            DayStat d{};
                            d.s_spring = rec.x_spring.total;
                            d.s_total = rec.x_total.total;
                            for (auto v : rec.x_spring.x) d.max_spring = std::max(d.max_spring, v);
                            for (auto v : rec.x_total.x) d.max_total = std::max(d.max_total, v);
                            double pairs = 0.0;
                            for (auto v : *rec.x_total.nu) {
                                d.nu_max = std::max(d.nu_max, v);
                                pairs += double(v) * (double(v) - 1.0);
                            }
                            const double N = double(cfg.N);
                            d.pair_prob = pairs / (N * (N - 1.0));
                            stats[r] = d;
                        });

    CsvFile csv = ctx.csv("forward_days.csv", "forward");
    csv.header("day,s_spring,s_total,max_family_spring,max_family_total,nu_max,pair_coalescence_prob");
    double cn_sum = 0.0;
    for (std::uint64_t r = 0; r < ctx.replicates; ++r) {
        const auto& d = stats[r];
        csv.row(std::to_string(r) + "," + std::to_string(d.s_spring) + "," +
                std::to_string(d.s_total) + "," + std::to_string(d.max_spring) + "," +
                std::to_string(d.max_total) + "," + std::to_string(d.nu_max) + "," +
                fmt(d.pair_prob));
        cn_sum += d.pair_prob;
    }
    json results;
    results["days"] = ctx.replicates;
    results["mean_pair_coalescence_prob"] = cn_sum / double(ctx.replicates);
    return finish(ctx, "forward", std::move(results));
}

// --- genealogy ---------------------------------------------------------------

json cmd_genealogy(json config) {
    RunContext ctx = make_context(config, "genealogy");
    if (!config.contains("model"))
        throw std::invalid_argument("config field missing: model");
    const ModelConfig cfg = model_config_from_json(config.at("model"));
    const int n = int(config.value("sample_size", 10));
    const long horizon = long(config.value("horizon", 100000000.0));
    const std::uint64_t cn_reps = config.value("cn_replicates", std::uint64_t(200000));
    const bool full_mode = config.value("mode", std::string("lineage")) == "full_record";

    const MomentSums cn = [&] {
        MomentSums s;
        RandomStream rs = derive_stream({salt_seed(ctx.master_seed, "genealogy.cn"), 0});
        const CnEstimate e = estimate_cN(cfg, cn_reps, rs);
        s.sum = e.point * double(e.replicates);
        s.n = e.replicates;
        s.sumsq = 0;
        return s;
    }();
    const double cn_hat = cn.mean();

    std::vector<AncestralTrajectory> trajs(ctx.replicates);
    parallel_replicates(salt_seed(ctx.master_seed, "genealogy"), ctx.replicates, ctx.workers,
                        [&](std::uint64_t r, RandomStream& rs) {
                            trajs[r] = run_ancestral_process(
                                n, cfg, horizon, rs,
                                full_mode ? GenealogyMode::full_record : GenealogyMode::lineage);
                        });

    CsvFile csv = ctx.csv("genealogy_events.csv", "genealogy");
    csv.header("trajectory,day,scaled_time,blocks_before,merger_size");
    std::vector<std::uint64_t> size_hist(std::size_t(n + 1), 0);
    std::uint64_t absorbed = 0, total_days = 0;
    for (std::uint64_t r = 0; r < ctx.replicates; ++r) {
        const auto& t = trajs[r];
        absorbed += t.absorbed;
        total_days += std::uint64_t(t.days);
        int blocks = t.n;
        for (const auto& md : t.merger_log) {
            int merged_away = 0;
            for (int k : md.sizes) {
                csv.row(std::to_string(r) + "," + std::to_string(md.day) + "," +
                        fmt(double(md.day) * cn_hat) + "," + std::to_string(blocks) + "," +
                        std::to_string(k));
                ++size_hist[std::size_t(k)];
                merged_away += k - 1;
            }
            blocks -= merged_away;
        }
    }
    json results;
    results["c_N_hat"] = cn_hat;
    results["absorbed_fraction"] = double(absorbed) / double(ctx.replicates);
    results["mean_days"] = double(total_days) / double(ctx.replicates);
    json hist = json::array();
    for (int k = 2; k <= n; ++k) hist.push_back(size_hist[std::size_t(k)]);
    results["merger_size_histogram"] = hist;
    return finish(ctx, "genealogy", std::move(results));
}

// --- coalescent ---------------------------------------------------------------

json cmd_coalescent(json config) {
    RunContext ctx = make_context(config, "coalescent");
    if (!config.contains("measure"))
        throw std::invalid_argument("config field missing: measure");
    const LambdaMeasure measure = measure_from_json(config.at("measure"));
    const int n = int(config.value("sample_size", 10));
    const int b_max = int(config.value("b_max", double(std::max(n, 10))));
    const RatesTable table = RatesTable::build(measure, b_max);

    CsvFile rates = ctx.csv("coalescent_rates.csv", "coalescent.rates");
    rates.header("b,k,lambda_bk,event_rate,method");
    for (int b = 2; b <= b_max; ++b)
        for (int k = 2; k <= b; ++k)
            rates.row(std::to_string(b) + "," + std::to_string(k) + "," + fmt(table.rate(b, k)) +
                      "," + fmt(table.event_rate(b, k)) + "," +
                      (table.method(b, k) == RateMethod::closed_form ? "closed-form"
                                                                     : "quadrature"));

    CsvFile law = ctx.csv("coalescent_first_merger_law.csv", "coalescent.law");
    law.header("k,probability");
    bool have_law = table.total_rate(n) > 0;
    if (have_law) {
        const auto pmf = first_merger_size_law(table, n);
        for (int k = 2; k <= n; ++k)
            law.row(std::to_string(k) + "," + fmt(pmf[std::size_t(k - 2)]));
    }

    std::vector<CoalescentTrajectory> trajs(ctx.replicates);
    parallel_replicates(salt_seed(ctx.master_seed, "coalescent"), ctx.replicates, ctx.workers,
                        [&](std::uint64_t r, RandomStream& rs) {
                            trajs[r] = simulate_lambda_coalescent(table, n, rs);
                        });
    CsvFile ev = ctx.csv("coalescent_events.csv", "coalescent.events");
    ev.header("trajectory,time,blocks_before,merger_size");
    double absorb_sum = 0.0;
    std::uint64_t absorbed = 0;
    for (std::uint64_t r = 0; r < ctx.replicates; ++r) {
        const auto& t = trajs[r];
        int blocks = n;
        for (std::size_t e = 0; e < t.event_times.size(); ++e) {
            ev.row(std::to_string(r) + "," + fmt(t.event_times[e]) + "," +
                   std::to_string(blocks) + "," + std::to_string(t.merger_sizes[e]));
            blocks -= t.merger_sizes[e] - 1;
        }
        if (t.absorbed && !t.event_times.empty()) {
            absorb_sum += t.event_times.back();
            ++absorbed;
        }
    }
    json results;
    results["consistency_residual"] = table.max_consistency_residual();
    results["absorbed_fraction"] = double(absorbed) / double(ctx.replicates);
    if (absorbed) results["mean_absorption_time"] = absorb_sum / double(absorbed);
    return finish(ctx, "coalescent", std::move(results));
}

// --- verify -------------------------------------------------------------------

namespace {

json verify_limit(json& config, RunContext& ctx) {
    if (!config.contains("regime"))
        throw std::invalid_argument("config field missing: regime");
    const RegimeSpec regime = regime_from_json(config.at("regime"));
    const LambdaMeasure target = config.contains("target")
                                     ? measure_from_json(config.at("target"))
                                     : regime.limit_measure();
    std::vector<double> grid = config.value("x_grid", std::vector<double>{0.2, 0.4, 0.6, 0.8});
    std::vector<std::uint64_t> sweep =
        config.value("N_sweep", std::vector<std::uint64_t>{1000, 10000});
    LimitCheckBudget budget;
    budget.cn_replicates = config.value("cn_replicates", budget.cn_replicates);
    budget.pilot_replicates = config.value("pilot_replicates", budget.pilot_replicates);
    budget.max_tail_replicates = config.value("max_tail_replicates", budget.max_tail_replicates);
    budget.target_rel_se = config.value("target_rel_se", budget.target_rel_se);

    std::vector<ModelConfig> configs;
    for (std::uint64_t N : sweep) configs.push_back(regime.config_for(N));
    const LimitCheckReport rep = check_limit_condition(
        configs, target, grid, budget, salt_seed(ctx.master_seed, "verify.limit"), ctx.workers);

    CsvFile entries = ctx.csv("verify_limit_conditions.csv", "verify.limit.conditions");
    entries.header("N,cn_hat,cn_se,cond2_ratio,cond2_se,replicates");
    for (const auto& e : rep.entries)
        entries.row(fmt(e.N) + "," + fmt(e.cn_hat) + "," + fmt(e.cn_se) + "," +
                    fmt(e.cond2_ratio) + "," + fmt(e.cond2_se) + "," +
                    std::to_string(e.replicates));
    CsvFile pts = ctx.csv("verify_limit_points.csv", "verify.limit.points");
    pts.header("N,x,lhs,lhs_se,rhs,z,replicates,feasible");
    double max_abs_z = 0.0;
    bool all_feasible = true;
    for (const auto& p : rep.points) {
        pts.row(fmt(p.N) + "," + fmt(p.x) + "," + fmt(p.lhs) + "," + fmt(p.lhs_se) + "," +
                fmt(p.rhs) + "," + fmt(p.z) + "," + std::to_string(p.replicates) + "," +
                (p.feasible ? "1" : "0"));
        max_abs_z = std::max(max_abs_z, std::fabs(p.z));
        all_feasible = all_feasible && p.feasible;
    }
    json results;
    results["max_abs_z"] = max_abs_z;
    results["all_feasible"] = all_feasible;
    results["pass_z_le_3"] = max_abs_z <= 3.0;
    return results;
}

json verify_cn(json& config, RunContext& ctx) {
    if (!config.contains("regime"))
        throw std::invalid_argument("config field missing: regime");
    const RegimeSpec regime = regime_from_json(config.at("regime"));
    std::vector<std::uint64_t> sweep =
        config.value("N_sweep", std::vector<std::uint64_t>{1000, 10000, 100000});
    CsvFile csv = ctx.csv("verify_cn_sweep.csv", "verify.cn");
    csv.header("N,cn_hat,cn_se,asymptote,ratio");
    json rows = json::array();
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        const ModelConfig cfg = regime.config_for(sweep[i]);
        RandomStream rs = derive_stream({salt_seed(ctx.master_seed, "verify.cn") ^ (i + 1), 0});
        const CnEstimate e = estimate_cN(cfg, ctx.replicates, rs);
        const double asym = cN_asymptote(regime, double(sweep[i]));
        const double ratio = asym > 0 ? e.point / asym : 0.0;
        csv.row(std::to_string(sweep[i]) + "," + fmt(e.point) + "," + fmt(e.std_error) + "," +
                fmt(asym) + "," + fmt(ratio));
        rows.push_back({{"N", sweep[i]},
                        {"cn_hat", e.point},
                        {"cn_se", e.std_error},
                        {"asymptote", asym},
                        {"ratio", ratio}});
    }
    json results;
    results["sweep"] = rows;
    return results;
}

json verify_tail(json& config, RunContext& ctx) {
    std::vector<double> a_grid = config.value("a_grid", std::vector<double>{0.5, 1.5});
    std::vector<double> k_grid = config.value("k_grid", std::vector<double>{1, 10, 100});
    CsvFile csv = ctx.csv("verify_tail.csv", "verify.tail");
    csv.header("a,k,exact,mc_estimate,mc_se,z,ratio_ka");
    json rows = json::array();
    double max_abs_z = 0.0;
    for (std::size_t ai = 0; ai < a_grid.size(); ++ai) {
        const double a = a_grid[ai];
        for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
            const double k = k_grid[ki];
            const double exact = tail_exact_exponential(a, k);
            // zeta ~ Exp(a), lambda = 1: X ~ Geom(e^{-zeta}).
            const auto mc = parallel_mc(
                salt_seed(ctx.master_seed, "verify.tail") ^ ((ai * 97 + ki) + 1),
                ctx.replicates, ctx.workers, [&](RandomStream& rs) -> double {
                    const double zeta = rs.exponential(a);
                    return rs.geometric_from_growth(zeta) > k ? 1.0 : 0.0;
                });
            const double z = mc.std_error() > 0 ? (mc.mean() - exact) / mc.std_error() : 0.0;
            max_abs_z = std::max(max_abs_z, std::fabs(z));
            const double ratio =
                std::pow(k, a) * exact / std::exp(log_gamma(a + 1.0));
            csv.row(fmt(a) + "," + fmt(k) + "," + fmt(exact) + "," + fmt(mc.mean()) + "," +
                    fmt(mc.std_error()) + "," + fmt(z) + "," + fmt(ratio));
            rows.push_back({{"a", a}, {"k", k}, {"exact", exact}, {"mc", mc.mean()},
                            {"se", mc.std_error()}, {"z", z}});
        }
    }
    json results;
    results["rows"] = rows;
    results["max_abs_z"] = max_abs_z;
    results["pass_z_le_3"] = max_abs_z <= 3.0;
    return results;
}

json verify_polya(json& config, RunContext& ctx) {
    std::vector<std::uint64_t> m_grid =
        config.value("M_grid", std::vector<std::uint64_t>{1, 10, 100});
    const std::uint64_t final_total = config.value("final_total", std::uint64_t(10000));
    CsvFile csv = ctx.csv("verify_polya.csv", "verify.polya");
    csv.header("M,final_total,estimate,se,bound,margin");
    json rows = json::array();
    bool pass = true;
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        RandomStream rs =
            derive_stream({salt_seed(ctx.master_seed, "verify.polya") ^ (i + 1), 0});
        const PolyaResult r =
            polya_same_color_prob(m_grid[i], std::max(final_total, m_grid[i]), ctx.replicates, rs);
        const double margin = r.bound - r.estimate;
        pass = pass && r.estimate <= r.bound + 3.0 * r.std_error;
        csv.row(std::to_string(m_grid[i]) + "," + std::to_string(final_total) + "," +
                fmt(r.estimate) + "," + fmt(r.std_error) + "," + fmt(r.bound) + "," +
                fmt(margin));
        rows.push_back({{"M", m_grid[i]}, {"estimate", r.estimate}, {"se", r.std_error},
                        {"bound", r.bound}});
    }
    json results;
    results["rows"] = rows;
    results["pass_bound"] = pass;
    return results;
}

json verify_coupling(json& config, RunContext& ctx) {
    const double gamma = config.value("gamma", 1.0);
    const double c = config.value("c", 1.0);
    const double r = config.value("r", 1.0);
    const std::string rule = config.value("T_rule", std::string("log_squared"));
    std::vector<double> sweep = config.value(
        "N_sweep", std::vector<double>{1e3, 1e4, 1e5, 1e6, 1e7});
    std::function<double(double)> T_rule;
    if (rule == "log_squared")
        T_rule = [](double N) { return std::pow(std::log(N), 2.0); };
    else if (rule == "log")
        T_rule = [](double N) { return std::log(N); };
    else if (rule == "sqrt")
        T_rule = [](double N) { return std::sqrt(N); };
    else
        throw std::invalid_argument("coupling.T_rule: unknown rule '" + rule + "'");
    const CouplingReport rep = coupling_condition_holds(gamma, c, T_rule, r, sweep);
    CsvFile csv = ctx.csv("verify_coupling.csv", "verify.coupling");
    csv.header("N,T_N,value,logN_over_TN");
    for (const auto& row : rep.rows)
        csv.row(fmt(row.N) + "," + fmt(row.T_N) + "," + fmt(row.value) + "," +
                fmt(row.logN_over_TN));
    json results;
    results["holds"] = rep.holds;
    results["logN_condition"] = rep.logN_condition;
    return results;
}

}  // namespace

json cmd_verify(json config) {
    const std::string task = config.value("task", std::string());
    if (task.empty())
        throw std::invalid_argument(
            "config field missing: task (limit | cn | tail | polya | coupling)");
    RunContext ctx = make_context(config, "verify");
    json results;
    if (task == "limit")
        results = verify_limit(config, ctx);
    else if (task == "cn")
        results = verify_cn(config, ctx);
    else if (task == "tail")
        results = verify_tail(config, ctx);
    else if (task == "polya")
        results = verify_polya(config, ctx);
    else if (task == "coupling")
        results = verify_coupling(config, ctx);
    else
        throw std::invalid_argument("verify.task: unknown task '" + task + "'");
    results["task"] = task;
    return finish(ctx, "verify", std::move(results));
}

// --- construct ----------------------------------------------------------------

json cmd_construct(json config) {
    RunContext ctx = make_context(config, "construct");
    std::vector<EtaAtom> eta;
    if (config.contains("eta"))
        for (const auto& a : config.at("eta"))
            eta.push_back({require_number(a, "eta[]", "kappa"),
                           require_number(a, "eta[]", "mass")});
    const double a1 = config.value("a1", 0.0);
    const double a2 = config.value("a2", 0.0);
    const double r = config.value("r", 0.25);
    const std::uint64_t N = config.value("N", std::uint64_t(10000));
    const ConstructResult res = construct_mixture_wake_law(eta, a1, a2, r, N);

    CsvFile csv = ctx.csv("construct_sigma_atoms.csv", "construct");
    csv.header("sigma,weight_given_early,weight_total");
    for (const auto& s : res.sigma_given_early)
        csv.row(fmt(s.sigma) + "," + fmt(s.weight) + "," + fmt(res.omega * s.weight));

    // Ready-to-run config for the genealogy/verify commands.
    json model = model_config_to_json(res.config);
    json ready;
    ready["model"] = model;
    ready["master_seed"] = ctx.master_seed;
    ready["replicates"] = ctx.replicates;
    const auto path = ctx.out_dir / "construct_model.json";
    std::ofstream out(path);
    out << ready.dump(2) << "\n";
    ctx.outputs.push_back(path.string());

    json results;
    results["omega"] = res.omega;
    results["alpha_N"] = res.alpha_N;
    results["model"] = model;
    return finish(ctx, "construct", std::move(results));
}

}  // namespace dormcoal
