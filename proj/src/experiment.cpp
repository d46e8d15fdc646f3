#include "mvo/experiment.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mvo {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_vector(const Vector& v) {
    std::string s = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt17(v[i]);
    }
    return s + "]";
}

void hash_return(std::uint64_t& h, const ReturnVector& x) {
    const auto* bytes =
        reinterpret_cast<const unsigned char*>(x.values().data());
    const std::size_t n = sizeof(double) * static_cast<std::size_t>(x.size());
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;  // FNV-1a
    }
}

// Sequential source of realized returns together with the exact conditional
// law needed by the Bayesian oracle.
class MarketDriver {
  public:
    MarketDriver(const MarketSpec& spec, std::uint64_t seed)
        : spec_(spec), rng_(seed) {
        if (const auto* mc = std::get_if<MarkovChainSpec>(&spec_)) {
            // initial state from the stationary law
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const double r = u(rng_);
            double cum = 0.0;
            state_ = mc->state_count() - 1;
            for (Eigen::Index j = 0; j < mc->state_count(); ++j) {
                cum += mc->stationary[j];
                if (r <= cum) {
                    state_ = j;
                    break;
                }
            }
        } else if (const auto* csv = std::get_if<CsvSource>(&spec_)) {
            data_ = load_csv(*csv).returns;
        }
    }

    Eigen::Index dimension() const {
        if (const auto* iid = std::get_if<IidSpec>(&spec_))
            return iid->dimension();
        if (const auto* mc = std::get_if<MarkovChainSpec>(&spec_))
            return mc->dimension();
        return data_.front().size();
    }

    std::size_t available() const {
        if (std::holds_alternative<CsvSource>(spec_)) return data_.size();
        return SIZE_MAX;
    }

    ReturnVector next() {
        if (const auto* iid = std::get_if<IidSpec>(&spec_))
            return iid_sample(*iid, rng_);
        if (const auto* mc = std::get_if<MarkovChainSpec>(&spec_)) {
            auto [x, s] = markov_step(*mc, state_, rng_);
            state_ = s;
            return x;
        }
        if (pos_ >= data_.size()) throw DataError("CSV data exhausted");
        return data_[pos_++];
    }

    // Conditional law of the next return given the observed past.
    std::optional<Moments> conditional() const {
        if (const auto* iid = std::get_if<IidSpec>(&spec_))
            return iid_limit_moments(*iid);
        if (const auto* mc = std::get_if<MarkovChainSpec>(&spec_))
            return conditional_moments(*mc, state_);
        return std::nullopt;
    }

    Eigen::Index state() const { return state_; }

  private:
    const MarketSpec& spec_;
    Rng rng_;
    Eigen::Index state_ = 0;
    std::vector<ReturnVector> data_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string StrategySpec::name() const {
    std::ostringstream os;
    switch (kind) {
        case StrategyKind::constant:
            os << "constant(alpha=" << alpha << ")";
            break;
        case StrategyKind::adaptive: {
            os << "adaptive(" <<
                (objective == ObjectiveKind::sharpe ? "sharpe" : "log_growth")
               << ",alphas=";
            for (std::size_t i = 0; i < alphas.size(); ++i)
                os << (i ? "," : "") << alphas[i];
            os << ")";
            break;
        }
        case StrategyKind::bayesian:
            os << "bayesian(alpha=" << alpha << ")";
            break;
        case StrategyKind::fixed:
            os << "fixed";
            break;
    }
    return os.str();
}

void ExperimentConfig::validate() const {
    if (h < 1 || horizon < h)
        throw ConfigError("need horizon >= h >= 1");
    if (strategy.kind == StrategyKind::adaptive) {
        if (strategy.alphas.empty())
            throw ConfigError("adaptive strategy needs a candidate alpha set");
        for (std::size_t i = 1; i < strategy.alphas.size(); ++i)
            if (strategy.alphas[i] <= strategy.alphas[i - 1])
                throw ConfigError("candidate alphas must be strictly increasing");
    }
    if (strategy.kind == StrategyKind::fixed && !strategy.fixed_weights)
        throw ConfigError("fixed strategy needs weights");
    if (strategy.kind == StrategyKind::bayesian &&
        std::holds_alternative<CsvSource>(market))
        throw ConfigError("the Bayesian oracle needs a synthetic market");
    if (const auto* iid = std::get_if<IidSpec>(&market)) iid->validate();
    if (const auto* mc = std::get_if<MarkovChainSpec>(&market)) mc->validate();
}

std::optional<Moments> limiting_moments(const MarketSpec& market) {
    if (const auto* iid = std::get_if<IidSpec>(&market))
        return iid_limit_moments(*iid);
    if (const auto* mc = std::get_if<MarkovChainSpec>(&market))
        return stationary_moments(*mc);
    return std::nullopt;
}

std::string serialize_market(const MarketSpec& market) {
    std::ostringstream os;
    if (const auto* iid = std::get_if<IidSpec>(&market)) {
        if (const auto* d = std::get_if<DiscreteDist>(&iid->distribution)) {
            os << "iid_discrete;probs=" << fmt_vector(d->probs) << ";points=";
            for (const auto& p : d->points) os << fmt_vector(p.values());
        } else {
            const auto& ln = std::get<TruncatedLognormal>(iid->distribution);
            os << "iid_lognormal;mu=" << fmt_vector(ln.mu_log) << ";sigma=";
            for (Eigen::Index i = 0; i < ln.sigma_log.rows(); ++i)
                os << fmt_vector(ln.sigma_log.row(i));
        }
        os << ";bounds=" << fmt17(iid->lower) << "," << fmt17(iid->upper);
    } else if (const auto* mc = std::get_if<MarkovChainSpec>(&market)) {
        os << "markov;T=";
        for (Eigen::Index i = 0; i < mc->transition.rows(); ++i)
            os << fmt_vector(mc->transition.row(i));
        os << ";pi=" << fmt_vector(mc->stationary) << ";x=";
        for (const auto& x : mc->state_returns) os << fmt_vector(x.values());
    } else {
        const auto& csv = std::get<CsvSource>(market);
        os << "csv;path=" << csv.path << ";kind="
           << (csv.kind == CsvKind::prices ? "prices" : "returns");
    }
    return os.str();
}

namespace {

// One strategy interface over the four configured kinds.
class StrategyRunner {
  public:
    StrategyRunner(const StrategySpec& spec, Eigen::Index m, std::size_t h)
        : spec_(spec) {
        switch (spec.kind) {
            case StrategyKind::constant:
                constant_ = std::make_unique<ConstantAlphaStrategy>(
                    m, RiskAversion(spec.alpha), h);
                break;
            case StrategyKind::adaptive: {
                std::vector<RiskAversion> as;
                for (double a : spec.alphas) as.emplace_back(a);
                adaptive_ = std::make_unique<AdaptiveAlphaStrategy>(
                    m, std::move(as), spec.objective, h);
                break;
            }
            case StrategyKind::bayesian:
                break;
            case StrategyKind::fixed:
                fixed_ = Portfolio(*spec.fixed_weights);
                break;
        }
    }

    std::pair<Portfolio, double> next(const MarketDriver& market,
                                      Eigen::Index markov_state) {
        switch (spec_.kind) {
            case StrategyKind::constant:
                return {constant_->next(), spec_.alpha};
            case StrategyKind::adaptive: {
                auto [b, a] = adaptive_->next();
                return {b, a.value()};
            }
            case StrategyKind::bayesian: {
                auto it = bayes_cache_.find(markov_state);
                if (it != bayes_cache_.end()) return {it->second, spec_.alpha};
                const Portfolio b = bayesian_next(*market.conditional(),
                                                  RiskAversion(spec_.alpha));
                bayes_cache_.emplace(markov_state, b);
                return {b, spec_.alpha};
            }
            case StrategyKind::fixed:
                return {*fixed_, spec_.alpha};
        }
        throw ConfigError("unreachable strategy kind");
    }

    void observe(const ReturnVector& x) {
        if (constant_) constant_->observe(x);
        if (adaptive_) adaptive_->observe(x);
    }

  private:
    const StrategySpec& spec_;
    std::unique_ptr<ConstantAlphaStrategy> constant_;
    std::unique_ptr<AdaptiveAlphaStrategy> adaptive_;
    std::optional<Portfolio> fixed_;
    std::map<Eigen::Index, Portfolio> bayes_cache_;
};

std::string trace_line(std::size_t step, const Portfolio& b, double alpha,
                       const MetricsReport& rep,
                       const std::optional<double>& gap) {
    std::string s = "{\"step\":" + std::to_string(step);
    s += ",\"portfolio\":" + fmt_vector(b.weights());
    s += ",\"alpha_selected\":" + fmt17(alpha);
    s += ",\"metrics\":{\"mean\":" + fmt17(rep.mean);
    s += ",\"variance\":" + fmt17(rep.variance);
    s += ",\"sharpe\":";
    s += (rep.sharpe_valid && !rep.sharpe_infinite) ? fmt17(rep.sharpe)
                                                    : std::string("null");
    s += ",\"growth\":" + fmt17(rep.growth);
    s += ",\"wealth\":" + fmt17(rep.wealth);
    s += ",\"utility\":" + fmt17(rep.utility) + "}";
    s += ",\"gap\":" + (gap ? fmt17(*gap) : std::string("null"));
    return s + "}";
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    MarketDriver market(cfg.market, cfg.seed);
    if (market.available() < cfg.horizon)
        throw ConfigError("market supplies fewer periods than the horizon");
    const Eigen::Index m = market.dimension();
    StrategyRunner strategy(cfg.strategy, m, cfg.h);
    MetricsTracker tracker;

    const std::optional<Moments> limit = limiting_moments(cfg.market);
    std::map<double, double> optimal_utility;  // per reporting alpha
    auto gap_for = [&](double alpha, double emp_utility) -> std::optional<double> {
        if (!limit) return std::nullopt;
        auto it = optimal_utility.find(alpha);
        if (it == optimal_utility.end()) {
            const SolveResult r = solve_mv(RiskAversion(alpha), *limit);
            it = optimal_utility.emplace(alpha, r.utility).first;
        }
        return std::abs(emp_utility - it->second);
    };

    std::ofstream trace;
    if (!cfg.output.empty()) {
        trace.open(cfg.output, std::ios::trunc);
        if (!trace) throw ConfigError("cannot open trace output " + cfg.output);
    }

    RunSummary summary;
    summary.strategy_name = cfg.strategy.name();
    summary.path_hash = 1469598103934665603ULL;  // FNV offset basis

    Portfolio last = Portfolio::uniform(m);
    double last_alpha = cfg.strategy.alpha;
    try {
        for (std::size_t step = 1; step <= cfg.horizon; ++step) {
            auto [b, alpha] = strategy.next(market, market.state());
            const ReturnVector x = market.next();
            tracker.record(b, x);
            strategy.observe(x);
            hash_return(summary.path_hash, x);
            last = b;
            last_alpha = alpha;
            if (trace.is_open() && cfg.report_every > 0 &&
                step % cfg.report_every == 0) {
                const MetricsReport rep = tracker.report(RiskAversion(alpha));
                trace << trace_line(step, b, alpha, rep,
                                    gap_for(alpha, rep.utility))
                      << "\n";
            }
        }
    } catch (...) {
        if (trace.is_open()) trace.flush();  // keep the partial trace
        throw;
    }

    const MetricsReport rep = tracker.report(RiskAversion(last_alpha));
    summary.metrics = rep;
    summary.alpha_selected = last_alpha;
    summary.ground_truth_gap = gap_for(last_alpha, rep.utility);
    if (trace.is_open())
        trace << trace_line(cfg.horizon, last, last_alpha, rep,
                            summary.ground_truth_gap)
              << "\n";
    return summary;
}

std::vector<RunSummary> compare_strategies(
    const std::vector<ExperimentConfig>& cfgs) {
    if (cfgs.empty()) throw ConfigError("no experiments to compare");
    const std::string market_id = serialize_market(cfgs.front().market);
    for (const auto& cfg : cfgs) {
        if (serialize_market(cfg.market) != market_id ||
            cfg.seed != cfgs.front().seed ||
            cfg.horizon != cfgs.front().horizon)
            throw ConfigError(
                "compared experiments must share market, seed, and horizon");
    }

    std::vector<RunSummary> out(cfgs.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        try {
            out[i] = run_experiment(cfgs[i]);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    for (const auto& s : out)
        if (s.path_hash != out.front().path_hash)
            throw ConfigError("paired runs diverged: path hash mismatch");
    return out;
}

namespace {

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<std::vector<double>> parse_rows(const std::string& s) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(s);
    std::string row;
    while (std::getline(ss, row, ';')) {
        auto vals = parse_doubles(row);
        if (!vals.empty()) rows.push_back(std::move(vals));
    }
    return rows;
}

Vector to_vector(const std::vector<double>& v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string()
                                          : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw ConfigError(path + ": missing required key '" + key + "'");
        return it->second;
    };
    auto get = [&](const std::string& key,
                   const std::string& def) -> std::string {
        auto it = kv.find(key);
        return it == kv.end() ? def : it->second;
    };

    ExperimentConfig cfg;
    cfg.horizon = std::stoull(need("horizon"));
    cfg.h = std::stoull(get("h", "8"));
    cfg.seed = std::stoull(get("seed", "1"));
    cfg.report_every = std::stoull(get("report_every", "0"));
    cfg.output = get("output", "");

    const std::string market = need("market");
    if (market == "iid_discrete") {
        DiscreteDist d;
        for (const auto& row : parse_rows(need("points")))
            d.points.emplace_back(to_vector(row));
        d.probs = to_vector(parse_doubles(need("probs")));
        IidSpec spec;
        spec.distribution = std::move(d);
        spec.lower = std::stod(get("lower", "1e-6"));
        spec.upper = std::stod(get("upper", "10"));
        cfg.market = std::move(spec);
    } else if (market == "iid_lognormal") {
        TruncatedLognormal ln;
        ln.mu_log = to_vector(parse_doubles(need("mu_log")));
        const auto rows = parse_rows(need("sigma_log"));
        ln.sigma_log = Matrix(static_cast<Eigen::Index>(rows.size()),
                              static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size())
                throw ConfigError(path + ": sigma_log must be square");
            ln.sigma_log.row(static_cast<Eigen::Index>(i)) =
                to_vector(rows[i]).transpose();
        }
        IidSpec spec;
        spec.distribution = std::move(ln);
        spec.lower = std::stod(get("lower", "1e-6"));
        spec.upper = std::stod(get("upper", "10"));
        cfg.market = std::move(spec);
    } else if (market == "markov") {
        cfg.market = make_reversible_chain(
            std::stoll(need("markov_states")), std::stoll(need("markov_assets")),
            std::stoull(get("markov_seed", get("seed", "1"))));
    } else if (market == "csv") {
        CsvSource src;
        src.path = need("csv_path");
        const std::string kind = get("csv_kind", "returns");
        if (kind == "prices")
            src.kind = CsvKind::prices;
        else if (kind == "returns")
            src.kind = CsvKind::returns;
        else
            throw ConfigError(path + ": csv_kind must be prices or returns");
        src.clamp_out_of_bound = get("csv_clamp", "0") == "1";
        cfg.market = std::move(src);
    } else {
        throw ConfigError(path + ": unknown market '" + market + "'");
    }

    const std::string strat = need("strategy");
    if (strat == "constant") {
        cfg.strategy.kind = StrategyKind::constant;
        cfg.strategy.alpha = std::stod(need("alpha"));
    } else if (strat == "adaptive") {
        cfg.strategy.kind = StrategyKind::adaptive;
        cfg.strategy.alphas = parse_doubles(need("alphas"));
        const std::string obj = get("objective", "sharpe");
        if (obj == "sharpe")
            cfg.strategy.objective = ObjectiveKind::sharpe;
        else if (obj == "log_growth")
            cfg.strategy.objective = ObjectiveKind::log_growth;
        else
            throw ConfigError(path + ": objective must be sharpe or log_growth");
        if (!cfg.strategy.alphas.empty())
            cfg.strategy.alpha = cfg.strategy.alphas.front();
    } else if (strat == "bayesian") {
        cfg.strategy.kind = StrategyKind::bayesian;
        cfg.strategy.alpha = std::stod(need("alpha"));
    } else if (strat == "fixed") {
        cfg.strategy.kind = StrategyKind::fixed;
        cfg.strategy.fixed_weights = to_vector(parse_doubles(need("weights")));
        cfg.strategy.alpha = std::stod(get("alpha", "0"));
    } else {
        throw ConfigError(path + ": unknown strategy '" + strat + "'");
    }

    cfg.validate();
    return cfg;
}

}  // namespace mvo
