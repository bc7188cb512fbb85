#include "subprime_cli/commands.hpp"

#include <iomanip>
#include <sstream>

#include "subprime_cli/output.hpp"
#include "subprime_cli/scenario_io.hpp"

namespace subprime::cli {

using nlohmann::json;

namespace {

void apply_overrides(Scenario& sc, const CommandOptions& options) {
  auto& cfg = sc.config;
  if (options.mode) {
    cfg.subsidy_mode = parse_mode(*options.mode);
  }
  if (options.seed) {
    cfg.base_seed = *options.seed;
  }
  if (options.replications) {
    cfg.replications = *options.replications;
  }
  if (options.horizon) {
    cfg.horizon = *options.horizon;
  }
  if (options.aggregation) {
    const auto agg = parse_aggregation(*options.aggregation);
    for (auto& p : cfg.policies) {
      p.aggregation = agg;
    }
  }
  cfg.validate_assumptions = cfg.validate_assumptions && options.validate;
}

Scenario resolve(const CommandOptions& options) {
  Scenario sc = load_scenario(options.scenario);
  apply_overrides(sc, options);
  return sc;
}

bool all_hold(const std::vector<engine::AssumptionCheck>& checks) {
  for (const auto& c : checks) {
    if (!c.holds) {
      return false;
    }
  }
  return true;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int cmd_thresholds(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = resolve(options);
    const auto& cfg = sc.config;
    engine::validate_structure(cfg);
    const auto& w = cfg.groups[0];
    const auto& b = cfg.groups[1];
    const auto ts = risk::compute_thresholds(cfg.policies[0], cfg.policies[1], w.mean, b.mean,
                                             w.stdev(), cfg.pricing.nu_max);

    out << std::setprecision(10);
    out << "scenario: " << options.scenario.string() << '\n';
    out << "premium nu_max: " << cfg.pricing.nu_max << '\n';
    out << "sigma2_L_uni     " << ts.sigma2_L_uni << '\n';
    out << "sigma2_L_pool    " << ts.sigma2_L_pool << '\n';
    out << "sigma2_H_uni     " << ts.sigma2_H_uni << '\n';
    out << "sigma2_H_pool    " << ts.sigma2_H_pool << '\n';
    out << "sigma2_L_pool_es " << ts.sigma2_L_pool_es << '\n';
    out << "ordering 0 < L_uni < L_pool < H_uni < H_pool: " << (ts.ordered() ? "PASS" : "FAIL")
        << '\n';
    for (const auto bank : {market::Bank::L, market::Bank::H}) {
      const auto& pol = cfg.policies[market::idx(bank)];
      if (!pol.ordering_guaranteed()) {
        out << "warning: bank " << market::to_string(bank) << " alpha = " << pol.alpha
            << "; the threshold ordering guarantee requires alpha < 0.1\n";
      }
    }
    if (cfg.pricing.nu_max <= 0.0) {
      out << "warning: nu_max = 0; the ordering guarantee requires a positive premium\n";
    }
    out << "L pooled gate threshold (" << risk::to_string(engine::effective_policy_l(cfg).metric)
        << ", " << risk::to_string(cfg.policies[0].aggregation)
        << "): " << engine::l_pooled_threshold(cfg) << '\n';

    const auto checks = engine::check_trap_assumptions(cfg);
    out << "assumptions:\n";
    for (const auto& c : checks) {
      out << "  [" << (c.holds ? "PASS" : "FAIL") << "] " << c.name << ": " << c.detail << '\n';
    }
    const bool ok = all_hold(checks);
    if (!ok && cfg.validate_assumptions) {
      err << "error: trap assumptions not satisfied\n";
      return 1;
    }
    return 0;
  });
}

int cmd_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = resolve(options);
    const auto& cfg = sc.config;
    engine::validate_structure(cfg);
    if (cfg.validate_assumptions) {
      engine::require_trap_assumptions(cfg);
    }
    std::error_code ec;
    std::filesystem::create_directories(options.out, ec);
    if (ec || !std::filesystem::is_directory(options.out)) {
      throw std::runtime_error("cannot create output directory " + options.out.string());
    }

    const auto record = engine::run_scenario(cfg, cfg.base_seed, 0, &sc.guarantee);

    json summary = summary_json(record);
    summary["mode"] = std::string(engine::to_string(cfg.subsidy_mode));
    summary["seed"] = cfg.base_seed;
    summary["horizon"] = cfg.horizon;
    if (cfg.replications > 1) {
      const auto report = engine::monte_carlo(cfg, options.threads, &sc.guarantee);
      summary["monte_carlo"] = report_json(report);
    }

    std::ostringstream traj;
    write_trajectory_csv(traj, record);
    std::ostringstream bel;
    write_beliefs_csv(bel, record, cfg.groups[1].true_variance);

    const std::vector<std::pair<std::string, std::string>> files = {
        {"trajectory.csv", traj.str()},
        {"beliefs.csv", bel.str()},
        {"summary.json", summary.dump(2) + "\n"},
    };
    json manifest;
    manifest["scenario"] = options.scenario.string();
    manifest["config"] = to_json(cfg, sc.guarantee_spec);
    manifest["outputs"] = json::array();
    for (const auto& [name, content] : files) {
      const auto path = options.out / name;
      write_file(path, content);
      manifest["outputs"].push_back({{"file", name}, {"sha256", sha256_file(path)}});
    }
    write_file(options.out / "manifest.json", manifest.dump(2) + "\n");

    out << "mode " << engine::to_string(cfg.subsidy_mode) << ", " << record.outcomes.size()
        << " periods, escaped: " << (record.escaped() ? "yes" : "no");
    if (record.escape_time) {
      out << " (tau = " << *record.escape_time << ")";
    }
    out << ", total subsidy " << format_double(record.total_subsidy) << '\n';
    out << "wrote " << (options.out / "trajectory.csv").string() << ", beliefs.csv, summary.json, "
        << "manifest.json\n";
    return 0;
  });
}

int cmd_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json base = read_json_file(options.scenario);
    const json spec = read_json_file(options.sweep);
    const std::string sweep_src = options.sweep.string();

    std::vector<std::string> params;
    const auto pit = spec.find("parameter");
    if (pit == spec.end()) {
      throw ParseError(sweep_src + ": key 'parameter': missing");
    }
    if (pit->is_string()) {
      params.push_back(pit->get<std::string>());
    } else if (pit->is_array() && !pit->empty()) {
      for (const auto& p : *pit) {
        if (!p.is_string()) {
          throw ParseError(sweep_src + ": key 'parameter': expected strings");
        }
        params.push_back(p.get<std::string>());
      }
    } else {
      throw ParseError(sweep_src + ": key 'parameter': expected a string or array of strings");
    }
    const auto vit = spec.find("values");
    if (vit == spec.end() || !vit->is_array()) {
      throw ParseError(sweep_src + ": key 'values': expected an array");
    }

    CommandOptions opts = options;
    if (!opts.replications && spec.contains("replications")) {
      opts.replications = spec.at("replications").get<std::uint64_t>();
    }
    if (!opts.mode && spec.contains("mode")) {
      opts.mode = spec.at("mode").get<std::string>();
    }
    if (!opts.horizon && spec.contains("horizon")) {
      opts.horizon = spec.at("horizon").get<std::uint64_t>();
    }

    std::string param_label;
    for (const auto& p : params) {
      param_label += (param_label.empty() ? "" : "+") + p;
    }

    std::error_code ec;
    std::filesystem::create_directories(opts.out, ec);
    if (ec || !std::filesystem::is_directory(opts.out)) {
      throw std::runtime_error("cannot create output directory " + opts.out.string());
    }

    std::ostringstream csv;
    csv << kSweepHeader << '\n';
    std::size_t invalid = 0;
    for (const auto& value : *vit) {
      const std::string value_text = value.is_number() ? format_double(value.get<double>())
                                                       : value.dump();
      csv << param_label << ',' << value_text << ',';
      try {
        json doc = base;
        for (const auto& p : params) {
          set_by_path(doc, p, value);
        }
        Scenario sc = parse_scenario(doc, options.scenario.string());
        apply_overrides(sc, opts);
        engine::validate_structure(sc.config);
        bool trap_ok = false;
        try {
          trap_ok = all_hold(engine::check_trap_assumptions(sc.config));
        } catch (const std::exception&) {
          trap_ok = false;
        }
        const auto report = engine::monte_carlo(sc.config, opts.threads, &sc.guarantee);
        csv << "true," << (trap_ok ? "pass" : "fail") << ','
            << format_double(report.escape_probability) << ','
            << (report.mean_tau ? format_double(*report.mean_tau) : "") << ','
            << format_double(report.mean_total_subsidy) << ','
            << format_double(report.mean_premium_pre) << ','
            << format_double(report.mean_initial_sigma2_bl) << ','
            << format_double(report.mean_terminal_sigma2_bl) << ",\n";
      } catch (const std::exception& e) {
        ++invalid;
        std::string msg = e.what();
        for (char& c : msg) {
          if (c == ',' || c == '\n' || c == '"') {
            c = ';';
          }
        }
        csv << "false,,,,,,,," << msg << '\n';
      }
    }
    write_file(opts.out / "sweep.csv", csv.str());
    out << "swept " << param_label << " over " << vit->size() << " values (" << invalid
        << " invalid); wrote " << (opts.out / "sweep.csv").string() << '\n';
    return 0;
  });
}

}  // namespace subprime::cli
