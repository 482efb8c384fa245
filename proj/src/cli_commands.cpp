#include "gridcred/cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gridcred/parallel.hpp"
#include "gridcred/results.hpp"
#include "json.hpp"

namespace gridcred {

namespace {

int guard(const std::function<void()>& fn) {
    try {
        fn();
        return kExitOk;
    } catch (const NonBracketableError& e) {
        std::cerr << "error (non-bracketable): " << e.what() << '\n';
        return kExitNonBracketable;
    } catch (const SolverError& e) {
        std::cerr << "error (solver): " << e.what() << '\n';
        return kExitSolver;
    } catch (const IngestError& e) {
        std::cerr << "error (ingestion): " << e.what() << '\n';
        return kExitIngest;
    } catch (const FitError& e) {
        std::cerr << "error (fit): " << e.what() << '\n';
        return kExitIngest;
    } catch (const InputError& e) {
        std::cerr << "error (config): " << e.what() << '\n';
        return kExitConfig;
    } catch (const StructureError& e) {
        std::cerr << "error (config): " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOther;
    }
}

TrendModel make_trend(const StudyConfig& config, const HistoricalArchive& archive) {
    TrendModel trend;
    if (!config.trend_file.empty())
        trend = load_trend_model(config.trend_file);
    else
        trend = fit_trend_model(archive, config.buffer_hours);
    trend.buffer_hours = config.buffer_hours;
    if (config.beta_tau_override)
        for (auto& b : trend.beta_tau) b = *config.beta_tau_override;
    if (config.beta_hurr_override) trend.hurricane.beta_hurr = *config.beta_hurr_override;
    return trend;
}

PortfolioSpec split_portfolio(const PowerSystem& full, const std::vector<std::string>& labels) {
    PortfolioSpec spec;
    spec.base = full;
    spec.base.solar.clear();
    spec.base.wind.clear();
    spec.base.storage.clear();

    auto want = [&labels](const std::string& label) {
        return labels.empty() ||
               std::find(labels.begin(), labels.end(), label) != labels.end();
    };
    std::vector<std::string> seen;
    for (const auto& s : full.solar) {
        std::string label = "s" + std::to_string(s.id);
        if (want(label)) {
            spec.solar.push_back(s);
            seen.push_back(label);
        } else {
            spec.base.solar.push_back(s);
        }
    }
    for (const auto& w : full.wind) {
        std::string label = "w" + std::to_string(w.id);
        if (want(label)) {
            spec.wind.push_back(w);
            seen.push_back(label);
        } else {
            spec.base.wind.push_back(w);
        }
    }
    for (const auto& b : full.storage) {
        std::string label = "b" + std::to_string(b.id);
        if (want(label)) {
            spec.storage.push_back(b);
            seen.push_back(label);
        } else {
            spec.base.storage.push_back(b);
        }
    }
    for (const auto& label : labels)
        if (std::find(seen.begin(), seen.end(), label) == seen.end())
            throw InputError("accredit label '" + label + "' matches no resource in the system");
    return spec;
}

std::string trace_name(const std::string& cache_key) {
    if (cache_key.empty()) return "base";
    std::string s = cache_key;
    while (!s.empty() && s.back() == '|') s.pop_back();
    for (auto& c : s)
        if (c == '|') c = '-';
    return s;
}

}  // namespace

StudyContext prepare_study(const StudyConfig& config) {
    config.validate();
    StudyContext ctx;
    if (config.system_file.empty())
        throw InputError("no system file configured (system_file)");
    if (!std::filesystem::exists(config.system_file))
        throw InputError("system file not found: " + config.system_file);
    ctx.full_system = load_system(config.system_file);
    auto issues = validate_system(ctx.full_system);
    if (!issues.empty())
        throw StructureError("system file " + config.system_file + ": " + issues.front());
    if (config.weather_files.empty() || config.load_files.empty())
        throw InputError("weather_files and load_files must be configured");
    ctx.archive = ingest_archive(config.weather_files, config.load_files, config.hurricane_file);
    ctx.trend = make_trend(config, ctx.archive);
    ctx.scenarios = sample_scenarios(ctx.archive, ctx.trend, config.month, config.eval_year,
                                     config.scenario_count, config.master_seed);
    ctx.portfolio = split_portfolio(ctx.full_system, config.accredit);
    return ctx;
}

StudyOptions study_options(const StudyConfig& config) {
    StudyOptions opts;
    opts.target_lolh = config.target_lolh;
    opts.epsilon_la = config.epsilon_la;
    opts.shed_tolerance_mw = config.shed_tolerance_mw;
    opts.costs.voll = config.voll;
    opts.costs.curtailment_multiplier = config.curtailment_multiplier;
    opts.solver.mip_gap_abs = config.mip_gap_abs;
    opts.solver.node_limit = config.node_limit;
    opts.solver.mode = config.solver_mode == "export" ? SolverOptions::Mode::ExportOnly
                                                      : SolverOptions::Mode::Bundled;
    opts.threads = config.threads;
    return opts;
}

int cmd_fit_trends(const StudyConfig& config) {
    return guard([&] {
        config.validate();
        if (config.weather_files.empty() || config.load_files.empty())
            throw InputError("weather_files and load_files must be configured");
        HistoricalArchive archive =
            ingest_archive(config.weather_files, config.load_files, config.hurricane_file);
        TrendModel trend = make_trend(config, archive);
        std::filesystem::create_directories(config.out_dir);
        std::string path = config.out_dir + "/trends.json";
        save_trend_model(trend, path);
        std::printf("trend model written to %s (%d archive years, %zu interpolated hours)\n",
                    path.c_str(), trend.archive_years, archive.interpolated_hours);
        std::printf("beta_tau (degC/yr):");
        for (double b : trend.beta_tau) std::printf(" %.4g", b);
        std::printf("\nbeta_hurr: %.6g events/yr\n", trend.hurricane.beta_hurr);
        std::printf("load regression: breakpoint %.2f degC, slopes %.3f / %.3f MW/degC\n",
                    trend.load_regression.breakpoint_c, trend.load_regression.left_slope,
                    trend.load_regression.right_slope);
    });
}

int cmd_sample(const StudyConfig& config) {
    return guard([&] {
        StudyContext ctx = prepare_study(config);
        std::filesystem::create_directories(config.out_dir);
        nlohmann::json manifest;
        manifest["month"] = config.month;
        manifest["eval_year"] = config.eval_year;
        manifest["count"] = config.scenario_count;
        manifest["seed"] = config.master_seed;
        manifest["scenarios"] = nlohmann::json::array();
        for (std::size_t i = 0; i < ctx.scenarios.scenarios.size(); ++i) {
            const auto& sc = ctx.scenarios.scenarios[i];
            std::string path = config.out_dir + "/scenario_" + std::to_string(i) + ".csv";
            std::ofstream out(path);
            if (!out) throw InputError("cannot write " + path);
            out << "hour,temp_c,ghi_wm2";
            for (std::size_t s = 0; s < sc.wind_ms.size(); ++s) out << ",wind_ms_site" << (s + 1);
            out << ",demand_mw,hurricane\n";
            char buf[64];
            for (std::size_t h = 0; h < sc.hours(); ++h) {
                out << h;
                std::snprintf(buf, sizeof(buf), ",%.6f,%.4f", sc.temp_c[h],
                              sc.insolation_wm2[h]);
                out << buf;
                for (const auto& site : sc.wind_ms) {
                    std::snprintf(buf, sizeof(buf), ",%.6f", site[h]);
                    out << buf;
                }
                std::snprintf(buf, sizeof(buf), ",%.6f,%d", sc.demand_mw[h],
                              static_cast<int>(sc.hurricane[h]));
                out << buf << '\n';
            }
            manifest["scenarios"].push_back({{"index", i},
                                             {"source_year", sc.source_year},
                                             {"shift_days", sc.shift_days},
                                             {"clamped_hours", sc.demand_clamped_hours}});
        }
        std::ofstream mo(config.out_dir + "/scenarios.json");
        mo << manifest.dump(2) << '\n';
        std::printf("%d scenarios written to %s\n", config.scenario_count,
                    config.out_dir.c_str());
    });
}

int cmd_uc_run(const StudyConfig& config, int scenario_index, double load_adjustment) {
    return guard([&] {
        StudyContext ctx = prepare_study(config);
        if (scenario_index < 0 ||
            scenario_index >= static_cast<int>(ctx.scenarios.scenarios.size()))
            throw InputError("scenario index out of range");
        const auto& sc = ctx.scenarios.scenarios[scenario_index];
        PtdfMatrix ptdf = build_ptdf(ctx.full_system);
        ScenarioInputs inputs = make_scenario_inputs(ctx.full_system, sc);
        StudyOptions opts = study_options(config);
        UcSolution sol = solve_rolling_horizon(ctx.full_system, ptdf, inputs, load_adjustment,
                                               opts.costs, opts.solver);
        auto violations =
            check_solution_feasibility(ctx.full_system, ptdf, inputs, load_adjustment, sol);

        std::filesystem::create_directories(config.out_dir);
        std::string path = config.out_dir + "/dispatch.csv";
        std::ofstream out(path);
        if (!out) throw InputError("cannot write " + path);
        out << "hour,demand_mw,shed_mw";
        for (const auto& g : ctx.full_system.thermal) out << ",p_g" << g.id << ",u_g" << g.id;
        for (const auto& s : ctx.full_system.solar)
            out << ",p_s" << s.id << ",curt_s" << s.id;
        for (const auto& w : ctx.full_system.wind) out << ",p_w" << w.id << ",curt_w" << w.id;
        for (const auto& b : ctx.full_system.storage)
            out << ",ch_b" << b.id << ",dis_b" << b.id << ",soc_b" << b.id;
        for (const auto& l : ctx.full_system.lines) out << ",flow_l" << l.id;
        out << '\n';
        char buf[64];
        for (int t = 0; t < sol.hours; ++t) {
            std::snprintf(buf, sizeof(buf), "%d,%.4f,%.4f", t,
                          inputs.demand_sys[t] + load_adjustment, sol.shed_sys[t]);
            out << buf;
            for (std::size_t i = 0; i < ctx.full_system.thermal.size(); ++i) {
                std::snprintf(buf, sizeof(buf), ",%.4f,%d", sol.g_thermal[i][t],
                              sol.commit[i][t]);
                out << buf;
            }
            for (std::size_t s = 0; s < ctx.full_system.solar.size(); ++s) {
                std::snprintf(buf, sizeof(buf), ",%.4f,%.4f", sol.g_solar[s][t],
                              sol.curt_solar[s][t]);
                out << buf;
            }
            for (std::size_t w = 0; w < ctx.full_system.wind.size(); ++w) {
                std::snprintf(buf, sizeof(buf), ",%.4f,%.4f", sol.g_wind[w][t],
                              sol.curt_wind[w][t]);
                out << buf;
            }
            for (std::size_t b = 0; b < ctx.full_system.storage.size(); ++b) {
                std::snprintf(buf, sizeof(buf), ",%.4f,%.4f,%.6f", sol.ch[b][t], sol.dis[b][t],
                              sol.soc[b][t]);
                out << buf;
            }
            for (std::size_t l = 0; l < ctx.full_system.lines.size(); ++l) {
                std::snprintf(buf, sizeof(buf), ",%.4f", sol.flow[l][t]);
                out << buf;
            }
            out << '\n';
        }
        std::printf("objective: %.2f $, shed hours: %d, nodes: %ld, dispatch in %s\n",
                    sol.objective,
                    static_cast<int>(std::count_if(sol.shed_sys.begin(), sol.shed_sys.end(),
                                                   [&](double s) {
                                                       return s > config.shed_tolerance_mw;
                                                   })),
                    sol.nodes, path.c_str());
        if (!violations.empty()) {
            for (const auto& v : violations) std::cerr << "violation: " << v << '\n';
            throw SolverError("solution failed the independent feasibility check (" +
                              std::to_string(violations.size()) + " violations)");
        }
    });
}

int cmd_lole(const StudyConfig& config, double load_adjustment) {
    return guard([&] {
        StudyContext ctx = prepare_study(config);
        PtdfMatrix ptdf = build_ptdf(ctx.full_system);
        StudyOptions opts = study_options(config);
        const auto& scs = ctx.scenarios.scenarios;
        std::vector<std::vector<double>> shed(scs.size());
        std::vector<ScenarioInputs> inputs(scs.size());
        for (std::size_t i = 0; i < scs.size(); ++i)
            inputs[i] = make_scenario_inputs(ctx.full_system, scs[i]);
        parallel_for(scs.size(), opts.threads, [&](std::size_t i) {
            UcSolution sol = solve_rolling_horizon(ctx.full_system, ptdf, inputs[i],
                                                   load_adjustment, opts.costs, opts.solver);
            shed[i] = sol.shed_sys;
        });
        LolhResult res = compute_lolh_from_shed(shed, config.shed_tolerance_mw);
        std::filesystem::create_directories(config.out_dir);
        std::ofstream out(config.out_dir + "/lolh.csv");
        out << "scenario,shed_hours\n";
        for (std::size_t i = 0; i < res.shed_hours_per_scenario.size(); ++i)
            out << i << ',' << res.shed_hours_per_scenario[i] << '\n';
        std::printf("mean LOLH at LA=%.2f MW: %.6f hours/month over %zu scenarios\n",
                    load_adjustment, res.mean_lolh, scs.size());
    });
}

int cmd_accredit(const StudyConfig& config) {
    return guard([&] {
        StudyContext ctx = prepare_study(config);
        StudyOptions opts = study_options(config);
        if (opts.solver.mode == SolverOptions::Mode::ExportOnly)
            throw InputError("accredit requires the bundled solver (--solver bundled); "
                             "use export-lp to produce model files for an external solver");
        AccreditationEngine engine(ctx.portfolio, &ctx.scenarios, opts);
        AccreditationResult result = engine.run_delta_accreditation();
        std::vector<double> li = engine.run_last_in_marginal();

        std::filesystem::create_directories(config.out_dir);
        write_accreditation_result(result, li, config, config.out_dir + "/results.json");
        write_accreditation_csv(result, li, config.out_dir + "/results.csv");
        for (const auto& [key, la] : engine.cache())
            write_search_trace(la, config.out_dir + "/trace_" + trace_name(key) + ".csv");

        std::printf("PORT %.2f MW, PIE %.2f MW, delta %.4f (%ld searches, %ld solved)\n",
                    result.port, result.pie, result.delta, engine.searches_requested(),
                    engine.searches_performed());
        for (const auto& r : result.resources)
            std::printf("  %-4s FI %8.2f  LI %8.2f  ELCC %8.2f MW (%5.1f%% of %g MW)\n",
                        r.label.c_str(), r.fi, r.li, r.elcc,
                        r.nameplate_mw > 0 ? 100.0 * r.elcc / r.nameplate_mw : 0.0,
                        r.nameplate_mw);
        std::printf("results in %s\n", config.out_dir.c_str());
    });
}

int cmd_sensitivity(const StudyConfig& config, const std::string& parameter,
                    const std::vector<double>& values, const std::vector<int>& line_ids) {
    return guard([&] {
        if (parameter != "beta_tau" && parameter != "beta_hurr" &&
            parameter != "line_capacity_scale")
            throw InputError("unknown sweep parameter '" + parameter +
                             "' (beta_tau | beta_hurr | line_capacity_scale)");
        if (values.empty()) throw InputError("sensitivity sweep needs at least one value");

        StudyContext ctx = prepare_study(config);
        StudyOptions opts = study_options(config);
        std::vector<SensitivityRow> rows;

        // Baseline (for line sweeps the scale-1.0 reference) computed once.
        AccreditationEngine base_engine(ctx.portfolio, &ctx.scenarios, opts);
        AccreditationResult base = base_engine.run_delta_accreditation();

        for (double value : values) {
            AccreditationResult res;
            double added_mw = 0.0;
            if (parameter == "line_capacity_scale") {
                if (value == 1.0) {
                    res = base;  // identity: reuse the cached base accreditation
                } else {
                    PortfolioSpec sweep = ctx.portfolio;
                    for (auto& ln : sweep.base.lines) {
                        bool chosen = line_ids.empty() ||
                                      std::find(line_ids.begin(), line_ids.end(), ln.id) !=
                                          line_ids.end();
                        if (chosen) {
                            added_mw += (value - 1.0) * ln.capacity;
                            ln.capacity *= value;
                        }
                    }
                    AccreditationEngine engine(sweep, &ctx.scenarios, opts);
                    res = engine.run_delta_accreditation();
                }
            } else {
                StudyConfig mod = config;
                if (parameter == "beta_tau")
                    mod.beta_tau_override = value;
                else
                    mod.beta_hurr_override = value;
                TrendModel trend = make_trend(mod, ctx.archive);
                ScenarioSet scen = sample_scenarios(ctx.archive, trend, config.month,
                                                    config.eval_year, config.scenario_count,
                                                    config.master_seed);
                AccreditationEngine engine(ctx.portfolio, &scen, opts);
                res = engine.run_delta_accreditation();
            }

            for (const auto& r : res.resources) {
                SensitivityRow row;
                row.parameter = parameter;
                row.value = value;
                row.resource = r.label;
                row.elcc_mw = r.elcc;
                row.port_mw = res.port;
                rows.push_back(row);
            }
            SensitivityRow port_row;
            port_row.parameter = parameter;
            port_row.value = value;
            port_row.resource = "PORT";
            port_row.elcc_mw = res.port;
            port_row.port_mw = res.port;
            if (parameter == "line_capacity_scale" && added_mw > 0.0) {
                port_row.has_roc = true;
                port_row.roc_pct = 100.0 * (res.port - base.port) / added_mw;
            }
            rows.push_back(port_row);
        }

        std::filesystem::create_directories(config.out_dir);
        write_sensitivity_csv(rows, config.out_dir + "/sensitivity.csv");
        std::printf("%zu sweep rows written to %s/sensitivity.csv\n", rows.size(),
                    config.out_dir.c_str());
    });
}

int cmd_make_fixture(const FixtureSpec& spec, const std::string& out_dir) {
    return guard([&] {
        FixtureBundle bundle = make_fixture(spec);
        write_fixture_files(bundle, out_dir);
        std::printf("fixture written to %s (%zu buses, %zu lines, %zu thermal, %d archive "
                    "years)\n",
                    out_dir.c_str(), bundle.system.buses.size(), bundle.system.lines.size(),
                    bundle.system.thermal.size(), spec.archive_years);
    });
}

int cmd_export_lp(const StudyConfig& config, int scenario_index, int window_index,
                  double load_adjustment, const std::string& out_path) {
    return guard([&] {
        StudyContext ctx = prepare_study(config);
        if (scenario_index < 0 ||
            scenario_index >= static_cast<int>(ctx.scenarios.scenarios.size()))
            throw InputError("scenario index out of range");
        const auto& sc = ctx.scenarios.scenarios[scenario_index];
        PtdfMatrix ptdf = build_ptdf(ctx.full_system);
        ScenarioInputs inputs = make_scenario_inputs(ctx.full_system, sc);

        int t0 = window_index * 144;
        if (t0 >= inputs.hours) throw InputError("window index beyond the scenario month");
        int hours = std::min(168, inputs.hours - t0);

        int hist = 1;
        for (const auto& g : ctx.full_system.thermal)
            hist = std::max({hist, g.min_up_time, g.min_down_time});
        std::vector<std::vector<int>> history(ctx.full_system.thermal.size(),
                                              std::vector<int>(hist, 0));
        std::vector<double> soc0;
        for (const auto& b : ctx.full_system.storage) soc0.push_back(b.initial_soc);

        UcWindow window = make_uc_window(ctx.full_system, inputs, load_adjustment, t0, hours,
                                         history, soc0);
        StudyOptions opts = study_options(config);
        MilpModel model = build_uc_model(ctx.full_system, ptdf, window, opts.costs, nullptr);
        export_model(model, out_path);
        std::printf("window %d (hours %d..%d) exported to %s: %zu variables, %zu rows\n",
                    window_index, t0, t0 + hours - 1, out_path.c_str(), model.var_count(),
                    model.row_count());
    });
}

}  // namespace gridcred
