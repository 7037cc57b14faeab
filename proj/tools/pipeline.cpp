#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "delayopt/table_match.hpp"
#include "json.hpp"
#include "logging.hpp"
#include "render.hpp"

namespace delayopt::cli {

namespace {

// Evaluated-table comparisons accept this absolute deviation from the quoted
// value; the quoted tables carry 3 decimals, so this is one print unit.
constexpr double kEvaluatedTol = 1e-3;
// A declared known discrepancy must reproduce the live computation this
// closely, or it is reported as a plain mismatch.
constexpr double kDeclaredTol = 1e-9;

bool same_h(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmtg(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

ProfileTable quantize(const ProfileTable& table, int decimals) {
    ProfileTable out = table;
    for (ProfileRow& row : out.rows) {
        row.tau = round_decimals(row.tau, decimals);
    }
    return out;
}

const KnownDiscrepancy* find_declared(const Scenario& scenario, const std::string& stage,
                                      double h) {
    if (!scenario.reference) return nullptr;
    for (const KnownDiscrepancy& kd : scenario.reference->known_discrepancies) {
        if (kd.stage == stage && same_h(kd.h, h)) return &kd;
    }
    return nullptr;
}

// Classify one table cell against its quoted value. `close` is the stage's
// match predicate; a failed match can still be a declared discrepancy when
// the declaration reproduces the live computation.
Comparison classify(const Scenario& scenario, Stage stage, const std::string& stage_name,
                    const std::string& subject, double h, double computed, double published,
                    bool close) {
    Comparison cmp;
    cmp.stage = stage;
    cmp.subject = subject;
    cmp.computed = computed;
    cmp.published = published;
    if (close) {
        cmp.kind = MatchKind::match;
        return cmp;
    }
    if (const KnownDiscrepancy* kd = find_declared(scenario, stage_name, h)) {
        if (std::abs(computed - kd->computed) <= kDeclaredTol) {
            cmp.kind = MatchKind::known_discrepancy;
            cmp.note = kd->note;
            return cmp;
        }
        cmp.kind = MatchKind::mismatch;
        cmp.note = "declared known discrepancy expects " + fmtg(kd->computed) +
                   " but the computation gives " + fmtg(computed);
        return cmp;
    }
    cmp.kind = MatchKind::mismatch;
    return cmp;
}

void require_reference_length(std::size_t got, std::size_t rows, const char* what) {
    if (got != rows) {
        fail(errc::bad_input, std::string("scenario reference: ") + what + " lists " +
                                  std::to_string(got) + " values for " + std::to_string(rows) +
                                  " profile rows");
    }
}

}  // namespace

std::optional<Stage> stage_from(const std::string& name) {
    if (name == "profile") return Stage::profile;
    if (name == "correct") return Stage::correct;
    if (name == "fit") return Stage::fit;
    if (name == "optimize") return Stage::optimize;
    if (name == "evaluate") return Stage::evaluate;
    if (name == "plot") return Stage::plot;
    return std::nullopt;
}

const char* to_string(Stage stage) {
    switch (stage) {
        case Stage::profile: return "profile";
        case Stage::correct: return "correct";
        case Stage::fit: return "fit";
        case Stage::optimize: return "optimize";
        case Stage::evaluate: return "evaluate";
        case Stage::plot: return "plot";
    }
    return "?";
}

PipelineResult run_pipeline(const Scenario& scenario, const PipelineOptions& options) {
    require_profile_source(scenario);

    PipelineResult result;
    result.scenario = scenario;
    result.precision = scenario.table_precision.value_or(3);
    result.last_stage = options.through;
    const Reference* ref =
        (options.compare && scenario.reference) ? &*scenario.reference : nullptr;

    // ---- profile ----
    log(LogLevel::info, "stage profile: building the delay profile");
    if (!scenario.samples.empty()) {
        result.raw = build_profile(scenario.gains, scenario.samples, &result.warnings);
    } else {
        result.raw = load_profile_csv(scenario.profile_csv);
        result.raw.gains = scenario.gains;
    }
    if (result.raw.rows.empty()) {
        fail(errc::bad_input, "scenario '" + scenario.name + "' yields an empty profile");
    }
    for (const ProfileRow& row : result.raw.rows) {
        log(LogLevel::debug,
            "profile row h=" + fmt17(row.h) + " tau=" + fmt17(row.tau));
    }
    result.working =
        scenario.table_precision ? quantize(result.raw, *scenario.table_precision) : result.raw;

    if (ref && !ref->profile_tau.empty()) {
        require_reference_length(ref->profile_tau.size(), result.raw.rows.size(), "profile_tau");
        for (std::size_t i = 0; i < result.raw.rows.size(); ++i) {
            const double computed = result.raw.rows[i].tau;
            const double quoted = ref->profile_tau[i];
            const bool close = within_print_precision(computed, quoted, result.precision);
            result.comparisons.push_back(classify(scenario, Stage::profile, "profile",
                                                  "h=" + fmtg(result.raw.rows[i].h),
                                                  result.raw.rows[i].h, computed, quoted,
                                                  close));
        }
    }
    if (options.through == Stage::profile) return result;

    // ---- correct ----
    log(LogLevel::info, "stage correct: detecting and replacing irregular rows");
    result.flags = detect_irregular(result.working);
    std::map<double, double> overrides;
    for (const auto& [h, tau] : scenario.corrections) {
        overrides.emplace(h, tau);
    }
    result.corrected = correct_piecewise(result.working, result.flags, overrides);

    const auto flagged_has = [&](double h) {
        return std::any_of(result.flags.begin(), result.flags.end(), [&](int i) {
            return same_h(result.working.rows[static_cast<std::size_t>(i)].h, h);
        });
    };
    for (int i : result.flags) {
        const std::size_t idx = static_cast<std::size_t>(i);
        CorrectionDetail detail;
        detail.index = i;
        detail.h = result.working.rows[idx].h;
        detail.original = result.working.rows[idx].tau;
        detail.applied = result.corrected.rows[idx].tau;
        detail.flagged = true;
        detail.from_override = result.corrected.rows[idx].source == RowSource::manual_override;
        try {
            detail.interpolation = neighbor_interpolation(result.working, i, result.flags);
        } catch (const error&) {
            detail.interpolation = std::nullopt;  // no two-sided neighborhood
        }
        result.corrections.push_back(detail);
    }
    // explicit corrections for rows the detector did not flag
    for (const auto& [h, tau] : scenario.corrections) {
        if (flagged_has(h)) continue;
        const auto it = std::find_if(result.corrected.rows.begin(), result.corrected.rows.end(),
                                     [&](const ProfileRow& row) { return same_h(row.h, h); });
        if (it == result.corrected.rows.end()) {
            fail(errc::bad_input,
                 "scenario correction h=" + fmtg(h) + " matches no profile row");
        }
        CorrectionDetail detail;
        detail.index = static_cast<int>(it - result.corrected.rows.begin());
        detail.h = it->h;
        detail.original = it->tau;
        it->tau = tau;
        it->corrected = true;
        it->source = RowSource::manual_override;
        detail.applied = tau;
        detail.flagged = false;
        detail.from_override = true;
        result.corrections.push_back(detail);
    }
    validate(result.corrected);

    if (ref && !ref->corrected_tau.empty()) {
        require_reference_length(ref->corrected_tau.size(), result.corrected.rows.size(),
                                 "corrected_tau");
        for (std::size_t i = 0; i < result.corrected.rows.size(); ++i) {
            const double computed = result.corrected.rows[i].tau;
            const double quoted = ref->corrected_tau[i];
            const bool close = rounds_to(computed, quoted, result.precision);
            result.comparisons.push_back(classify(scenario, Stage::correct, "correct",
                                                  "h=" + fmtg(result.corrected.rows[i].h),
                                                  result.corrected.rows[i].h, computed, quoted,
                                                  close));
        }
    }
    if (options.through == Stage::correct) return result;

    // ---- fit ----
    log(LogLevel::info, "stage fit: least-squares quadratic on the corrected table");
    std::vector<std::pair<double, double>> points;
    for (const ProfileRow& row : result.corrected.rows) {
        points.push_back({row.h, row.tau});
    }
    result.fit = fit_quadratic(points);
    if (scenario.reference && scenario.reference->coefficients) {
        const CoefficientRef& cr = *scenario.reference->coefficients;
        QuadraticModel pm;
        pm.a = cr.a;
        pm.b = cr.b;
        pm.c = cr.c;
        pm.n_points = result.fit.n_points;
        double sse = 0.0;
        for (const auto& [h, tau] : points) {
            const double r = evaluate_model(pm, h) - tau;
            sse += r * r;
        }
        pm.sse = sse;
        result.published_model = pm;
        for (const std::string& note : cr.notes) {
            result.warnings.push_back({"coefficient_note", note});
        }
    }

    if (ref && ref->coefficients) {
        const CoefficientRef& cr = *ref->coefficients;
        const struct {
            const char* name;
            double computed, quoted;
            int decimals;
        } rows[] = {{"a", result.fit.a, cr.a, cr.a_decimals},
                    {"b", result.fit.b, cr.b, cr.b_decimals},
                    {"c", result.fit.c, cr.c, cr.c_decimals}};
        for (const auto& row : rows) {
            const bool close = within_print_precision(row.computed, row.quoted, row.decimals);
            result.comparisons.push_back(classify(scenario, Stage::fit, "fit", row.name, 0.0,
                                                  row.computed, row.quoted, close));
        }
    }
    if (options.through == Stage::fit) return result;

    // ---- optimize ----
    log(LogLevel::info, "stage optimize: locating the minimum of the fitted curve");
    result.optimum = vertex(result.fit);
    if (result.published_model) {
        try {
            result.optimum_published = vertex(*result.published_model);
        } catch (const error& e) {
            result.warnings.push_back({"published_model_no_minimum", e.what()});
        }
    }

    if (ref && ref->vertex) {
        const bool h_close = rounds_to(result.optimum->h_star, ref->vertex->h, result.precision);
        result.comparisons.push_back(classify(scenario, Stage::optimize, "optimize", "h_star",
                                              0.0, result.optimum->h_star, ref->vertex->h,
                                              h_close));
        const double tau_star = result.optimum_published ? result.optimum_published->tau_star
                                                         : result.optimum->tau_star;
        const bool t_close = rounds_to(tau_star, ref->vertex->tau, result.precision);
        result.comparisons.push_back(classify(scenario, Stage::optimize, "optimize", "tau_star",
                                              0.0, tau_star, ref->vertex->tau, t_close));
    }
    if (options.through == Stage::optimize) return result;

    // ---- evaluate ----
    log(LogLevel::info, "stage evaluate: sampling the models on the profile grid");
    for (const ProfileRow& row : result.corrected.rows) {
        result.evaluated_fit.push_back({row.h, evaluate_model(result.fit, row.h)});
        if (result.published_model) {
            result.evaluated_published.push_back(
                {row.h, evaluate_model(*result.published_model, row.h)});
        }
    }

    if (ref && !ref->evaluated_tau.empty()) {
        require_reference_length(ref->evaluated_tau.size(), result.corrected.rows.size(),
                                 "evaluated_tau");
        const auto& computed_series =
            result.evaluated_published.empty() ? result.evaluated_fit
                                               : result.evaluated_published;
        for (std::size_t i = 0; i < ref->evaluated_tau.size(); ++i) {
            if (!ref->evaluated_tau[i]) continue;  // row not quoted in the source table
            const double computed = computed_series[i].second;
            const double quoted = *ref->evaluated_tau[i];
            const bool close = std::abs(computed - quoted) <= kEvaluatedTol;
            result.comparisons.push_back(classify(scenario, Stage::evaluate, "evaluate",
                                                  "h=" + fmtg(computed_series[i].first),
                                                  computed_series[i].first, computed, quoted,
                                                  close));
        }
    }
    if (options.through == Stage::evaluate) return result;

    // ---- plot ----
    log(LogLevel::info, "stage plot: emitting series data");
    // nothing to compute: series are assembled from earlier artifacts on write
    return result;
}

int mismatch_count(const PipelineResult& result) {
    return static_cast<int>(
        std::count_if(result.comparisons.begin(), result.comparisons.end(),
                      [](const Comparison& c) { return c.kind == MatchKind::mismatch; }));
}

std::string format_report(const PipelineResult& result) {
    if (!result.optimum) {
        fail(errc::usage, "report requested before the optimize stage ran");
    }
    nlohmann::ordered_json j;
    j["a_exact"] = result.fit.a;
    j["b_exact"] = result.fit.b;
    j["c_exact"] = result.fit.c;
    if (result.published_model) {
        j["a_paper"] = result.published_model->a;
        j["b_paper"] = result.published_model->b;
        j["c_paper"] = result.published_model->c;
    } else {
        j["a_paper"] = nullptr;
        j["b_paper"] = nullptr;
        j["c_paper"] = nullptr;
    }
    j["h_star"] = result.optimum->h_star;
    j["tau_star_exact"] = result.optimum->tau_star;
    if (result.optimum_published) {
        j["tau_star_paper"] = result.optimum_published->tau_star;
    } else {
        j["tau_star_paper"] = nullptr;
    }
    j["sse"] = result.fit.sse;
    j["warnings"] = nlohmann::ordered_json::array();
    for (const Warning& w : result.warnings) {
        j["warnings"].push_back(w.code + ": " + w.message);
    }
    for (const Comparison& c : result.comparisons) {
        if (c.kind == MatchKind::known_discrepancy) {
            j["warnings"].push_back("known_discrepancy: " + std::string(to_string(c.stage)) +
                                    " " + c.subject + " computes " + fmtg(c.computed) +
                                    " where the reference quotes " + fmtg(c.published) + " — " +
                                    c.note);
        }
    }
    return j.dump(2) + "\n";
}

namespace {

void append_comparison_lines(std::ostringstream& out, const PipelineResult& result,
                             Stage stage, const char* label) {
    int match = 0, known = 0, mismatch = 0;
    for (const Comparison& c : result.comparisons) {
        if (c.stage != stage) continue;
        switch (c.kind) {
            case MatchKind::match: ++match; break;
            case MatchKind::known_discrepancy: ++known; break;
            case MatchKind::mismatch: ++mismatch; break;
        }
    }
    if (match + known + mismatch == 0) return;
    out << label << " vs reference: " << match << " match";
    if (known > 0) out << ", " << known << " known discrepancy";
    if (mismatch > 0) out << ", " << mismatch << " MISMATCH";
    out << '\n';
    for (const Comparison& c : result.comparisons) {
        if (c.stage != stage || c.kind == MatchKind::match) continue;
        out << "  " << c.subject << ": computed " << fmtg(c.computed) << ", reference quotes "
            << fmtg(c.published) << " — "
            << (c.kind == MatchKind::known_discrepancy ? "known discrepancy" : "MISMATCH");
        if (!c.note.empty()) out << ": " << c.note;
        out << '\n';
    }
}

}  // namespace

std::string format_console(const PipelineResult& result) {
    const std::string& name = result.scenario.name;
    const int p = result.precision;
    std::ostringstream out;

    out << "== " << name << " · profile ==\n";
    for (const std::string& note : result.scenario.notes) {
        out << "note: " << note << '\n';
    }
    out << format_profile_table(result.raw, p);
    append_comparison_lines(out, result, Stage::profile, "profile");
    if (result.last_stage < Stage::correct) return out.str();

    out << "\n== " << name << " · correct ==\n";
    if (result.flags.empty()) {
        out << "no irregular rows detected\n";
    } else {
        out << "flagged rows:";
        for (int i : result.flags) {
            out << " h=" << fmtg(result.working.rows[static_cast<std::size_t>(i)].h);
        }
        out << '\n';
    }
    for (const CorrectionDetail& d : result.corrections) {
        out << "  h=" << fmtg(d.h) << ": " << format_fixed(d.original, p) << " -> "
            << format_fixed(d.applied, p + 1);
        if (d.from_override) {
            out << " (override";
            if (!d.flagged) out << ", not flagged";
            if (d.interpolation) {
                out << "; two-sided interpolation gives " << format_fixed(*d.interpolation, p + 1);
            }
            out << ")";
        } else {
            out << " (two-sided interpolation)";
        }
        out << '\n';
    }
    out << format_profile_table(result.corrected, p);
    append_comparison_lines(out, result, Stage::correct, "corrected");
    if (result.last_stage < Stage::fit) return out.str();

    out << "\n== " << name << " · fit ==\n";
    out << "tau(h) = a + b h + c h^2, least squares over " << result.fit.n_points
        << " points\n";
    const auto coeff_line = [&](const char* coeff_name, double fitted,
                                std::optional<double> quoted) {
        out << "  " << coeff_name << " = " << fmtg(fitted);
        if (quoted) out << "  (quoted " << fmtg(*quoted) << ")";
        out << '\n';
    };
    const auto& pm = result.published_model;
    coeff_line("a", result.fit.a, pm ? std::optional<double>(pm->a) : std::nullopt);
    coeff_line("b", result.fit.b, pm ? std::optional<double>(pm->b) : std::nullopt);
    coeff_line("c", result.fit.c, pm ? std::optional<double>(pm->c) : std::nullopt);
    char ssebuf[32];
    std::snprintf(ssebuf, sizeof(ssebuf), "%.4e", result.fit.sse);
    out << "  sse = " << ssebuf << '\n';
    append_comparison_lines(out, result, Stage::fit, "coefficients");
    if (result.last_stage < Stage::optimize) return out.str();

    out << "\n== " << name << " · optimize ==\n";
    out << "fitted-curve minimum: h* = " << fmtg(result.optimum->h_star)
        << ", tau* = " << fmtg(result.optimum->tau_star) << '\n';
    if (result.optimum_published) {
        out << "quoted-coefficient minimum: h* = " << fmtg(result.optimum_published->h_star)
            << ", tau* = " << fmtg(result.optimum_published->tau_star) << '\n';
    }
    append_comparison_lines(out, result, Stage::optimize, "vertex");
    if (result.last_stage < Stage::evaluate) return out.str();

    out << "\n== " << name << " · evaluate ==\n";
    out << "       h    tau_fit";
    if (!result.evaluated_published.empty()) out << "  tau_quoted_model";
    out << '\n';
    for (std::size_t i = 0; i < result.evaluated_fit.size(); ++i) {
        const std::string htxt = format_fixed(result.evaluated_fit[i].first, p);
        const std::string ftxt = format_fixed(result.evaluated_fit[i].second, p);
        out << std::string(htxt.size() < 8 ? 8 - htxt.size() : 0, ' ') << htxt
            << std::string(ftxt.size() < 11 ? 11 - ftxt.size() : 0, ' ') << ftxt;
        if (!result.evaluated_published.empty()) {
            const std::string ptxt = format_fixed(result.evaluated_published[i].second, p);
            out << std::string(ptxt.size() < 18 ? 18 - ptxt.size() : 0, ' ') << ptxt;
        }
        out << '\n';
    }
    append_comparison_lines(out, result, Stage::evaluate, "evaluated");
    if (result.last_stage < Stage::plot) return out.str();

    out << "\n== " << name << " · plot ==\n";
    out << "series: " << result.raw.rows.size() << " raw points, 200-point fitted curve, "
        << result.corrected.rows.size() << " markers\n";
    return out.str();
}

void write_artifacts(const PipelineResult& result, const std::string& out_dir, bool svg) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        fail(errc::usage, "cannot create output directory '" + out_dir + "': " + ec.message());
    }
    const Scenario& sc = result.scenario;
    const auto path_for = [&](const std::string& suffix) {
        return (fs::path(out_dir) / (sc.name + suffix)).string();
    };

    if (wants_output(sc, "profile")) {
        save_profile_csv(result.raw, path_for("_profile.csv"));
        log(LogLevel::info, "wrote " + path_for("_profile.csv"));
    }
    if (result.last_stage < Stage::correct) return;

    if (wants_output(sc, "corrected")) {
        save_profile_csv(result.corrected, path_for("_corrected.csv"));
        log(LogLevel::info, "wrote " + path_for("_corrected.csv"));
    }
    if (result.last_stage < Stage::optimize) return;

    if (wants_output(sc, "fit") || wants_output(sc, "vertex")) {
        write_text_file(path_for("_report.json"), format_report(result));
        log(LogLevel::info, "wrote " + path_for("_report.json"));
    }
    if (result.last_stage < Stage::evaluate) return;

    if (wants_output(sc, "evaluated") && !result.evaluated_fit.empty()) {
        std::ostringstream csv;
        csv << "h,tau_fit,tau_published\n";
        for (std::size_t i = 0; i < result.evaluated_fit.size(); ++i) {
            csv << fmt17(result.evaluated_fit[i].first) << ','
                << fmt17(result.evaluated_fit[i].second) << ',';
            if (!result.evaluated_published.empty()) {
                csv << fmt17(result.evaluated_published[i].second);
            }
            csv << '\n';
        }
        write_text_file(path_for("_evaluated.csv"), csv.str());
        log(LogLevel::info, "wrote " + path_for("_evaluated.csv"));
    }
    if (result.last_stage < Stage::plot) return;

    if (wants_output(sc, "plot")) {
        PlotSeries series;
        for (const ProfileRow& row : result.raw.rows) {
            series.raw.push_back({row.h, row.tau});
        }
        const double hmin = result.corrected.rows.front().h;
        const double hmax = result.corrected.rows.back().h;
        for (int i = 0; i < 200; ++i) {
            const double h = hmin + (hmax - hmin) * i / 199.0;
            series.curve.push_back({h, evaluate_model(result.fit, h)});
        }
        for (const ProfileRow& row : result.corrected.rows) {
            series.markers.push_back({row.h, row.tau});
        }
        series.title = sc.name + ": delay against sampling period";

        write_text_file(path_for("_profile_series.csv"),
                        format_series_csv("h", "tau", series.raw));
        write_text_file(path_for("_fit_curve.csv"), format_series_csv("h", "tau", series.curve));
        write_text_file(path_for("_fit_markers.csv"),
                        format_series_csv("h", "tau", series.markers));
        log(LogLevel::info, "wrote plot series under " + out_dir);
        if (svg) {
            write_text_file(path_for("_plot.svg"), render_svg(series));
            log(LogLevel::info, "wrote " + path_for("_plot.svg"));
        }
    }
}

}  // namespace delayopt::cli
