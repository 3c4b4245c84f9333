#include "imexglm/convergence.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace imexglm {

MethodRef resolve_method(const std::string& name) {
  MethodRef out;
  out.name = name;
  if (name == "dirk232") {
    out.rk = dirk232();
    out.is_rk = true;
    return out;
  }
  if (name == "dirk343") {
    out.rk = dirk343();
    out.is_rk = true;
    return out;
  }
  for (const auto& p : catalog()) {
    if (p.name == name) {
      out.pair = &p;
      return out;
    }
  }
  std::string msg = "unknown method '" + name + "'; available:";
  for (const auto& n : method_names()) msg += " " + n;
  throw std::out_of_range(msg);
}

std::vector<std::string> method_names() {
  std::vector<std::string> out;
  for (const auto& p : catalog()) out.push_back(p.name);
  out.push_back("dirk232");
  out.push_back("dirk343");
  return out;
}

double least_squares_order(const std::vector<ConvergenceLevel>& levels) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& level : levels) {
    if (level.failed || !(level.error > 0.0)) continue;
    const double x = std::log(level.h);
    const double y = std::log(level.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void compute_orders(ConvergenceReport& report) {
  const ConvergenceLevel* prev = nullptr;
  for (auto& level : report.levels) {
    level.pairwise_order = std::numeric_limits<double>::quiet_NaN();
    // normalized by the actual step ratio, so a skipped level in between
    // still yields an order estimate
    if (!level.failed && prev && !prev->failed && prev->error > 0.0 && level.error > 0.0)
      level.pairwise_order =
          std::log(prev->error / level.error) / std::log(prev->h / level.h);
    if (!level.failed) prev = &level;
  }
  report.lsq_order = least_squares_order(report.levels);
}

ConvergenceReport run_convergence(const MethodRef& method, const SplitProblem& prob,
                                  double h0, int levels, const ConvergenceOptions& opts) {
  if (levels < 3) throw std::invalid_argument("run_convergence: at least 3 levels");
  ConvergenceReport report;
  report.method = method.name;
  report.problem = prob.name;

  // reference: exact solution when the problem has one, otherwise tiny-step
  // integration with the most accurate cataloged implicit member
  Vec ref;
  if (prob.exact) {
    ref = prob.exact(prob.tF);
  } else {
    const double h_min = h0 / std::pow(2.0, levels - 1);
    ref = reference_solution(find_pair("3B"), prob, h_min * opts.h_ref_factor,
                             opts.cache_dir);
  }
  const auto norm = prob.error_norm ? prob.error_norm
                                    : std::function<double(const Vec&, const Vec&)>(
                                          default_error_norm);

  for (int k = 0; k < levels; ++k) {
    ConvergenceLevel level;
    level.h = h0 / std::pow(2.0, k);
    const auto tick = std::chrono::steady_clock::now();
    try {
      Vec terminal;
      if (method.is_rk) {
        terminal = imex_rk_integrate(method.rk, prob, level.h, opts.newton);
      } else {
        const IntegrationState start =
            (opts.start == StartPolicy::analytic)
                ? start_analytic(*method.pair, prob, level.h)
                : start_imex_rk(*method.pair, prob, level.h, opts.tau_factor * level.h,
                                opts.newton);
        terminal =
            integrate(*method.pair, prob, level.h, start, true, opts.newton).point_solution;
      }
      level.error = norm(terminal, ref);
    } catch (const std::exception& e) {
      level.failed = true;
      level.message = e.what();
    }
    level.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tick).count();
    report.levels.push_back(std::move(level));
  }
  compute_orders(report);
  return report;
}

void emit_csv(const ConvergenceReport& report, std::ostream& os) {
  os << "h,error,pairwise_order\n";
  for (const auto& level : report.levels) {
    os << format_double(level.h) << ",";
    if (level.failed)
      os << ",";
    else {
      os << format_double(level.error) << ",";
      if (!std::isnan(level.pairwise_order)) os << format_double(level.pairwise_order);
    }
    os << "\n";
  }
}

void emit_json(const ConvergenceReport& report, std::ostream& os) {
  os << "{\"method\":\"" << report.method << "\",\"problem\":\"" << report.problem
     << "\",\"levels\":[";
  for (size_t i = 0; i < report.levels.size(); ++i) {
    const auto& level = report.levels[i];
    os << (i ? "," : "") << "{\"h\":" << format_double(level.h);
    if (level.failed) {
      os << ",\"failed\":true,\"message\":" << nlohmann::json(level.message).dump();
    } else {
      os << ",\"error\":" << format_double(level.error);
      os << ",\"pairwise_order\":";
      if (std::isnan(level.pairwise_order))
        os << "null";
      else
        os << format_double(level.pairwise_order);
    }
    os << ",\"wall_seconds\":" << format_double(level.wall_seconds) << "}";
  }
  os << "],\"least_squares_order\":";
  if (std::isnan(report.lsq_order))
    os << "null";
  else
    os << format_double(report.lsq_order);
  os << "}";
}

ConvergenceReport report_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ConvergenceReport report;
  report.method = j.at("method").get<std::string>();
  report.problem = j.at("problem").get<std::string>();
  for (const auto& jl : j.at("levels")) {
    ConvergenceLevel level;
    level.h = jl.at("h").get<double>();
    if (jl.value("failed", false)) {
      level.failed = true;
      level.message = jl.value("message", "");
    } else {
      level.error = jl.at("error").get<double>();
      if (!jl.at("pairwise_order").is_null())
        level.pairwise_order = jl.at("pairwise_order").get<double>();
    }
    level.wall_seconds = jl.value("wall_seconds", 0.0);
    report.levels.push_back(std::move(level));
  }
  if (!j.at("least_squares_order").is_null())
    report.lsq_order = j.at("least_squares_order").get<double>();
  return report;
}

void emit_report(const ConvergenceReport& report, const std::string& format,
                 const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open report output '" + path + "'");
  if (format == "csv")
    emit_csv(report, os);
  else if (format == "json")
    emit_json(report, os);
  else
    throw std::invalid_argument("emit_report: format must be csv or json");
  if (!os) throw std::runtime_error("write failure on report output '" + path + "'");
}

}  // namespace imexglm
