#include "iterblue/iterblue.h"

#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "iterblue/config.hpp"
#include "iterblue/report.hpp"
#include "iterblue/simulate.hpp"

using namespace iterblue;

struct ib_config {
  SweepConfig cfg;
  std::string serialized;  // backing store for ib_config_to_string
};

struct ib_report {
  MseReport report;
};

struct ib_trace {
  EstimateTrace trace;
  std::vector<std::pair<std::string, std::string>> meta;
};

namespace {

thread_local std::string g_last_error;

ib_status set_error(ib_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
ib_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return IB_OK;
  } catch (const DivergenceError& e) {
    return set_error(IB_ERR_DIVERGENCE, e.what());
  } catch (const IterationError& e) {
    return set_error(IB_ERR_CONTRACT, e.what());
  } catch (const ParseError& e) {
    return set_error(IB_ERR_PARSE, e.what());
  } catch (const DimensionError& e) {
    return set_error(IB_ERR_DIMENSION, e.what());
  } catch (const RankError& e) {
    return set_error(IB_ERR_RANK, e.what());
  } catch (const ContractError& e) {
    return set_error(IB_ERR_CONTRACT, e.what());
  } catch (const IoError& e) {
    return set_error(IB_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return set_error(IB_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(IB_ERR_INTERNAL, "unknown error");
  }
}

ib_status require(bool ok, const char* message) {
  return ok ? IB_OK : set_error(IB_ERR_INVALID_ARGUMENT, message);
}

Matrix matrix_from(std::size_t rows, std::size_t cols, const double* data) {
  return Matrix::from(rows, cols,
                      std::vector<double>(data, data + rows * cols));
}

Vector vector_from(std::size_t len, const double* data) {
  return Vector::from(std::vector<double>(data, data + len));
}

std::vector<std::pair<std::string, std::string>> run_meta(
    const SweepConfig& cfg, const char* command) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("command", command);
  for (auto& kv : config_meta(cfg)) meta.push_back(std::move(kv));
  return meta;
}

ib_status write_csv(const char* path, const char* what,
                    const std::function<void(std::ostream&)>& writer) {
  return guard([&] {
    if (path == nullptr) {
      writer(std::cout);
      return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError(std::string(what) + ": cannot open " + path);
    }
    writer(out);
    if (!out.good()) {
      throw IoError(std::string(what) + ": write failed for " + path);
    }
  });
}

}  // namespace

extern "C" {

const char* ib_version(void) { return "0.1.0"; }

const char* ib_last_error(void) { return g_last_error.c_str(); }

ib_status ib_config_default(ib_config** out) {
  if (ib_status s = require(out != nullptr, "ib_config_default: out is null"))
    return s;
  return guard([&] { *out = new ib_config{parse_config(""), {}}; });
}

ib_status ib_config_parse(const char* text, ib_config** out) {
  if (ib_status s = require(text != nullptr && out != nullptr,
                            "ib_config_parse: null argument"))
    return s;
  return guard([&] { *out = new ib_config{parse_config(text), {}}; });
}

ib_status ib_config_load(const char* path, ib_config** out) {
  if (ib_status s = require(path != nullptr && out != nullptr,
                            "ib_config_load: null argument"))
    return s;
  return guard([&] { *out = new ib_config{parse_config_file(path), {}}; });
}

ib_status ib_config_set_u64(ib_config* cfg, const char* key, uint64_t value) {
  if (ib_status s = require(cfg != nullptr && key != nullptr,
                            "ib_config_set_u64: null argument"))
    return s;
  return guard([&] {
    const std::string k = key;
    if (k == "trials") {
      if (value == 0) throw ContractError("trials must be >= 1");
      cfg->cfg.trials = value;
    } else if (k == "seed") {
      cfg->cfg.base.seed = value;
    } else if (k == "n_iter") {
      cfg->cfg.n_iter = value;
    } else {
      throw ContractError("ib_config_set_u64: unknown key '" + k + "'");
    }
  });
}

ib_status ib_config_set_f64(ib_config* cfg, const char* key, double value) {
  if (ib_status s = require(cfg != nullptr && key != nullptr,
                            "ib_config_set_f64: null argument"))
    return s;
  return guard([&] {
    const std::string k = key;
    if (k == "sigma_n_sq") {
      if (!(value >= 0.0)) throw ContractError("sigma_n_sq must be >= 0");
      cfg->cfg.base.sigma_n_sq = value;
    } else if (k == "stop_tol") {
      if (!(value >= 0.0)) throw ContractError("stop_tol must be >= 0");
      cfg->cfg.stop_tol = value;
    } else {
      throw ContractError("ib_config_set_f64: unknown key '" + k + "'");
    }
  });
}

const char* ib_config_to_string(ib_config* cfg) {
  if (cfg == nullptr) return "";
  cfg->serialized = serialize_config(cfg->cfg);
  return cfg->serialized.c_str();
}

void ib_config_free(ib_config* cfg) { delete cfg; }

ib_status ib_run_sweep(const ib_config* cfg, int threads, ib_report** out) {
  if (ib_status s = require(cfg != nullptr && out != nullptr,
                            "ib_run_sweep: null argument"))
    return s;
  return guard([&] {
    MseReport report = mse_sweep(cfg->cfg, threads);
    report.meta = run_meta(cfg->cfg, "sweep");
    *out = new ib_report{std::move(report)};
  });
}

ib_status ib_run_converge(const ib_config* cfg, int threads, ib_report** out) {
  if (ib_status s = require(cfg != nullptr && out != nullptr,
                            "ib_run_converge: null argument"))
    return s;
  return guard([&] {
    SweepConfig conv = cfg->cfg;
    conv.sigma_grid = {conv.base.sigma_n_sq};
    MseReport report = convergence_curve(conv, threads);
    report.meta = run_meta(conv, "converge");
    *out = new ib_report{std::move(report)};
  });
}

ib_status ib_run_estimate(const ib_config* cfg, ib_trace** out) {
  if (ib_status s = require(cfg != nullptr && out != nullptr,
                            "ib_run_estimate: null argument"))
    return s;
  return guard([&] {
    ScenarioConfig scen = cfg->cfg.base;
    const Scenario scenario = gen_scenario(scen);
    const IterationConfig iter_cfg{cfg->cfg.n_iter, cfg->cfg.stop_tol};
    EstimateTrace trace = iterative_blue(scenario.problem, iter_cfg);
    *out = new ib_trace{std::move(trace), run_meta(cfg->cfg, "estimate")};
  });
}

size_t ib_report_rows(const ib_report* report) {
  return report == nullptr ? 0 : report->report.cells.size();
}

ib_status ib_report_get_row(const ib_report* report, size_t index,
                        ib_report_row* out) {
  if (ib_status s = require(report != nullptr && out != nullptr,
                            "ib_report_row: null argument"))
    return s;
  if (ib_status s = require(index < report->report.cells.size(),
                            "ib_report_row: index out of range"))
    return s;
  const MseCell& cell = report->report.cells[index];
  out->estimator = cell.estimator.c_str();
  out->key = cell.key;
  out->mse = cell.mse;
  out->mc_stderr = cell.mc_stderr;
  out->trials = cell.trials;
  out->divergent = cell.divergent;
  return IB_OK;
}

double ib_report_divergence_rate(const ib_report* report) {
  return report == nullptr ? 0.0 : report->report.divergence_rate();
}

ib_status ib_report_write_csv(const ib_report* report, const char* path,
                              int deterministic) {
  if (ib_status s =
          require(report != nullptr, "ib_report_write_csv: report is null"))
    return s;
  return write_csv(path, "ib_report_write_csv", [&](std::ostream& sink) {
    emit_report(report->report, sink, deterministic != 0);
  });
}

void ib_report_free(ib_report* report) { delete report; }

size_t ib_trace_len(const ib_trace* trace) {
  return trace == nullptr ? 0 : trace->trace.estimates.size();
}

size_t ib_trace_dim(const ib_trace* trace) {
  if (trace == nullptr || trace->trace.estimates.empty()) return 0;
  return trace->trace.estimates.front().size();
}

int ib_trace_stopped_early(const ib_trace* trace) {
  return trace != nullptr && trace->trace.stopped_early ? 1 : 0;
}

ib_status ib_trace_get(const ib_trace* trace, size_t iteration, double* out,
                       size_t cap) {
  if (ib_status s = require(trace != nullptr && out != nullptr,
                            "ib_trace_get: null argument"))
    return s;
  if (ib_status s = require(iteration < trace->trace.estimates.size(),
                            "ib_trace_get: iteration out of range"))
    return s;
  const Vector& est = trace->trace.estimates[iteration];
  if (ib_status s = require(cap >= est.size(), "ib_trace_get: buffer too small"))
    return s;
  std::memcpy(out, est.entries().data(), est.size() * sizeof(double));
  return IB_OK;
}

ib_status ib_trace_write_csv(const ib_trace* trace, const char* path,
                             int deterministic) {
  if (ib_status s =
          require(trace != nullptr, "ib_trace_write_csv: trace is null"))
    return s;
  return write_csv(path, "ib_trace_write_csv", [&](std::ostream& sink) {
    emit_trace(trace->trace, trace->meta, sink, deterministic != 0);
  });
}

void ib_trace_free(ib_trace* trace) { delete trace; }

ib_status ib_ls(size_t rows, size_t cols, const double* h, const double* y,
                double* x_out) {
  if (ib_status s = require(h != nullptr && y != nullptr && x_out != nullptr &&
                                rows > 0 && cols > 0,
                            "ib_ls: null/empty argument"))
    return s;
  return guard([&] {
    const Vector x = ls_estimate(matrix_from(rows, cols, h),
                                 vector_from(rows, y));
    std::memcpy(x_out, x.entries().data(), cols * sizeof(double));
  });
}

ib_status ib_blue(size_t rows, size_t cols, const double* h, const double* c,
                  const double* y, double* x_out) {
  if (ib_status s = require(h != nullptr && c != nullptr && y != nullptr &&
                                x_out != nullptr && rows > 0 && cols > 0,
                            "ib_blue: null/empty argument"))
    return s;
  return guard([&] {
    const Vector x = blue(matrix_from(rows, cols, h),
                          matrix_from(rows, rows, c), vector_from(rows, y));
    std::memcpy(x_out, x.entries().data(), cols * sizeof(double));
  });
}

ib_status ib_iterative_unstructured(size_t rows, size_t cols, const double* y,
                                    const double* h_hat, const double* c_nn,
                                    const double* v, uint64_t n_iter,
                                    double stop_tol, ib_trace** out) {
  if (ib_status s = require(y != nullptr && h_hat != nullptr &&
                                c_nn != nullptr && v != nullptr &&
                                out != nullptr && rows > 0 && cols > 0,
                            "ib_iterative_unstructured: null/empty argument"))
    return s;
  return guard([&] {
    LinearProblem problem(vector_from(rows, y), matrix_from(rows, cols, h_hat),
                          matrix_from(rows, rows, c_nn),
                          Unstructured(matrix_from(rows, cols, v)));
    EstimateTrace trace =
        iterative_blue(problem, IterationConfig{n_iter, stop_tol});
    *out = new ib_trace{std::move(trace), {{"command", "estimate"}}};
  });
}

ib_status ib_iterative_convolution(size_t n_h, size_t n_x, const double* y,
                                   const double* h_hat, const double* c_nn,
                                   const double* c_ee, uint64_t n_iter,
                                   double stop_tol, ib_trace** out) {
  if (ib_status s = require(y != nullptr && h_hat != nullptr &&
                                c_nn != nullptr && c_ee != nullptr &&
                                out != nullptr && n_h > 0 && n_x > 0,
                            "ib_iterative_convolution: null/empty argument"))
    return s;
  return guard([&] {
    const size_t n_y = n_h + n_x - 1;
    LinearProblem problem(vector_from(n_y, y),
                          conv_matrix(vector_from(n_h, h_hat), n_x),
                          matrix_from(n_y, n_y, c_nn),
                          Convolution(matrix_from(n_h, n_h, c_ee), n_x));
    EstimateTrace trace =
        iterative_blue(problem, IterationConfig{n_iter, stop_tol});
    *out = new ib_trace{std::move(trace), {{"command", "estimate"}}};
  });
}

}  // extern "C"
