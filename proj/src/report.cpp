#include "iterblue/report.hpp"

#include <chrono>
#include <ctime>

#include "iterblue/config.hpp"

namespace iterblue {

namespace {

void write_comment_block(
    const std::vector<std::pair<std::string, std::string>>& meta,
    std::ostream& sink, bool deterministic) {
  for (const auto& [key, value] : meta) {
    sink << "# " << key << " = " << value << "\n";
  }
  if (!deterministic) {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    sink << "# timestamp = " << buf << "\n";
  }
}

void require_good(const std::ostream& sink, const char* what) {
  if (!sink.good()) {
    throw IoError(std::string(what) + ": write failed");
  }
}

}  // namespace

void emit_report(const MseReport& report, std::ostream& sink,
                 bool deterministic) {
  write_comment_block(report.meta, sink, deterministic);
  sink << "estimator,sigma_n_sq_or_iter,mse,mc_stderr,trials,divergent\n";
  for (const MseCell& cell : report.cells) {
    sink << cell.estimator << ',' << format_double(cell.key) << ','
         << format_double(cell.mse) << ',' << format_double(cell.mc_stderr)
         << ',' << cell.trials << ',' << cell.divergent << "\n";
  }
  sink.flush();
  require_good(sink, "emit_report");
}

void emit_trace(const EstimateTrace& trace,
                const std::vector<std::pair<std::string, std::string>>& meta,
                std::ostream& sink, bool deterministic) {
  write_comment_block(meta, sink, deterministic);
  sink << "# stopped_early = " << (trace.stopped_early ? "true" : "false")
       << "\n";

  const std::size_t dim =
      trace.estimates.empty() ? 0 : trace.estimates.front().size();
  sink << "iter,rel_step";
  for (std::size_t j = 0; j < dim; ++j) sink << ",x_" << j;
  sink << "\n";
  for (std::size_t k = 0; k < trace.estimates.size(); ++k) {
    sink << k << ',';
    if (k > 0) sink << format_double(trace.step_norms[k - 1]);
    for (std::size_t j = 0; j < dim; ++j) {
      sink << ',' << format_double(trace.estimates[k][j]);
    }
    sink << "\n";
  }
  sink.flush();
  require_good(sink, "emit_trace");
}

}  // namespace iterblue
