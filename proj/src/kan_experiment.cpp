#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "json.hpp"
#include "rwt/error.hpp"
#include "rwt/eval_report.hpp"
#include "rwt/kan.hpp"
#include "rwt/parallel.hpp"
#include "rwt/rng.hpp"

namespace rwt {

namespace {

double r2_or_nan(std::span<const double> truth, std::span<const double> pred) {
  return metrics(truth, pred).r2.value_or(NAN);
}

}  // namespace

std::vector<IncrementalRecord> incremental_experiment(const Matrix& x_train,
                                                      std::span<const double> y_train,
                                                      const Matrix& x_test,
                                                      std::span<const double> y_test,
                                                      const IncrementalConfig& config) {
  if (x_train.rows == 0 || x_test.rows == 0 || x_train.rows != y_train.size() ||
      x_test.rows != y_test.size()) {
    throw Error(ErrorCode::kEmptyData, "incremental experiment needs train and test rows");
  }
  if (x_train.cols != x_test.cols) {
    throw Error(ErrorCode::kDimensionMismatch, "train and test widths differ");
  }
  std::set<int> seen;
  for (int idx : config.ordering) {
    if (idx < 1 || static_cast<std::size_t>(idx) > x_train.cols || !seen.insert(idx).second) {
      throw Error(ErrorCode::kInvalidParam, "ordering must list distinct columns 1..cols");
    }
  }
  if (config.ordering.empty() || config.seeds.empty()) {
    throw Error(ErrorCode::kInvalidParam, "ordering and seeds must be nonempty");
  }

  const std::size_t steps = config.ordering.size();
  const std::size_t n_seeds = config.seeds.size();
  std::vector<IncrementalRecord> records(steps * n_seeds);
  const std::size_t snap_rows = std::min(config.snap_rows, x_train.rows);
  parallel_for(
      records.size(),
      [&](std::size_t job) {
        const std::size_t n_inputs = job / n_seeds + 1;
        const std::uint64_t seed = config.seeds[job % n_seeds];
        std::vector<std::size_t> columns;
        std::vector<int> vars(config.ordering.begin(),
                              config.ordering.begin() + static_cast<std::ptrdiff_t>(n_inputs));
        for (int v : vars) columns.push_back(static_cast<std::size_t>(v - 1));
        const Matrix tr = x_train.select_columns(columns);
        const Matrix te = x_test.select_columns(columns);

        const auto layout = kan_regime_layout(config.regime, n_inputs);
        KanNetwork net = kan_init(layout, config.grid_size, derive_seed(seed, n_inputs));
        net = kan_train(std::move(net), tr, y_train, config.train).net;

        IncrementalRecord& rec = records[job];
        rec.n_inputs = n_inputs;
        rec.regime = config.regime;
        rec.seed = seed;
        rec.r2_train = r2_or_nan(y_train, net.predict_rows(tr));
        rec.r2_test = r2_or_nan(y_test, net.predict_rows(te));

        std::vector<std::size_t> head(snap_rows);
        for (std::size_t i = 0; i < snap_rows; ++i) head[i] = i;
        rec.snap = kan_snap(net, SnapLibrary::for_regime(config.regime), tr.select_rows(head),
                            vars);
        rec.expression_text = to_string(rec.snap.expression);
        std::vector<double> sym(te.rows);
        try {
          for (std::size_t i = 0; i < te.rows; ++i) {
            sym[i] = evaluate_mapped(rec.snap.expression, te.row(i), vars);
          }
          rec.r2_test_symbolic = r2_or_nan(y_test, sym);
        } catch (const Error&) {
          rec.r2_test_symbolic = NAN;
        }
      },
      config.max_threads);
  return records;
}

void write_incremental_jsonl(std::ostream& out, std::span<const IncrementalRecord> records) {
  using nlohmann::ordered_json;
  const auto num = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(); };
  for (const IncrementalRecord& r : records) {
    ordered_json edges = ordered_json::array();
    for (const EdgeSnap& e : r.snap.edges) {
      edges.push_back({{"layer", e.layer},
                       {"in", e.in},
                       {"out", e.out},
                       {"range", {e.lo, e.hi}},
                       {"family", std::string(to_string(e.family))},
                       {"r2", num(e.r2)},
                       {"failed", e.failed},
                       {"formula", e.formula}});
    }
    ordered_json rec = {{"n_inputs", r.n_inputs},
                        {"regime", std::string(to_string(r.regime))},
                        {"seed", r.seed},
                        {"r2_train", num(r.r2_train)},
                        {"r2_test", num(r.r2_test)},
                        {"r2_test_symbolic", num(r.r2_test_symbolic)},
                        {"expression_text", r.expression_text},
                        {"snap_tolerance", num(r.snap.tolerance)},
                        {"edge_report", edges},
                        {"warnings", r.snap.warnings}};
    out << rec.dump() << '\n';
  }
}

}  // namespace rwt
