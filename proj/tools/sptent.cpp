// Command line front end: compute, sweep, string-order, protocol, repinfo, selftest.

#include <CLI11.hpp>

#include "sptent/sptent.hpp"

using namespace sptent;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_prefix;
};

RunConfig load(const Common& c, std::vector<std::string> tasks = {}) {
  auto cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out_prefix.empty()) {
    cfg.out_csv = c.out_prefix + ".csv";
    cfg.out_json = c.out_prefix + ".json";
  }
  if (!tasks.empty()) cfg.tasks = std::move(tasks);
  if (!c.out_prefix.empty() && cfg.wants("string-table")) cfg.out_table = c.out_prefix + ".table.csv";
  return cfg;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("config", c.config, "JSON run configuration")->required();
  sub->add_option("-o,--out", c.out_prefix, "write <prefix>.csv and <prefix>.json instead of the configured outputs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement of symmetry-protected phases in small spin chains"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "override the config seed")->each([&](const std::string&) { common.seed = seed; });

  auto* compute = app.add_subcommand("compute", "run the tasks listed in a config");
  add_common(compute, common);

  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a config along one parameter axis");
  add_common(sweep_cmd, common);
  std::string axis;
  std::vector<double> values;
  sweep_cmd->add_option("--axis", axis, "region-size | region-gap | circuit-depth | lambda-skew")->required();
  sweep_cmd->add_option("--values", values, "axis values, in output order")->required()->delimiter(',');

  auto* string_order = app.add_subcommand("string-order", "string-order table, reconstruction and phase estimate");
  add_common(string_order, common);
  std::string table_in;
  string_order->add_option("--table", table_in, "reconstruct from a measured table (CSV) instead of the model state");

  auto* protocol = app.add_subcommand("protocol", "LOCC charge measurement and distillation on the boundary pair");
  add_common(protocol, common);
  auto* repinfo = app.add_subcommand("repinfo", "factor system, class and irrep dimension of the configured representation");
  add_common(repinfo, common);

  auto* self = app.add_subcommand("selftest", "run the invariant suite");
  bool inject = false;
  self->add_flag("--inject-fault", inject, "flip the sign of a charge projector (the suite must then fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*self) return selftest(inject, std::cout);

  RunConfig cfg;
  const int loaded = guarded([&] {
    if (*compute) cfg = load(common);
    if (*sweep_cmd) cfg = load(common);
    if (*string_order) cfg = load(common, {"string-table", "detect"});
    if (*protocol) cfg = load(common, {"protocol"});
    if (*repinfo) cfg = load(common, {"repinfo"});
  });
  if (loaded != kExitOk) return loaded;

  if (*sweep_cmd) return run_sweep(cfg, axis, values);
  if (*string_order && !table_in.empty()) {
    return guarded([&] {
      const auto state = build_state(cfg);
      const auto regions = make_regions(*state.chain, cfg.A, cfg.B, cfg.C);
      std::ifstream f(table_in);
      require(static_cast<bool>(f), ErrorCode::ConfigError, "cannot read table '" + table_in + "'");
      const auto table = read_table_csv(f, state.chain->group(), regions, detail::region_dim(*state.chain, regions.A),
                                        detail::region_dim(*state.chain, regions.B));
      const auto est = detect_phase(table);
      Evaluation ev;
      ev.row.model = model_descriptor(cfg) + ":table";
      ev.row.N = state.chain->size();
      ev.row.nA = regions.A.size();
      ev.row.nB = regions.B.size();
      ev.row.nC = regions.C.size();
      ev.row.negativity = est.order_parameter / 2.0;
      ev.row.order_parameter = est.order_parameter;
      ev.row.d_estimate = est.d_estimate;
      ev.doc = {{"model", ev.row.model}, {"table", table_in}, {"detect", {{"order_parameter", est.order_parameter}, {"d_estimate", est.d_estimate}}}};
      auto out = cfg;
      out.out_table.clear();
      emit(out, {ev}, ev.doc);
    });
  }
  if (*repinfo && cfg.out_json.empty())
    return guarded([&] { std::cout << repinfo_json(*cfg.rep).dump(2) << "\n"; });
  if (*protocol && cfg.out_json.empty())
    return guarded([&] { std::cout << evaluate(cfg).doc.dump(2) << "\n"; });
  return run(cfg);
}
