#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdr/data.hpp"
#include "sdr/discriminant.hpp"
#include "sdr/experiment.hpp"
#include "sdr/kernels.hpp"
#include "sdr/metrics.hpp"
#include "sdr/ordering.hpp"
#include "sdr/report.hpp"
#include "sdr/simgen.hpp"

namespace {

sdr::Method method_or_throw(const std::string& name) {
  const auto m = sdr::parse_method(name);
  if (!m) throw sdr::ConfigError("methods: unknown method '" + name + "'");
  return *m;
}

sdr::Criterion criterion_or_throw(const std::string& name) {
  const auto c = sdr::parse_criterion(name);
  if (!c) throw sdr::ConfigError("criteria: unknown criterion '" + name + "'");
  return *c;
}

// shared --response-* and --no-header options
struct SchemaOptions {
  int response_column = -1;
  std::string response_name;
  std::string kind = "continuous";
  bool no_header = false;

  sdr::CsvSchema schema() const {
    sdr::CsvSchema s;
    s.response_column = response_column;
    s.response_name = response_name;
    s.kind = sdr::parse_response_kind(kind);
    s.has_header = !no_header;
    return s;
  }
};

void add_schema_options(CLI::App* cmd, SchemaOptions& opts) {
  cmd->add_option("--response-column", opts.response_column,
                  "0-based response column (-1: last column)");
  cmd->add_option("--response-name", opts.response_name,
                  "response column header name (overrides --response-column)");
  cmd->add_option("--response-kind", opts.kind, "binary, categorical, or continuous")
      ->check(CLI::IsMember({"binary", "categorical", "continuous"}));
  cmd->add_flag("--no-header", opts.no_header, "input CSV has no header row");
}

struct SimulateArgs {
  std::string tag;
  std::vector<std::string> methods{"PCA"};
  std::vector<std::string> criteria;
  std::string classifier = "auto";
  std::size_t d = 0;
  int slices = 5;
  std::vector<std::size_t> sizes;
  std::size_t replicates = 100;
  std::uint64_t seed = 1;
  double gamma = 1e-6;
  std::size_t test_per_class = 1000;
  std::size_t p = 50;
  std::size_t workers = 1;
  std::string out_dir;
};

int run_simulate(const SimulateArgs& args) {
  sdr::ExperimentConfig cfg;
  cfg.tag = args.tag;
  cfg.methods.clear();
  for (const std::string& m : args.methods) cfg.methods.push_back(method_or_throw(m));
  cfg.criteria.clear();
  if (args.criteria.empty()) {
    cfg.criteria = {sdr::Criterion::Eigenvalue,
                    sdr::parse_regression_tag(args.tag) ? sdr::Criterion::F : sdr::Criterion::T};
  } else {
    for (const std::string& c : args.criteria) cfg.criteria.push_back(criterion_or_throw(c));
  }
  if (args.classifier != "auto") {
    const auto kind = sdr::parse_classifier_kind(args.classifier);
    if (!kind) throw sdr::ConfigError("classifier: unknown kind '" + args.classifier + "'");
    cfg.classifier = *kind;
  }
  cfg.d = args.d;
  cfg.h_slices = args.slices;
  cfg.sizes = args.sizes;
  cfg.replicates = args.replicates;
  cfg.seed = args.seed;
  cfg.gamma = args.gamma;
  cfg.test_per_class = args.test_per_class;
  cfg.p = args.p;
  cfg.workers = args.workers;
  cfg.out_dir = args.out_dir;
  cfg.validate();

  const std::vector<sdr::ReplicateResult> rows = cfg.is_regression()
                                                     ? sdr::run_subspace_experiment(cfg)
                                                     : sdr::run_classification_experiment(cfg);
  const std::vector<sdr::SummaryRow> summary = sdr::summarize(rows);
  sdr::emit_outputs(rows, summary, cfg.out_dir, sdr::config_to_json(cfg));

  std::cout << "wrote " << rows.size() << " rows to " << cfg.out_dir << "/replicates.csv\n";
  std::cout << "method,criterion,n,metric,median\n";
  for (const sdr::SummaryRow& s : summary)
    std::cout << s.method << ',' << s.criterion << ',' << s.n << ',' << s.metric << ','
              << sdr::format_double(s.median) << '\n';
  return 0;
}

void print_pipeline_report(const sdr::CsvPipelineReport& report) {
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "direction_index,eigenvalue,score,rank\n";
  for (std::size_t j = 0; j < report.scores.scores.size(); ++j)
    std::cout << (j + 1) << ',' << sdr::format_double(report.basis.values[j]) << ','
              << sdr::format_double(report.scores.scores[j]) << ',' << report.scores.ranks[j]
              << '\n';
  std::cout << "selected directions:";
  for (std::size_t idx : report.reduced.source_index) std::cout << ' ' << (idx + 1);
  std::cout << '\n';
  if (report.has_test_cer)
    std::cout << "test CER: " << sdr::format_double(report.test_cer) << '\n';
  for (const auto& [dd, value] : report.sweep)
    std::cout << "d=" << dd << " CER: " << sdr::format_double(value) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GEV-based dimension reduction with response-driven direction ordering"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file");
  app.get_config_ptr()->configurable(true);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run a named replication study and write result tables");
  simulate->add_option("--tag,-t", sim.tag, "Q1 Q2 Q3 L1 L2 L3 D1 D2 or D3")->required();
  simulate->add_option("--sizes", sim.sizes,
                       "training sizes (per class for Q and L tags, total rows for D tags)")
      ->required();
  simulate->add_option("--methods", sim.methods, "subset of PCA SIR SAVE SIR2 DR SSDR");
  simulate->add_option("--criteria", sim.criteria,
                       "subset of EIGENVALUE T F (default: EIGENVALUE plus T or F)");
  simulate->add_option("--classifier", sim.classifier, "LDA, QDA, or auto (the tag's own)");
  simulate->add_option("--d", sim.d, "target dimension (0: the tag's true dimension)");
  simulate->add_option("--slices", sim.slices, "slice count for continuous responses");
  simulate->add_option("--replicates,-r", sim.replicates, "replicates per sample size");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--gamma", sim.gamma, "ridge added to singular covariances");
  simulate->add_option("--test-per-class", sim.test_per_class, "evaluation pool per class");
  simulate->add_option("--p", sim.p, "predictor dimension");
  simulate->add_option("--workers", sim.workers, "worker threads (0: hardware)");
  simulate->add_option("--out,-o", sim.out_dir, "output directory")->required();

  SchemaOptions reduce_schema;
  std::string reduce_train, reduce_out, reduce_method = "PCA", reduce_criterion = "EIGENVALUE";
  std::size_t reduce_d = 1;
  int reduce_slices = 5;
  double reduce_gamma = 1e-6;
  CLI::App* reduce = app.add_subcommand("reduce", "score and reorder directions on CSV data");
  reduce->add_option("--train", reduce_train, "training CSV")->required();
  reduce->add_option("--out-dir", reduce_out, "where to write reduced coordinates and scores");
  reduce->add_option("--method", reduce_method, "PCA SIR SAVE SIR2 DR or SSDR");
  reduce->add_option("--criterion", reduce_criterion, "EIGENVALUE, T, or F");
  reduce->add_option("--d", reduce_d, "directions to keep");
  reduce->add_option("--slices", reduce_slices, "slice count for continuous responses");
  reduce->add_option("--gamma", reduce_gamma, "ridge added to singular covariances");
  add_schema_options(reduce, reduce_schema);

  SchemaOptions classify_schema;
  std::string cls_train, cls_test, cls_out, cls_method = "PCA", cls_criterion = "EIGENVALUE";
  std::string cls_kind;
  std::size_t cls_d = 1, cls_sweep = 0;
  int cls_slices = 5;
  double cls_gamma = 1e-6;
  CLI::App* classify =
      app.add_subcommand("classify", "reduce a training set and classify a test set");
  classify->add_option("--train", cls_train, "training CSV")->required();
  classify->add_option("--test", cls_test, "test CSV")->required();
  classify->add_option("--classifier", cls_kind, "LDA or QDA")->required();
  classify->add_option("--method", cls_method, "PCA SIR SAVE SIR2 DR or SSDR");
  classify->add_option("--criterion", cls_criterion, "EIGENVALUE, T, or F");
  classify->add_option("--d", cls_d, "directions to keep");
  classify->add_option("--sweep-dmax", cls_sweep, "also report CER for every d up to this");
  classify->add_option("--slices", cls_slices, "slice count for continuous responses");
  classify->add_option("--gamma", cls_gamma, "ridge added to singular covariances");
  classify->add_option("--out-dir", cls_out, "where to write reduced coordinates and scores");
  add_schema_options(classify, classify_schema);

  std::string dist_truth, dist_estimate;
  CLI::App* distance =
      app.add_subcommand("distance", "distance between two basis matrices in [0,1]");
  distance->add_option("--truth", dist_truth, "CSV holding a p x d basis, no header")->required();
  distance->add_option("--estimate", dist_estimate, "CSV holding a p x d basis, no header")
      ->required();

  double oer_mu1 = 0.0, oer_mu2 = 0.0, oer_sigma1 = 1.0, oer_sigma2 = 1.0;
  std::size_t oer_mc = 0;
  std::uint64_t oer_seed = 1;
  CLI::App* oer = app.add_subcommand(
      "oer", "exact equal-prior error of the optimal rule for two normal classes on a line");
  oer->add_option("--mu1", oer_mu1, "class 1 mean")->required();
  oer->add_option("--mu2", oer_mu2, "class 2 mean")->required();
  oer->add_option("--sigma1", oer_sigma1, "class 1 standard deviation")->required();
  oer->add_option("--sigma2", oer_sigma2, "class 2 standard deviation")->required();
  oer->add_option("--mc", oer_mc, "also run a Monte Carlo check with this many samples");
  oer->add_option("--seed", oer_seed, "Monte Carlo seed");

  try {
    app.parse(argc, argv);

    if (*simulate) return run_simulate(sim);

    if (*reduce) {
      sdr::CsvPipelineConfig cfg;
      cfg.train_path = reduce_train;
      cfg.schema = reduce_schema.schema();
      cfg.method = method_or_throw(reduce_method);
      cfg.criterion = criterion_or_throw(reduce_criterion);
      cfg.d = reduce_d;
      cfg.h_slices = reduce_slices;
      cfg.gamma = reduce_gamma;
      cfg.out_dir = reduce_out;
      print_pipeline_report(sdr::run_csv_pipeline(cfg));
      return 0;
    }

    if (*classify) {
      sdr::CsvPipelineConfig cfg;
      cfg.train_path = cls_train;
      cfg.test_path = cls_test;
      cfg.schema = classify_schema.schema();
      cfg.method = method_or_throw(cls_method);
      cfg.criterion = criterion_or_throw(cls_criterion);
      const auto kind = sdr::parse_classifier_kind(cls_kind);
      if (!kind) throw sdr::ConfigError("classifier: unknown kind '" + cls_kind + "'");
      cfg.classifier = *kind;
      cfg.d = cls_d;
      cfg.sweep_dmax = cls_sweep;
      cfg.h_slices = cls_slices;
      cfg.gamma = cls_gamma;
      cfg.out_dir = cls_out;
      print_pipeline_report(sdr::run_csv_pipeline(cfg));
      return 0;
    }

    if (*distance) {
      const sdr::Matrix truth = sdr::read_matrix_csv_file(dist_truth);
      const sdr::Matrix estimate = sdr::read_matrix_csv_file(dist_estimate);
      std::cout << sdr::format_double(sdr::subspace_distance(truth, estimate)) << '\n';
      return 0;
    }

    if (*oer) {
      sdr::OerInputs1D in;
      in.mu1 = oer_mu1;
      in.mu2 = oer_mu2;
      in.sigma1 = oer_sigma1;
      in.sigma2 = oer_sigma2;
      std::cout << "oer: " << sdr::format_double(sdr::oer_1d(in)) << '\n';
      if (oer_mc > 0) {
        const sdr::McEstimate mc = sdr::mc_oer_oracle(in, oer_mc, oer_seed);
        std::cout << "mc: " << sdr::format_double(mc.estimate) << " se: "
                  << sdr::format_double(mc.se) << '\n';
      }
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
    app.exit(e);
    return 1;
  } catch (const sdr::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
