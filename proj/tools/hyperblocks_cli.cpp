// hyperblocks command line front end.
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "hyperblocks/analytics.hpp"
#include "hyperblocks/classifier.hpp"
#include "hyperblocks/dataset.hpp"
#include "hyperblocks/dtree.hpp"
#include "hyperblocks/error.hpp"
#include "hyperblocks/json_io.hpp"
#include "hyperblocks/linguistic.hpp"
#include "hyperblocks/mhyper.hpp"
#include "hyperblocks/service.hpp"

namespace hb = hyperblocks;

namespace {

struct DataOptions {
  std::string preset;
  std::string input;
  int id_column = -1;
  int class_column = -1;
  std::string missing = "?";
};

void add_data_options(CLI::App* app, DataOptions& o, bool input_flag = true) {
  app->add_option("--preset", o.preset, "Dataset preset")->check(CLI::IsMember({"wbc"}));
  if (input_flag) app->add_option("--input,--data", o.input, "CSV file");
  app->add_option("--id-col", o.id_column, "0-based id column (-1: none)");
  app->add_option("--class-col", o.class_column, "0-based class column (-1: last)");
  app->add_option("--missing", o.missing, "Missing-value marker");
}

std::string wbc_path() {
  if (const char* env = std::getenv("HYPERBLOCKS_WBC")) return env;
  return HB_DEFAULT_WBC_PATH;
}

hb::CsvSchema schema_for(const DataOptions& o, std::size_t columns) {
  hb::CsvSchema s = o.preset == "wbc" ? hb::CsvSchema::wbc() : hb::CsvSchema{};
  if (o.preset != "wbc") {
    s.class_column = columns ? columns - 1 : 0;
    s.missing_marker = o.missing;
  }
  if (o.id_column >= 0) s.id_column = static_cast<std::size_t>(o.id_column);
  if (o.class_column >= 0) s.class_column = static_cast<std::size_t>(o.class_column);
  return s;
}

std::size_t count_columns(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  }
  return 0;
}

hb::LoadResult load(const DataOptions& o, const std::string& override_path = {}) {
  std::string path = override_path.empty() ? o.input : override_path;
  if (path.empty()) {
    if (o.preset != "wbc") throw hb::Error(hb::ErrorCode::kInvalidArgument, "need --input or --preset wbc");
    path = wbc_path();
  }
  return hb::load_csv_file(path, schema_for(o, count_columns(path)));
}

std::vector<hb::PointId> parse_order(const std::string& spec, const hb::Dataset& d, std::uint64_t seed) {
  if (spec.empty() || spec == "dataset") return {};
  if (spec == "shuffle") {
    std::vector<hb::PointId> ids = d.ids();
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    return ids;
  }
  throw hb::Error(hb::ErrorCode::kInvalidArgument, "seed order must be dataset or shuffle");
}

void emit(const hb::Json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    hb::write_json_file(out, j);
  }
}

std::string pct(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * v << '%';
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyper-block discovery, classification and analytics"};
  app.require_subcommand(1);

  DataOptions data;
  std::uint64_t seed = 0;
  std::string out;

  // discover
  auto* discover = app.add_subcommand("discover", "Discover hyper-blocks and write a model");
  add_data_options(discover, data);
  double threshold = 0.1;
  std::string mode = "envelope";
  std::size_t k = 3;
  std::string variant = "n2";
  std::string order = "dataset";
  bool no_overlap = false;
  discover->add_option("--threshold", threshold, "Impurity threshold")->check(CLI::Range(0.0, 1.0));
  discover->add_option("--mode", mode, "envelope|m1|m2|m3");
  discover->add_option("--k", k, "Neighbours voting outside blocks")->check(CLI::PositiveNumber);
  discover->add_option("--variant", variant, "n1|n2|n3");
  discover->add_option("--order", order, "Seed order: dataset|shuffle");
  discover->add_flag("--no-overlap", no_overlap, "Forbid envelopes over covered points");
  discover->add_option("--seed", seed, "RNG seed");
  discover->add_option("--out", out, "Model JSON path (stdout if omitted)");

  // classify
  auto* classify = app.add_subcommand("classify", "Classify points with a saved model");
  std::string model_path, predictions;
  std::size_t min_block = 0;
  add_data_options(classify, data);
  classify->add_option("--model", model_path, "Model JSON")->required();
  classify->add_option("--out", predictions, "Predictions CSV (stdout if omitted)");
  classify->add_option("--min-block-size", min_block, "Refuse blocks smaller than this");

  // cv
  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
  add_data_options(cv, data);
  std::string learner = "hyper";
  std::size_t folds = 10;
  double cv_threshold = 0.0;
  std::optional<std::size_t> max_depth;
  cv->add_option("--learner", learner, "hyper|id3")->check(CLI::IsMember({"hyper", "id3"}));
  cv->add_option("--k", k, "Fixed k")->check(CLI::PositiveNumber);
  cv->add_option("--variant", variant, "n1|n2|n3");
  cv->add_option("--folds", folds, "Number of folds")->check(CLI::Range(2, 1000));
  cv->add_option("--threshold", cv_threshold, "Impurity threshold (0: pure blocks)")->check(CLI::Range(0.0, 1.0));
  cv->add_option("--mode", mode, "envelope|m1|m2|m3");
  cv->add_option("--max-depth", max_depth, "ID3 depth limit");
  cv->add_option("--seed", seed, "Fold seed");
  cv->add_option("--out", out, "Report JSON path (stdout if omitted)");

  // rules
  auto* rules = app.add_subcommand("rules", "Search or evaluate threshold rules");
  add_data_options(rules, data);
  std::size_t max_dims = 1;
  std::string rule_text, then_class, else_class;
  bool as_json = false;
  rules->add_option("--max-dims", max_dims, "Conjuncts to search")->check(CLI::PositiveNumber);
  rules->add_option("--rule", rule_text, "Evaluate a conjunction instead of searching");
  rules->add_option("--then", then_class, "Class when the rule holds");
  rules->add_option("--else", else_class, "Class otherwise");
  rules->add_flag("--json", as_json, "JSON output");

  // describe
  auto* describe = app.add_subcommand("describe", "Linguistic description");
  add_data_options(describe, data);
  std::string target = "all", label;
  double ling_threshold = 0.75;
  describe->add_option("--target", target, "all|class")->check(CLI::IsMember({"all", "class"}));
  describe->add_option("--class", label, "Class label for --target class");
  describe->add_option("--threshold", ling_threshold, "Concentration threshold");
  describe->add_flag("--json", as_json, "JSON output");

  // heatmap / pairs
  auto* heatmap = app.add_subcommand("heatmap", "Per-coordinate non-overlap counts of discovered blocks");
  add_data_options(heatmap, data);
  double block_threshold = 0.0;
  heatmap->add_option("--threshold", block_threshold, "Impurity threshold (0: pure)")->check(CLI::Range(0.0, 1.0));
  heatmap->add_flag("--json", as_json, "JSON output");

  auto* pairs = app.add_subcommand("pairs", "Best pair of largest blocks as a rule");
  add_data_options(pairs, data);
  std::string fallback = "class-priority";
  pairs->add_option("--threshold", block_threshold, "Impurity threshold (0: pure)")->check(CLI::Range(0.0, 1.0));
  pairs->add_option("--fallback", fallback, "class-priority|nearest")
      ->check(CLI::IsMember({"class-priority", "nearest"}));
  pairs->add_flag("--json", as_json, "JSON output");

  // convert
  auto* convert = app.add_subcommand("convert", "Decision-tree branch <-> hyper-block");
  std::string branch_text, domain_text = "0:1", block_path;
  std::size_t dims = 0;
  convert->add_option("--branch", branch_text, "Branch like \"x1>5 & x2<6\"");
  convert->add_option("--domain", domain_text, "lo:hi for every coordinate");
  convert->add_option("--dims", dims, "Dimension (default: highest coordinate used)");
  convert->add_option("--block", block_path, "Block JSON file to turn into a branch");
  convert->add_flag("--json", as_json, "JSON output");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  add_data_options(serve, data);
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port, "Port (HYPERBLOCKS_PORT overrides)")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Bind address");

  // export
  auto* exp = app.add_subcommand("export", "Export dataset, blocks or an ID3 tree as JSON");
  add_data_options(exp, data);
  std::string what = "blocks";
  exp->add_option("--what", what, "dataset|blocks|tree")->check(CLI::IsMember({"dataset", "blocks", "tree"}));
  exp->add_option("--threshold", block_threshold, "Impurity threshold for blocks")->check(CLI::Range(0.0, 1.0));
  exp->add_option("--out", out, "Output path (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*discover) {
      const auto loaded = load(data);
      const auto nd = hb::normalize(loaded.dataset);
      hb::MHyperConfig cfg;
      cfg.impurity_threshold = threshold;
      cfg.combine_mode = hb::combine_mode_from_string(mode);
      cfg.allow_overlap = !no_overlap;
      cfg.seed_order = parse_order(order, nd.data, seed);
      const auto model = hb::make_model(hb::discover(nd, cfg), nd, k,
                                        hb::distance_variant_from_string(variant), {});
      emit(hb::to_json(model), out);
      std::cerr << model.hb_model.blocks.size() << " blocks, " << model.hb_model.refused.size()
                << " refused\n";
    } else if (*classify) {
      auto model = hb::hyper_model_from_json(hb::read_json_file(model_path));
      if (min_block) model = hb::classify_with_small_hb_refusal(std::move(model), min_block);
      const auto loaded = load(data);
      const hb::Dataset x = hb::apply_ranges(loaded.dataset, model.ranges);
      std::ofstream file;
      if (!predictions.empty()) file.open(predictions);
      std::ostream& os = predictions.empty() ? std::cout : file;
      os << "id,outcome,rule_fired,top_block_id,distance\n";
      std::size_t correct = 0, answered = 0;
      for (std::size_t row = 0; row < x.size(); ++row) {
        const auto c = hb::classify(x.values(row), model);
        os << x.id(row) << ',' << c.outcome.value_or("") << ',' << hb::to_string(c.rule) << ',';
        if (!c.evidence.empty()) os << c.evidence.front().block_index << ',' << c.evidence.front().distance;
        else os << ',';
        os << '\n';
        if (c.outcome) {
          ++answered;
          if (*c.outcome == x.label_of(row)) ++correct;
        }
      }
      std::cerr << correct << '/' << answered << " answered correctly, "
                << x.size() - answered << " refused\n";
    } else if (*cv) {
      const auto loaded = load(data);
      hb::Learner l;
      if (learner == "hyper") {
        hb::HyperLearner h;
        h.mhyper.impurity_threshold = cv_threshold;
        h.mhyper.combine_mode = hb::combine_mode_from_string(mode);
        h.learn.k_min = h.learn.k_max = k;
        h.learn.variant = hb::distance_variant_from_string(variant);
        h.learn.seed = seed;
        l = h;
      } else {
        l = hb::Id3Learner{hb::Id3Config{max_depth, 1}};
      }
      emit(hb::to_json(hb::cross_validate(loaded.dataset, l, folds, seed)), out);
    } else if (*rules) {
      const auto d = load(data).dataset;
      if (!rule_text.empty()) {
        if (then_class.empty() || else_class.empty()) {
          throw hb::Error(hb::ErrorCode::kInvalidArgument, "--rule needs --then and --else");
        }
        hb::ThresholdRule r{hb::parse_branch(rule_text, d.coordinate_names()).conditions, then_class, else_class};
        const auto e = hb::evaluate_rule(r, d);
        if (as_json) {
          hb::Json j = hb::to_json(r);
          j["evaluation"] = hb::to_json(e);
          std::cout << j.dump(2) << '\n';
        } else {
          std::cout << r.to_string() << ": " << e.correct << '/' << e.total << " (" << pct(e.accuracy) << ")\n";
        }
      } else {
        hb::Json list = hb::Json::array();
        for (const auto& r : hb::simple_rule_search(d, max_dims)) {
          const auto e = hb::evaluate_rule(r, d);
          if (as_json) {
            hb::Json j = hb::to_json(r);
            j["evaluation"] = hb::to_json(e);
            list.push_back(j);
          } else {
            std::cout << r.to_string() << ": " << e.correct << '/' << e.total << " (" << pct(e.accuracy) << ")\n";
          }
        }
        if (as_json) std::cout << list.dump(2) << '\n';
      }
    } else if (*describe) {
      const auto nd = hb::normalize(load(data).dataset);
      std::vector<hb::LinguisticDescription> ds;
      if (target == "all") {
        ds.push_back(hb::describe_dataset(nd.data, ling_threshold));
      } else if (!label.empty()) {
        ds.push_back(hb::describe_class(nd.data, label, ling_threshold));
      } else {
        for (const auto& l : nd.data.class_labels()) ds.push_back(hb::describe_class(nd.data, l, ling_threshold));
      }
      hb::Json arr = hb::Json::array();
      for (const auto& d : ds) {
        if (as_json) {
          arr.push_back(hb::to_json(d));
          continue;
        }
        std::cout << d.subject << ":\n";
        for (const auto& s : d.sentences) std::cout << "  " << s << '\n';
      }
      if (as_json) std::cout << arr.dump(2) << '\n';
    } else if (*heatmap || *pairs) {
      const auto nd = hb::normalize(load(data).dataset);
      hb::MHyperConfig cfg;
      cfg.impurity_threshold = block_threshold;
      const auto model = hb::discover(nd, cfg);
      if (*heatmap) {
        const auto r = hb::nonoverlap_heatmap(model.blocks);
        if (as_json) {
          std::cout << hb::to_json(r, nd.data.coordinate_names()).dump(2) << '\n';
        } else {
          for (std::size_t c = 0; c < r.disjoint_counts.size(); ++c) {
            std::cout << nd.data.coordinate_names()[c] << ' ' << r.disjoint_counts[c] << '\n';
          }
          std::cout << "max " << nd.data.coordinate_names()[r.argmax()] << " of " << r.total_pairs << " pairs\n";
        }
      } else {
        const auto r = hb::best_pair_search(
            model.blocks, nd.data, hb::default_class_priority(nd.data.class_labels()),
            fallback == "nearest" ? hb::PairFallback::kNearestInterval : hb::PairFallback::kClassPriority);
        if (as_json) {
          hb::Json j = hb::to_json(r);
          j["firstSize"] = model.blocks[r.first_block].size();
          j["secondSize"] = model.blocks[r.second_block].size();
          std::cout << j.dump(2) << '\n';
        } else {
          std::cout << "blocks " << r.first_block << " (" << model.blocks[r.first_block].size() << ") and "
                    << r.second_block << " (" << model.blocks[r.second_block].size() << ")\n"
                    << r.rule << '\n'
                    << r.correct << '/' << r.total << " (" << pct(r.accuracy) << ")\n";
        }
      }
    } else if (*convert) {
      const auto colon = domain_text.find(':');
      if (colon == std::string::npos) throw hb::Error(hb::ErrorCode::kInvalidArgument, "--domain must be lo:hi");
      const hb::Interval dom{std::stod(domain_text.substr(0, colon)), std::stod(domain_text.substr(colon + 1))};
      if (!branch_text.empty()) {
        const auto b = hb::parse_branch(branch_text);
        std::size_t n = dims;
        for (const auto& c : b.conditions) n = std::max(n, c.coordinate + 1);
        const auto box = hb::branch_to_hb(b, hb::Bounds(n, dom));
        if (as_json) {
          std::cout << hb::Json{{"branch", hb::to_json(b)}, {"intervals", hb::to_json(box)}}.dump(2) << '\n';
        } else {
          for (std::size_t c = 0; c < box.size(); ++c) {
            std::cout << 'x' << c + 1 << ": " << (box[c].lo_open ? '(' : '[') << box[c].lo << ", " << box[c].hi
                      << (box[c].hi_open ? ')' : ']') << '\n';
          }
        }
      } else if (!block_path.empty()) {
        const auto block = hb::block_from_json(hb::read_json_file(block_path));
        const auto b = hb::hb_to_branch(block, hb::Bounds(block.dimension(), dom));
        if (as_json) std::cout << hb::to_json(b).dump(2) << '\n';
        else std::cout << hb::render_branch(b) << '\n';
      } else {
        throw hb::Error(hb::ErrorCode::kInvalidArgument, "convert needs --branch or --block");
      }
    } else if (*serve) {
      const auto loaded = load(data);
      hb::Service service(loaded.dataset, data.preset.empty() ? data.input : data.preset, loaded.raw_rows,
                          loaded.dropped_rows);
      const int p = hb::resolve_port(port);
      std::cerr << "serving on http://" << host << ':' << p << "/api/v1\n";
      hb::serve_http(service, host, p);
    } else if (*exp) {
      const auto nd = hb::normalize(load(data).dataset);
      if (what == "dataset") {
        hb::Json j = hb::to_json(nd.data);
        j["ranges"] = hb::to_json(nd.ranges);
        emit(j, out);
      } else if (what == "tree") {
        emit(hb::to_json(hb::id3_train(nd.data)), out);
      } else {
        hb::MHyperConfig cfg;
        cfg.impurity_threshold = block_threshold;
        emit(hb::to_json(hb::discover(nd, cfg)), out);
      }
    }
  } catch (const hb::Error& e) {
    std::cerr << "error: " << e.what();
    if (!e.detail().empty()) std::cerr << " (" << e.detail() << ')';
    std::cerr << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
