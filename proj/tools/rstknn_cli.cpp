// rstknn: dataset generation, reverse spatio-textual kNN queries in every
// traversal mode, oracle comparison and counterexample search.
//
// Exit status: 0 ok, 1 mismatch (or no counterexample found), 2 usage,
// 3 input could not be read or parsed.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rstknn/dataset_io.hpp"
#include "rstknn/engine.hpp"
#include "rstknn/errors.hpp"
#include "rstknn/oracle.hpp"
#include "rstknn/trace.hpp"

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QueryInputs {
  std::string dataset;
  std::string fixture;
  std::optional<double> qx, qy;
  std::string qterms;
  std::string query_file;
  int k = 1;
  double alpha = 0.5;
  int fanout = rstknn::IurTree::kDefaultFanout;
  std::string layout;
};

void add_query_options(CLI::App* cmd, QueryInputs& in) {
  cmd->add_option("--dataset", in.dataset, "JSON-lines dataset file");
  cmd->add_option("--fixture", in.fixture,
                  "fixture directory (dataset.jsonl, query.json, params.json); "
                  "replaces --dataset/--query-file/--k/--alpha/--fanout/--layout");
  cmd->add_option("--qx", in.qx, "query x coordinate");
  cmd->add_option("--qy", in.qy, "query y coordinate");
  cmd->add_option("--qterms", in.qterms, "query terms, e.g. \"t1=2,t2=5\"");
  cmd->add_option("--query-file", in.query_file, "query JSON {\"x\",\"y\",\"terms\"}");
  cmd->add_option("--k", in.k, "neighbor rank k (>= 1)")->capture_default_str();
  cmd->add_option("--alpha", in.alpha, "spatial weight in [0, 1]")->capture_default_str();
  cmd->add_option("--fanout", in.fanout, "index fanout for the bulk load")->capture_default_str();
  cmd->add_option("--layout", in.layout,
                  "explicit index topology, e.g. \"((P0,P1),((P2,P3),(P4,P5)))\"");
}

rstknn::Instance resolve(const QueryInputs& in) {
  rstknn::Instance inst;
  if (!in.fixture.empty()) return rstknn::load_fixture(in.fixture);
  if (in.dataset.empty()) throw rstknn::InvalidParams("--dataset or --fixture is required");
  inst.objects = rstknn::load_dataset(in.dataset);
  if (inst.objects.empty()) throw rstknn::ParseError(in.dataset + ": dataset has no objects");
  if (!in.query_file.empty()) {
    inst.query = rstknn::load_query(in.query_file);
  } else {
    if (!in.qx || !in.qy) throw rstknn::InvalidParams("--qx and --qy (or --query-file) are required");
    inst.query.loc = {*in.qx, *in.qy};
    inst.query.vct = rstknn::parse_qterms(in.qterms);
  }
  inst.params.k = in.k;
  inst.params.alpha = in.alpha;
  inst.fanout = in.fanout;
  inst.layout = in.layout;
  return inst;
}

struct Prepared {
  rstknn::Instance inst;
  rstknn::IurTree tree;
  rstknn::NormStats stats;
};

Prepared prepare(const QueryInputs& in) {
  rstknn::Instance inst = resolve(in);
  inst.params.validate();
  if (inst.fanout < 2) throw rstknn::InvalidParams("--fanout must be >= 2");
  rstknn::IurTree tree = [&] {
    try {
      return rstknn::build_tree(inst);
    } catch (const rstknn::ParseError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw rstknn::InvalidParams(e.what());
    }
  }();
  const rstknn::NormStats stats = rstknn::instance_stats(inst);
  return {std::move(inst), std::move(tree), stats};
}

std::vector<std::string> run_mode(const Prepared& p, const std::string& mode,
                                  rstknn::QueryResult* full = nullptr) {
  if (mode == "oracle")
    return rstknn::rknn_bruteforce(p.inst.objects, p.inst.query, p.inst.params, p.stats);
  auto r = rstknn::rstknn_query(p.tree, p.inst.query, p.inst.params, p.stats,
                                rstknn::parse_mode(mode));
  auto ids = r.ids;
  if (full) *full = std::move(r);
  return ids;
}

std::string set_list(const std::vector<std::string>& ids) {
  if (ids.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? " " : "") + ids[i];
  return s;
}

std::vector<std::string> minus(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

int cmd_gen(std::uint64_t seed, std::size_t n, int vocab, const std::string& out) {
  if (n == 0) throw rstknn::InvalidParams("--n must be >= 1");
  if (vocab < 0) throw rstknn::InvalidParams("--vocab must be >= 0");
  const auto objects = rstknn::generate_dataset(seed, n, vocab);
  if (out.empty() || out == "-") {
    rstknn::write_dataset(std::cout, objects);
  } else {
    rstknn::save_dataset(out, objects);
  }
  return 0;
}

int cmd_query(const QueryInputs& in, const std::string& mode, bool trace, const std::string& out) {
  const Prepared p = prepare(in);
  if (mode != "oracle") rstknn::parse_mode(mode);
  rstknn::QueryResult full;
  const auto ids = run_mode(p, mode, &full);
  std::cout << rstknn::format_result(ids);
  if (trace || !out.empty()) {
    if (mode == "oracle") {
      std::cerr << "note: the oracle mode has no trace\n";
      return 0;
    }
    if (trace) std::cout << rstknn::format_trace_table(full.trace);
    if (!out.empty()) {
      std::ofstream f(out, std::ios::binary);
      if (!f) throw InputError("cannot write " + out);
      f << rstknn::format_trace_jsonl(full.trace);
    }
  }
  return 0;
}

int cmd_compare(const QueryInputs& in) {
  const Prepared p = prepare(in);
  const auto oracle = run_mode(p, "oracle");
  std::cout << "oracle      " << set_list(oracle) << '\n';
  bool correct_ok = true;
  for (const char* mode : {"correct", "faulty2011", "faulty2014"}) {
    const auto got = run_mode(p, mode);
    const auto extra = minus(got, oracle);
    const auto missing = minus(oracle, got);
    std::string name = mode;
    name.resize(12, ' ');
    std::cout << name << set_list(got) << "   extra: " << set_list(extra)
              << "   missing: " << set_list(missing) << '\n';
    if (std::string(mode) == "correct") correct_ok = extra.empty() && missing.empty();
  }
  return correct_ok ? 0 : kExitMismatch;
}

int cmd_search(const std::string& mode, std::uint64_t seed, std::size_t trials,
               const std::string& out) {
  if (trials == 0) throw rstknn::InvalidParams("--trials must be >= 1");
  const auto found = rstknn::counterexample_search(rstknn::parse_mode(mode), seed, trials);
  if (!found) {
    std::cout << "no counterexample in " << trials << " trials\n";
    return kExitMismatch;
  }
  const auto& ce = *found;
  std::cout << "trial " << ce.trial << ": n=" << ce.instance.objects.size()
            << " k=" << ce.instance.params.k << " alpha=" << ce.instance.params.alpha
            << " fanout=" << ce.instance.fanout << '\n'
            << mode << ": " << set_list(ce.mode_result) << '\n'
            << "oracle: " << set_list(ce.oracle_result) << '\n';
  if (!out.empty()) {
    rstknn::save_fixture(out, ce.instance, {mode, seed, ce.trial});
    std::cout << "fixture written to " << out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reverse spatio-textual k-nearest-neighbor queries over an IUR-tree"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::size_t n = 0;
  int vocab = 8;
  std::string out;
  auto* gen = app.add_subcommand("gen", "write a random JSON-lines dataset");
  gen->add_option("--seed", seed, "random seed")->capture_default_str();
  gen->add_option("--n", n, "number of objects (>= 1)")->required();
  gen->add_option("--vocab", vocab, "vocabulary size")->capture_default_str();
  gen->add_option("--out", out, "output path (stdout when omitted)");

  QueryInputs qin;
  std::string mode = "correct";
  bool trace = false;
  auto* query = app.add_subcommand("query", "run a query and print the result ids");
  add_query_options(query, qin);
  query->add_option("--mode", mode, "correct | faulty2011 | faulty2014 | oracle")
      ->capture_default_str()
      ->check(CLI::IsMember({"correct", "faulty2011", "faulty2014", "oracle"}));
  query->add_flag("--trace", trace, "print the step-by-step trace table");
  query->add_option("--out", out, "write the trace as JSON lines to this path");

  QueryInputs cin_;
  auto* compare = app.add_subcommand("compare", "diff every traversal mode against the oracle");
  add_query_options(compare, cin_);

  std::string search_mode = "faulty2011";
  std::size_t trials = 500;
  auto* search = app.add_subcommand("search", "look for a dataset where a mode disagrees with the oracle");
  search->add_option("--mode", search_mode, "correct | faulty2011 | faulty2014")
      ->capture_default_str()
      ->check(CLI::IsMember({"correct", "faulty2011", "faulty2014"}));
  search->add_option("--seed", seed, "random seed")->capture_default_str();
  search->add_option("--trials", trials, "number of random instances")->capture_default_str();
  search->add_option("--out", out, "write the first counterexample as a fixture directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(seed, n, vocab, out);
    if (*query) return cmd_query(qin, mode, trace, out);
    if (*compare) return cmd_compare(cin_);
    if (*search) return cmd_search(search_mode, seed, trials, out);
  } catch (const rstknn::InvalidParams& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const rstknn::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  }
  return kExitUsage;
}
