// Command-line front end: train a weighted binary hash model from labeled
// CSV data, encode datasets, query a database, evaluate retrieval quality,
// and run the random-projection baseline. Logs go to stderr; machine
// readable output goes to stdout or to files.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cghash/code_table.hpp"
#include "cghash/dataset.hpp"
#include "cghash/error.hpp"
#include "cghash/eval.hpp"
#include "cghash/model.hpp"
#include "cghash/solver.hpp"

namespace {

using namespace cghash;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CommonEvalArgs {
  std::string db_path;
  std::string query_path;
  std::size_t k_retrieve = 50;
  std::size_t K_classify = 3;
  std::string pr_out;
  bool exclude_self = false;
};

void add_eval_flags(CLI::App* cmd, CommonEvalArgs& args) {
  cmd->add_option("--db", args.db_path, "database CSV")->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--queries", args.query_path, "query CSV")->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--k-retrieve", args.k_retrieve, "top-k cut for the retrieval metric");
  cmd->add_option("--K-classify", args.K_classify, "neighbors for majority voting");
  cmd->add_option("--pr-out", args.pr_out, "write the precision-recall curve as CSV");
  cmd->add_flag("--exclude-self", args.exclude_self,
                "drop database row i from query i's ranking");
}

std::vector<BitCode> encode_all(const HashModel& model, const Dataset& normalized) {
  std::vector<BitCode> codes;
  codes.reserve(normalized.n);
  for (std::size_t m = 0; m < normalized.n; ++m)
    codes.push_back(encode(model.functions, normalized.row(m)));
  return codes;
}

void report_metrics(const CodeTable& table, const std::vector<BitCode>& queries,
                    const std::vector<int>& query_labels,
                    const std::vector<int>& db_labels, const CommonEvalArgs& args) {
  EvalOptions opts;
  opts.exclude_self = args.exclude_self;

  PRCurve curve = pr_curve(table, queries, query_labels, db_labels, opts);
  double proportion =
      topk_proportion(table, queries, query_labels, db_labels, args.k_retrieve, opts);
  auto predicted = knn_classify(table, queries, db_labels, args.K_classify, opts);
  double correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == query_labels[i]) ++correct;
  double accuracy = predicted.empty() ? 0.0 : correct / double(predicted.size());

  std::cout << "average_precision " << fmt17(curve.average_precision) << "\n";
  std::cout << "topk_proportion " << fmt17(proportion) << "\n";
  std::cout << "knn_accuracy " << fmt17(accuracy) << "\n";

  if (!args.pr_out.empty()) {
    std::ofstream out(args.pr_out);
    if (!out) throw ParseError("cannot write '" + args.pr_out + "'");
    out << "recall,precision\n";
    for (std::size_t g = 0; g < curve.recall.size(); ++g)
      out << fmt17(curve.recall[g]) << ',' << fmt17(curve.precision[g]) << "\n";
  }
}

int run_train(const std::string& data_path, const std::string& out_path,
              const TrainConfig& cfg, std::size_t K, const std::string& pairing) {
  Dataset raw = load_csv(data_path);
  Dataset ds = normalize(raw);
  TripletPairing mode =
      pairing == "matched" ? TripletPairing::matched : TripletPairing::cross;
  auto triplets = generate_triplets(ds, K, mode, cfg.seed);
  std::cerr << "training on " << ds.n << " samples, " << triplets.size()
            << " triplets\n";

  DupletSet duplets;
  const DupletSet* duplets_ptr = nullptr;
  if (cfg.reg == Regularizer::duplet_weighted_l1) {
    duplets = generate_duplets(ds, K);
    duplets_ptr = &duplets;
    std::cerr << "duplet set: " << duplets.pairs.size() << " pairs\n";
  }

  auto observer = [](const TrainIteration& it) {
    std::fprintf(stderr, "iter %3d  score %.6g  objective %.10g  kkt %.3g\n",
                 it.iteration, it.score, it.objective, it.kkt_violation);
  };
  HashModel model = train(ds, triplets, cfg, duplets_ptr, observer);
  if (model.bits() < std::size_t(cfg.bits))
    std::cerr << "stopped early with " << model.bits() << " of " << cfg.bits
              << " bits (no dual constraint left to violate)\n";
  save_model(model, out_path);
  std::cerr << "wrote " << out_path << "\n";
  return 0;
}

int run_encode(const std::string& model_path, const std::string& data_path,
               const std::string& out_path) {
  HashModel model = load_model(model_path);
  Dataset raw = load_csv(data_path);
  Dataset ds = apply_normalization(raw, model.feature_mean, model.feature_std);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path);
    if (!file) throw ParseError("cannot write '" + out_path + "'");
    out = &file;
  }
  for (std::size_t m = 0; m < ds.n; ++m) {
    BitCode code = encode(model.functions, ds.row(m));
    *out << m << ' ';
    for (std::size_t j = 0; j < code.nbits; ++j) *out << (code.get(j) ? '1' : '0');
    *out << "\n";
  }
  return 0;
}

int run_query(const std::string& model_path, const std::string& db_path,
              const std::string& query_path, std::size_t k,
              const std::string& out_path) {
  HashModel model = load_model(model_path);
  Dataset db = apply_normalization(load_csv(db_path), model.feature_mean,
                                   model.feature_std);
  Dataset queries = apply_normalization(load_csv(query_path), model.feature_mean,
                                        model.feature_std);
  CodeTable table = build_code_table(model, db);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path);
    if (!file) throw ParseError("cannot write '" + out_path + "'");
    out = &file;
  }
  for (std::size_t qi = 0; qi < queries.n; ++qi) {
    BitCode code = encode(model.functions, queries.row(qi));
    auto hits = query(table, code, k);
    for (std::size_t r = 0; r < hits.size(); ++r)
      *out << qi << ' ' << r << ' ' << hits[r].id << ' ' << fmt17(hits[r].distance)
           << "\n";
  }
  return 0;
}

int run_eval(const std::string& model_path, const CommonEvalArgs& args) {
  HashModel model = load_model(model_path);
  Dataset db = apply_normalization(load_csv(args.db_path), model.feature_mean,
                                   model.feature_std);
  Dataset queries = apply_normalization(load_csv(args.query_path), model.feature_mean,
                                        model.feature_std);
  CodeTable table = build_code_table(model, db);
  report_metrics(table, encode_all(model, queries), queries.labels, db.labels, args);
  return 0;
}

int run_lsh(const CommonEvalArgs& args, std::size_t bits, std::uint64_t seed) {
  Dataset db = normalize(load_csv(args.db_path));
  Dataset queries = apply_normalization(load_csv(args.query_path), db.feature_mean,
                                        db.feature_std);

  std::vector<HashFunction> functions;
  for (auto& h : lsh_sample(db.dim, bits, seed)) functions.push_back(std::move(h));
  std::vector<double> unit_weights(bits, 1.0);
  CodeTable table = build_code_table(functions, unit_weights, db);

  std::vector<BitCode> query_codes;
  query_codes.reserve(queries.n);
  for (std::size_t m = 0; m < queries.n; ++m)
    query_codes.push_back(encode(functions, queries.row(m)));

  report_metrics(table, query_codes, queries.labels, db.labels, args);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted binary hashing: large-margin training on triplet "
               "constraints with column generation, weighted Hamming retrieval "
               "and evaluation"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "learn a hash model from labeled CSV");
  std::string train_data, train_out, loss_name = "sqhinge", reg_name = "l1",
                                     family = "linear", pairing = "cross";
  TrainConfig cfg;
  std::size_t train_K = 10;
  train_cmd->add_option("--data", train_data, "training CSV")->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_out, "model file to write")->required();
  train_cmd->add_option("--bits", cfg.bits, "code length")->check(CLI::PositiveNumber);
  train_cmd->add_option("--loss", loss_name, "hinge|sqhinge|logistic|exp")
      ->check(CLI::IsMember({"hinge", "sqhinge", "logistic", "exp"}));
  train_cmd->add_option("--reg", reg_name, "l1|linf|duplet")
      ->check(CLI::IsMember({"l1", "linf", "duplet"}));
  train_cmd->add_option("--C", cfg.C, "regularization trade-off")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--Cprime", cfg.C_prime, "weight cap for --reg linf")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--family", family, "linear|stump")
      ->check(CLI::IsMember({"linear", "stump"}));
  train_cmd->add_option("--multistart", cfg.multistart,
                        "random starts for the linear subproblem")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", cfg.seed, "random seed");
  train_cmd->add_option("--K", train_K, "neighbors per anchor for triplets")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--pairing", pairing, "cross|matched")
      ->check(CLI::IsMember({"cross", "matched"}));

  // encode
  auto* encode_cmd = app.add_subcommand("encode", "write binary codes for a CSV");
  std::string enc_model, enc_data, enc_out;
  encode_cmd->add_option("--model", enc_model, "model file")->required()
      ->check(CLI::ExistingFile);
  encode_cmd->add_option("--data", enc_data, "CSV to encode")->required()
      ->check(CLI::ExistingFile);
  encode_cmd->add_option("--out", enc_out, "codes file (default stdout)");

  // query
  auto* query_cmd = app.add_subcommand("query", "ranked nearest neighbors per query");
  std::string q_model, q_db, q_queries, q_out;
  std::size_t q_k = 10;
  query_cmd->add_option("--model", q_model, "model file")->required()
      ->check(CLI::ExistingFile);
  query_cmd->add_option("--db", q_db, "database CSV")->required()
      ->check(CLI::ExistingFile);
  query_cmd->add_option("--queries", q_queries, "query CSV")->required()
      ->check(CLI::ExistingFile);
  query_cmd->add_option("--k-retrieve", q_k, "results per query")
      ->check(CLI::PositiveNumber);
  query_cmd->add_option("--out", q_out, "output file (default stdout)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "retrieval and classification metrics");
  std::string eval_model;
  CommonEvalArgs eval_args;
  eval_cmd->add_option("--model", eval_model, "model file")->required()
      ->check(CLI::ExistingFile);
  add_eval_flags(eval_cmd, eval_args);

  // lsh
  auto* lsh_cmd = app.add_subcommand("lsh", "random-projection baseline metrics");
  CommonEvalArgs lsh_args;
  std::size_t lsh_bits = 0;
  std::uint64_t lsh_seed = 0;
  lsh_cmd->add_option("--bits", lsh_bits, "code length")->required();
  lsh_cmd->add_option("--seed", lsh_seed, "random seed");
  add_eval_flags(lsh_cmd, lsh_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (train_cmd->parsed()) {
      TrainConfig run_cfg = cfg;
      run_cfg.loss = loss_from_name(loss_name);
      run_cfg.reg = regularizer_from_name(reg_name);
      run_cfg.family = family_from_name(family);
      return run_train(train_data, train_out, run_cfg, train_K, pairing);
    }
    if (encode_cmd->parsed()) return run_encode(enc_model, enc_data, enc_out);
    if (query_cmd->parsed()) return run_query(q_model, q_db, q_queries, q_k, q_out);
    if (eval_cmd->parsed()) return run_eval(eval_model, eval_args);
    if (lsh_cmd->parsed()) {
      if (lsh_bits < 1) {
        std::cerr << "error: lsh needs at least one bit\n";
        return 2;
      }
      return run_lsh(lsh_args, lsh_bits, lsh_seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
