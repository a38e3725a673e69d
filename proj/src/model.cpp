#include "cghash/model.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cghash/error.hpp"

namespace cghash {

const char* regularizer_name(Regularizer r) {
  switch (r) {
    case Regularizer::l1: return "l1";
    case Regularizer::linf: return "linf";
    case Regularizer::duplet_weighted_l1: return "duplet";
  }
  return "?";
}

Regularizer regularizer_from_name(const std::string& name) {
  if (name == "l1") return Regularizer::l1;
  if (name == "linf") return Regularizer::linf;
  if (name == "duplet") return Regularizer::duplet_weighted_l1;
  throw ConfigError("unknown regularizer '" + name + "'");
}

const char* family_name(HashFamily f) {
  return f == HashFamily::linear ? "linear" : "stump";
}

HashFamily family_from_name(const std::string& name) {
  if (name == "linear") return HashFamily::linear;
  if (name == "stump") return HashFamily::stump;
  throw ConfigError("unknown hash family '" + name + "'");
}

void TrainConfig::validate() const {
  if (bits < 1) throw ConfigError("bits must be at least 1");
  if (C <= 0.0) throw ConfigError("C must be positive");
  if (reg == Regularizer::linf && C_prime <= 0.0)
    throw ConfigError("Cprime must be positive");
  if (multistart < 1) throw ConfigError("multistart must be at least 1");
  if (max_primal_iters < 1) throw ConfigError("max_primal_iters must be at least 1");
  if (primal_tol <= 0.0) throw ConfigError("primal_tol must be positive");
  if (!is_smooth(loss))
    throw ConfigError("training requires a smooth loss (sqhinge, logistic or exp)");
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("model line " + std::to_string(line_no) + ": bad number '" +
                     std::string(field) + "'");
  return value;
}

template <typename Int>
Int parse_int(std::string_view field, std::size_t line_no) {
  Int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("model line " + std::to_string(line_no) + ": bad integer '" +
                     std::string(field) + "'");
  return value;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

constexpr const char* kMagic = "cghash-model v1";

}  // namespace

std::string model_to_string(const HashModel& model) {
  std::ostringstream out;
  out << kMagic << "\n";
  out << "bits " << model.bits() << "\n";
  out << "dim " << model.dim() << "\n";
  out << "loss " << loss_name(model.config.loss) << "\n";
  out << "reg " << regularizer_name(model.config.reg) << "\n";
  out << "C " << fmt(model.config.C) << "\n";
  out << "Cprime " << fmt(model.config.C_prime) << "\n";
  out << "family " << family_name(model.config.family) << "\n";
  out << "multistart " << model.config.multistart << "\n";
  out << "max_primal_iters " << model.config.max_primal_iters << "\n";
  out << "primal_tol " << fmt(model.config.primal_tol) << "\n";
  out << "seed " << model.config.seed << "\n";

  out << "mean";
  for (double v : model.feature_mean) out << ' ' << fmt(v);
  out << "\nstd";
  for (double v : model.feature_std) out << ' ' << fmt(v);
  out << "\nweights";
  for (double v : model.weights) out << ' ' << fmt(v);
  out << "\n";

  for (const auto& fn : model.functions) {
    if (const auto* lin = std::get_if<LinearHash>(&fn)) {
      out << "linear";
      for (double v : lin->v) out << ' ' << fmt(v);
      out << ' ' << fmt(lin->b) << "\n";
    } else {
      const auto& st = std::get<StumpHash>(fn);
      out << "stump " << st.feature << ' ' << fmt(st.threshold) << ' '
          << (st.polarity > 0 ? "1" : "-1") << "\n";
    }
  }
  return out.str();
}

HashModel model_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line))
      throw ParseError("model truncated after line " + std::to_string(line_no));
    ++line_no;
    return line;
  };

  if (next_line() != kMagic)
    throw ParseError("model line 1: expected '" + std::string(kMagic) + "'");

  HashModel model;
  std::size_t bits = 0, dim = 0;

  auto keyed = [&](const char* key) -> std::vector<std::string> {
    auto toks = split_ws(next_line());
    if (toks.empty() || toks[0] != key)
      throw ParseError("model line " + std::to_string(line_no) + ": expected '" +
                       key + "'");
    toks.erase(toks.begin());
    return toks;
  };
  auto keyed_one = [&](const char* key) -> std::string {
    auto toks = keyed(key);
    if (toks.size() != 1)
      throw ParseError("model line " + std::to_string(line_no) +
                       ": expected a single value for '" + std::string(key) + "'");
    return toks[0];
  };

  bits = parse_int<std::size_t>(keyed_one("bits"), line_no);
  dim = parse_int<std::size_t>(keyed_one("dim"), line_no);
  model.config.bits = static_cast<int>(bits);
  model.config.loss = loss_from_name(keyed_one("loss"));
  model.config.reg = regularizer_from_name(keyed_one("reg"));
  model.config.C = parse_double(keyed_one("C"), line_no);
  model.config.C_prime = parse_double(keyed_one("Cprime"), line_no);
  model.config.family = family_from_name(keyed_one("family"));
  model.config.multistart = parse_int<int>(keyed_one("multistart"), line_no);
  model.config.max_primal_iters = parse_int<int>(keyed_one("max_primal_iters"), line_no);
  model.config.primal_tol = parse_double(keyed_one("primal_tol"), line_no);
  model.config.seed = parse_int<std::uint64_t>(keyed_one("seed"), line_no);

  auto parse_vector = [&](const char* key, std::size_t count) {
    auto toks = keyed(key);
    if (toks.size() != count)
      throw ParseError("model line " + std::to_string(line_no) + ": '" +
                       std::string(key) + "' expects " + std::to_string(count) +
                       " values, got " + std::to_string(toks.size()));
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = parse_double(toks[i], line_no);
    return out;
  };

  model.feature_mean = parse_vector("mean", dim);
  model.feature_std = parse_vector("std", dim);
  model.weights = parse_vector("weights", bits);

  for (std::size_t j = 0; j < bits; ++j) {
    auto toks = split_ws(next_line());
    if (toks.empty())
      throw ParseError("model line " + std::to_string(line_no) + ": empty function line");
    if (toks[0] == "linear") {
      if (toks.size() != dim + 2)
        throw ParseError("model line " + std::to_string(line_no) + ": linear expects " +
                         std::to_string(dim + 1) + " reals");
      LinearHash h;
      h.v.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) h.v[i] = parse_double(toks[1 + i], line_no);
      h.b = parse_double(toks[dim + 1], line_no);
      model.functions.push_back(std::move(h));
    } else if (toks[0] == "stump") {
      if (toks.size() != 4)
        throw ParseError("model line " + std::to_string(line_no) +
                         ": stump expects feature, threshold, polarity");
      StumpHash h;
      h.feature = parse_int<std::size_t>(toks[1], line_no);
      h.threshold = parse_double(toks[2], line_no);
      int pol = parse_int<int>(toks[3], line_no);
      if (pol != 1 && pol != -1)
        throw ParseError("model line " + std::to_string(line_no) + ": polarity must be 1 or -1");
      h.polarity = pol;
      if (h.feature >= dim)
        throw ParseError("model line " + std::to_string(line_no) + ": stump feature out of range");
      model.functions.push_back(h);
    } else {
      throw ParseError("model line " + std::to_string(line_no) +
                       ": unknown hash function kind '" + toks[0] + "'");
    }
  }
  return model;
}

void save_model(const HashModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << model_to_string(model);
  if (!out) throw ParseError("failed writing '" + path + "'");
}

HashModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_string(buf.str());
}

}  // namespace cghash
