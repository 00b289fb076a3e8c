#pragma once

// Model files, report files and plot data.
//
// Model file ("sorites-model/1"), JSON:
//   {
//     "format": "sorites-model/1",
//     "metadata": {"chain_n": 3, "description": "..."},
//     "schema": [{"name": "lambda", "domain": [0, 1]}, {"name": "A", "domain": [1, 3]}, ...],
//     "weights": [
//       {"at": [0, 1, 0, 0, 0], "p": "1/16"},
//       ...
//     ]
//   }
// Variables are lambda, A, B, X, Y in that order (lambda may be omitted for a
// surface model; it is then read as a single hidden member 0). A and B values
// are angle indices in multiples of 90/N degrees. Weights are "num/den"
// strings in exact mode; a decimal string or JSON number anywhere makes the
// file a floating-mode file.
//
// Report file ("sorites-report/1"): verdicts and derivation traces, with all
// probabilities as strings in the same notation.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "sorites/assumptions.hpp"
#include "sorites/chain.hpp"
#include "sorites/error.hpp"
#include "sorites/local_strategies.hpp"
#include "sorites/models.hpp"
#include "sorites/scalar.hpp"
#include "sorites/theorems.hpp"

namespace sorites::io {

using json = nlohmann::json;

inline constexpr const char* kModelFormat = "sorites-model/1";
inline constexpr const char* kReportFormat = "sorites-report/1";

enum class NumericMode { Auto, Exact, Float };

using AnyHiddenModel = std::variant<HiddenModel<Rational>, HiddenModel<double>>;

struct LoadedModel {
  int chain_n = 0;
  std::string description;
  AnyHiddenModel model;

  [[nodiscard]] bool floating() const noexcept { return std::holds_alternative<HiddenModel<double>>(model); }
};

namespace detail {

inline int line_at(std::string_view text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

/// Line of each element of the top-level "weights" array, by a raw scan that
/// tracks strings and nesting.
inline std::vector<int> weight_entry_lines(std::string_view text, int& weights_key_line) {
  std::vector<int> lines;
  weights_key_line = 1;
  const auto key = text.find("\"weights\"");
  if (key == std::string_view::npos) return lines;
  weights_key_line = line_at(text, key);
  auto i = text.find('[', key);
  if (i == std::string_view::npos) return lines;
  int depth = 0;
  bool in_string = false;
  bool expect_element = true;
  int line = line_at(text, i);
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') ++line;
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    if (c == '[' || c == '{') {
      if (depth == 1 && expect_element) {
        lines.push_back(line);
        expect_element = false;
      }
      ++depth;
      continue;
    }
    if (c == ']' || c == '}') {
      if (--depth == 0) break;
      continue;
    }
    if (depth == 1 && c == ',') expect_element = true;
  }
  return lines;
}

[[noreturn]] inline void fail_at(const std::string& source, int line, const std::string& what) {
  throw Error(Errc::ParseError, source + ":" + std::to_string(line) + ": " + what);
}

/// Re-raises a library error with its kind kept and the location prepended.
[[noreturn]] inline void fail_at(const std::string& source, int line, const Error& e) {
  std::string what = e.what();
  const auto prefix = std::string(to_string(e.code())) + ": ";
  if (what.starts_with(prefix)) what.erase(0, prefix.size());
  throw Error(e.code(), source + ":" + std::to_string(line) + ": " + what);
}

inline std::string weight_literal(const json& p) {
  if (p.is_string()) return p.get<std::string>();
  if (p.is_number_integer()) return std::to_string(p.get<long long>());
  if (p.is_number()) return ScalarTraits<double>::format(p.get<double>());
  throw Error(Errc::ParseError, "weight must be a string or number");
}

template <Scalar T>
HiddenModel<T> build_model(const ChainSpec& chain, VariableSchema schema,
                           std::vector<WeightedAssignment<T>> entries) {
  if (!schema.find(kLambda)) {
    std::vector<Variable> vars{{kLambda, {0}}};
    for (const auto& v : schema.variables()) vars.push_back(v);
    for (auto& e : entries) e.values.insert(e.values.begin(), 0);
    schema = VariableSchema(std::move(vars));
  }
  return HiddenModel<T>::make(chain, make_joint(std::move(schema), entries));
}

}  // namespace detail

/// Parses a model file. `source` names the file in error messages, which are
/// anchored to the offending line.
inline LoadedModel parse_model(std::string_view text, NumericMode mode = NumericMode::Auto,
                               const std::string& source = "<model>") {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    detail::fail_at(source, detail::line_at(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  int weights_line = 1;
  const auto entry_lines = detail::weight_entry_lines(text, weights_line);
  auto line_of_key = [&](const char* key) {
    const auto pos = text.find(std::string("\"") + key + "\"");
    return pos == std::string_view::npos ? 1 : detail::line_at(text, pos);
  };

  if (!doc.is_object() || doc.value("format", "") != kModelFormat)
    detail::fail_at(source, line_of_key("format"), std::string("format must be \"") + kModelFormat + "\"");

  int chain_n = 0;
  std::string description;
  try {
    const auto& meta = doc.at("metadata");
    chain_n = meta.at("chain_n").get<int>();
    description = meta.value("description", "");
  } catch (const json::exception& e) {
    detail::fail_at(source, line_of_key("metadata"), std::string("metadata: ") + e.what());
  }
  ChainSpec chain;
  try {
    chain = build_chain(chain_n);
  } catch (const Error& e) {
    detail::fail_at(source, line_of_key("chain_n"), e);
  }

  VariableSchema schema;
  try {
    std::vector<Variable> vars;
    for (const auto& v : doc.at("schema")) vars.push_back({v.at("name").get<std::string>(), v.at("domain").get<std::vector<Value>>()});
    schema = VariableSchema(std::move(vars));
  } catch (const json::exception& e) {
    detail::fail_at(source, line_of_key("schema"), std::string("schema: ") + e.what());
  } catch (const Error& e) {
    detail::fail_at(source, line_of_key("schema"), e);
  }

  struct RawEntry {
    Assignment at;
    std::string literal;
    int line;
  };
  std::vector<RawEntry> raw;
  bool any_decimal = false;
  const json* weights = nullptr;
  try {
    weights = &doc.at("weights");
  } catch (const json::exception&) {
    detail::fail_at(source, weights_line, "missing \"weights\"");
  }
  if (!weights->is_array()) detail::fail_at(source, weights_line, "\"weights\" must be an array");
  for (std::size_t i = 0; i < weights->size(); ++i) {
    const int line = i < entry_lines.size() ? entry_lines[i] : weights_line;
    try {
      const auto& e = (*weights)[i];
      RawEntry r{e.at("at").get<Assignment>(), detail::weight_literal(e.at("p")), line};
      any_decimal = any_decimal || is_decimal_literal(r.literal) || !e.at("p").is_string();
      raw.push_back(std::move(r));
    } catch (const json::exception& ex) {
      detail::fail_at(source, line, std::string("weight entry: ") + ex.what());
    } catch (const Error& ex) {
      detail::fail_at(source, line, ex);
    }
  }
  if (mode == NumericMode::Exact && any_decimal)
    detail::fail_at(source, weights_line, "decimal weights are not allowed in exact mode");
  const bool floating = mode == NumericMode::Float || (mode == NumericMode::Auto && any_decimal);

  auto load = [&]<class T>(std::type_identity<T>) -> HiddenModel<T> {
    std::vector<WeightedAssignment<T>> entries;
    for (const auto& r : raw) {
      try {
        entries.push_back({r.at, ScalarTraits<T>::parse(r.literal)});
      } catch (const Error& e) {
        detail::fail_at(source, r.line, e);
      }
    }
    try {
      return detail::build_model<T>(chain, schema, std::move(entries));
    } catch (const Error& e) {
      // Point entry-level failures at their entry where possible.
      int line = weights_line;
      if (e.code() == Errc::UnknownVariableOrValue || e.code() == Errc::NegativeWeight ||
          e.code() == Errc::DuplicateAssignment) {
        std::set<Assignment> seen;
        for (const auto& r : raw) {
          const bool bad_arity = r.at.size() != schema.size();
          bool bad_value = false;
          for (std::size_t k = 0; !bad_arity && k < r.at.size(); ++k) bad_value = bad_value || !schema.admits(k, r.at[k]);
          const bool negative = !r.literal.empty() && r.literal.front() == '-';
          const bool duplicate = !seen.insert(r.at).second;
          if (bad_arity || bad_value || negative || duplicate) {
            line = r.line;
            break;
          }
        }
      }
      detail::fail_at(source, line, e);
    }
  };
  if (floating) return {chain_n, std::move(description), load(std::type_identity<double>{})};
  return {chain_n, std::move(description), load(std::type_identity<Rational>{})};
}

inline LoadedModel load_model_file(const std::string& path, NumericMode mode = NumericMode::Auto) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str(), mode, path);
}

/// One weight entry per line.
template <Scalar T>
std::string write_model(const HiddenModel<T>& model, const std::string& description) {
  json meta = {{"chain_n", model.chain().n_links()}, {"description", description}};
  json schema = json::array();
  for (const auto& v : model.joint().schema().variables()) schema.push_back({{"name", v.name}, {"domain", v.domain}});
  std::string s = "{\n";
  s += "  \"format\": \"" + std::string(kModelFormat) + "\",\n";
  s += "  \"metadata\": " + meta.dump() + ",\n";
  s += "  \"schema\": " + schema.dump() + ",\n";
  s += "  \"weights\": [\n";
  std::size_t i = 0;
  for (const auto& [a, w] : model.joint().table()) {
    json e = {{"at", a}, {"p", ScalarTraits<T>::format(w)}};
    s += "    " + e.dump() + (++i < model.joint().table().size() ? ",\n" : "\n");
  }
  s += "  ]\n}\n";
  return s;
}

// ---------------------------------------------------------------------------
// Reports

template <Scalar T>
json to_json(const AssumptionVerdict<T>& v) {
  json ws = json::array();
  for (const auto& w : v.witnesses) {
    json j;
    j["pair"] = w.where.pair ? json::array({w.where.pair->alice, w.where.pair->bob}) : json(nullptr);
    j["lambda"] = w.where.lambda ? json(*w.where.lambda) : json(nullptr);
    j["detail"] = w.where.detail;
    j["lhs"] = ScalarTraits<T>::format(w.lhs);
    j["rhs"] = ScalarTraits<T>::format(w.rhs);
    ws.push_back(std::move(j));
  }
  return {{"assumption", std::string(to_string(v.assumption))}, {"holds", v.holds}, {"witnesses", std::move(ws)}};
}

template <Scalar T>
AssumptionVerdict<T> verdict_from_json(const json& j) {
  AssumptionVerdict<T> v;
  const auto a = assumption_from_string(j.at("assumption").get<std::string>());
  if (!a) throw Error(Errc::ParseError, "unknown assumption '" + j.at("assumption").get<std::string>() + "'");
  v.assumption = *a;
  v.holds = j.at("holds").get<bool>();
  for (const auto& w : j.at("witnesses")) {
    Witness<T> x;
    if (!w.at("pair").is_null()) x.where.pair = SettingPair{w.at("pair")[0].get<int>(), w.at("pair")[1].get<int>()};
    if (!w.at("lambda").is_null()) x.where.lambda = w.at("lambda").get<Value>();
    x.where.detail = w.at("detail").get<std::string>();
    x.lhs = ScalarTraits<T>::parse(w.at("lhs").get<std::string>());
    x.rhs = ScalarTraits<T>::parse(w.at("rhs").get<std::string>());
    v.witnesses.push_back(std::move(x));
  }
  return v;
}

inline std::string owner_str(Owner o) {
  return o == Owner::Bob ? "bob" : o == Owner::Alice ? "alice" : "other";
}
inline Owner owner_from(const std::string& s) {
  if (s == "bob") return Owner::Bob;
  if (s == "alice") return Owner::Alice;
  if (s == "other") return Owner::Other;
  throw Error(Errc::ParseError, "unknown owner '" + s + "'");
}

template <Scalar T>
json to_json(const DerivationReport<T>& r) {
  json verdicts = json::array();
  for (const auto& v : r.premise_verdicts) verdicts.push_back(to_json(v));
  json marginals = json::array();
  for (const auto& [lambda, m] : r.per_lambda_marginals) {
    json entries = json::array();
    for (const auto& e : m.entries)
      entries.push_back({{"owner", owner_str(e.owner)},
                         {"index", e.index},
                         {"label", e.label},
                         {"value", ScalarTraits<T>::format(e.value)}});
    marginals.push_back({{"lambda", lambda}, {"entries", std::move(entries)}});
  }
  json trace = json::array();
  for (const auto& s : r.trace) trace.push_back({{"rule", s.rule}, {"statement", s.statement}});
  json conclusion = {
      {"kind", r.conclusion.kind == ConclusionKind::ContradictionEstablished ? "ContradictionEstablished" : "PremiseFailed"},
      {"failed", r.conclusion.failed ? json(std::string(to_string(*r.conclusion.failed))) : json(nullptr)},
      {"label", r.conclusion.label}};
  return {{"format", kReportFormat},
          {"kind", "derivation"},
          {"numeric", ScalarTraits<T>::exact ? "exact" : "float"},
          {"theorem", std::string(to_string(r.theorem))},
          {"premise_verdicts", std::move(verdicts)},
          {"per_lambda_marginals", std::move(marginals)},
          {"conclusion", std::move(conclusion)},
          {"trace", std::move(trace)}};
}

template <Scalar T>
DerivationReport<T> derivation_from_json(const json& j) {
  if (j.value("format", "") != kReportFormat || j.value("kind", "") != "derivation")
    throw Error(Errc::ParseError, "not a derivation report");
  DerivationReport<T> r;
  const auto theorem = j.at("theorem").get<std::string>();
  if (theorem != "stronger" && theorem != "bell") throw Error(Errc::ParseError, "unknown theorem '" + theorem + "'");
  r.theorem = theorem == "stronger" ? TheoremKind::StrongerTheorem : TheoremKind::BellCorollary;
  for (const auto& v : j.at("premise_verdicts")) r.premise_verdicts.push_back(verdict_from_json<T>(v));
  for (const auto& m : j.at("per_lambda_marginals")) {
    ChainMarginals<T> cm;
    for (const auto& e : m.at("entries"))
      cm.entries.push_back({owner_from(e.at("owner").get<std::string>()), e.at("index").get<int>(),
                            e.at("label").get<std::string>(), ScalarTraits<T>::parse(e.at("value").get<std::string>())});
    r.per_lambda_marginals.emplace(m.at("lambda").get<Value>(), std::move(cm));
  }
  const auto& c = j.at("conclusion");
  const auto kind = c.at("kind").get<std::string>();
  if (kind != "ContradictionEstablished" && kind != "PremiseFailed") throw Error(Errc::ParseError, "unknown conclusion '" + kind + "'");
  r.conclusion.kind = kind == "PremiseFailed" ? ConclusionKind::PremiseFailed : ConclusionKind::ContradictionEstablished;
  if (!c.at("failed").is_null()) {
    const auto a = assumption_from_string(c.at("failed").get<std::string>());
    if (!a) throw Error(Errc::ParseError, "unknown assumption in conclusion");
    r.conclusion.failed = *a;
  }
  r.conclusion.label = c.at("label").get<std::string>();
  for (const auto& s : j.at("trace")) r.trace.push_back({s.at("rule").get<std::string>(), s.at("statement").get<std::string>()});
  return r;
}

template <Scalar T>
json check_report_json(const std::vector<AssumptionVerdict<T>>& verdicts) {
  json vs = json::array();
  for (const auto& v : verdicts) vs.push_back(to_json(v));
  return {{"format", kReportFormat},
          {"kind", "check"},
          {"numeric", ScalarTraits<T>::exact ? "exact" : "float"},
          {"verdicts", std::move(vs)}};
}

template <Scalar T>
std::vector<AssumptionVerdict<T>> check_report_from_json(const json& j) {
  if (j.value("format", "") != kReportFormat || j.value("kind", "") != "check")
    throw Error(Errc::ParseError, "not a check report");
  std::vector<AssumptionVerdict<T>> out;
  for (const auto& v : j.at("verdicts")) out.push_back(verdict_from_json<T>(v));
  return out;
}

// ---------------------------------------------------------------------------
// Plot data

/// Decimal with at least one fractional digit ("1.0", "0.5", "0.0012179...").
inline std::string csv_number(double v) {
  std::string s = ScalarTraits<double>::format(v);
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos &&
      s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

/// Mismatch curve at 1 degree steps plus a summary block for an N-link chain.
inline std::string chain_report_csv(int n_links, bool simplified) {
  const auto chain = build_chain(n_links);
  std::string s = "delta_theta_degrees,qm_mismatch,simplified_mismatch\n";
  for (int d = 0; d <= 90; ++d) {
    const Angle a{Rational(d)};
    s += std::to_string(d) + "," + csv_number(mismatch_probability<double>(a)) + "," +
         csv_number(simplified_mismatch<double>(a)) + "\n";
  }
  const double no_break = simplified ? 1.0 : prob_no_link_broken<double>(n_links);
  const double expected = simplified ? 0.0 : qm_expected_failures<double>(chain);
  s += "\n";
  s += "summary,value\n";
  s += std::string("mode,") + (simplified ? "simplified" : "full") + "\n";
  s += "N," + std::to_string(n_links) + "\n";
  s += "delta_theta_degrees," + csv_number(chain.delta_theta().to_double()) + "\n";
  s += "experiments," + std::to_string(chain.experiment_count()) + "\n";
  s += "prob_no_link_broken," + csv_number(no_break) + "\n";
  s += "qm_expected_failures," + csv_number(expected) + "\n";
  s += "local_floor,1\n";
  return s;
}

}  // namespace sorites::io
