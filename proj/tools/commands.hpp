#pragma once

// Command implementations behind the `sorites` CLI. Each command writes to the
// given streams and returns the process exit code:
//   0  the expected outcome (all requested assumptions hold, derivation
//      confirmed, enumeration as predicted)
//   1  an assumption or premise fails
//   2  input error (bad arguments, unparsable or invalid model file)
//   3  output path not writable

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "sorites/sorites.hpp"

namespace sorites::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitOutput = 3;

struct CommonOptions {
  io::NumericMode mode = io::NumericMode::Auto;
  std::optional<std::string> tolerance;
  std::optional<std::string> out;
};

/// Exact value of a decimal literal such as "0.002" or "1e-9".
inline Rational decimal_to_rational(const std::string& text) {
  if (text.find('/') != std::string::npos) return ScalarTraits<Rational>::parse(text);
  std::string mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string::npos) {
    mantissa = text.substr(0, e);
    try {
      exponent = std::stol(text.substr(e + 1));
    } catch (const std::exception&) {
      throw Error(Errc::ParseError, "bad exponent in '" + text + "'");
    }
  }
  std::string digits;
  long fraction_digits = 0;
  bool seen_point = false;
  bool negative = false;
  for (std::size_t i = 0; i < mantissa.size(); ++i) {
    const char c = mantissa[i];
    if (i == 0 && (c == '-' || c == '+')) {
      negative = c == '-';
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits += c;
      if (seen_point) ++fraction_digits;
    } else {
      throw Error(Errc::ParseError, "not a decimal literal: '" + text + "'");
    }
  }
  if (digits.empty()) throw Error(Errc::ParseError, "not a decimal literal: '" + text + "'");
  Rational v{boost::multiprecision::cpp_int(digits)};
  const long shift = exponent - fraction_digits;
  const Rational ten(10);
  for (long i = 0; i < std::abs(shift); ++i) v = shift > 0 ? Rational(v * ten) : Rational(v / ten);
  return negative ? Rational(-v) : v;
}

template <Scalar T>
T tolerance_for(const CommonOptions& opt) {
  if (!opt.tolerance) return ScalarTraits<T>::default_tolerance();
  T tol;
  if constexpr (ScalarTraits<T>::exact)
    tol = decimal_to_rational(*opt.tolerance);
  else
    tol = ScalarTraits<double>::parse(*opt.tolerance);
  if (tol < 0) throw Error(Errc::ParseError, "tolerance must be non-negative");
  return tol;
}

/// Writes `content` to `path`; false when the path cannot be written.
inline bool write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) return false;
  f << content;
  return static_cast<bool>(f.flush());
}

template <Scalar T>
void print_verdict(std::ostream& out, const AssumptionVerdict<T>& v) {
  out << to_string(v.assumption) << ": " << (v.holds ? "holds" : "fails") << "\n";
  for (const auto& w : v.witnesses) {
    out << "  witness:";
    if (w.where.pair) out << " pair " << detail::pair_str(*w.where.pair);
    if (w.where.lambda) out << " lambda " << *w.where.lambda;
    out << ": " << w.where.detail << ": " << ScalarTraits<T>::format(w.lhs) << " vs " << ScalarTraits<T>::format(w.rhs)
        << "\n";
  }
}

inline int cmd_chain_report(int n, bool simplified, const std::optional<std::string>& out_path, std::ostream& out,
                            std::ostream& err) {
  std::string csv;
  try {
    csv = io::chain_report_csv(n, simplified);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitInput;
  }
  if (!out_path) {
    out << csv;
    return kExitOk;
  }
  if (!write_file(*out_path, csv)) {
    err << "cannot write " << *out_path << "\n";
    return kExitOutput;
  }
  return kExitOk;
}

namespace detail {

/// QM reference surface on the model's chain, in the model's scalar when
/// representable.
template <Scalar T>
SurfaceModel<T> reference_surface(const ChainSpec& chain, bool simplified) {
  return qm_surface_model<T>(chain, simplified);
}

template <Scalar T>
std::optional<AssumptionVerdict<T>> run_check(const HiddenModel<T>& model, Assumption a, const T& tol,
                                              bool simplified_reference) {
  switch (a) {
    case Assumption::WeakSurfaceAutonomy: return check_weak_surface_autonomy(model, tol);
    case Assumption::SurfaceLocality: return check_surface_locality(model.surface(), tol);
    case Assumption::WeakHA: return check_weak_hidden_autonomy(model, tol);
    case Assumption::HA: return check_hidden_autonomy(model, tol);
    case Assumption::PI: return check_parameter_independence(model, tol);
    case Assumption::OI: return check_outcome_independence(model, tol);
    case Assumption::ImprovedPredictions: return check_improved_predictions(model, tol);
    case Assumption::QMAgreement:
      return check_qm_agreement(model, reference_surface<T>(model.chain(), simplified_reference), tol);
  }
  return std::nullopt;
}

}  // namespace detail

inline int cmd_check(const std::string& model_path, const std::vector<std::string>& names, bool simplified_reference,
                     const CommonOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<Assumption> requested;
  for (const auto& n : names) {
    auto a = assumption_from_string(n);
    if (!a) {
      err << "unknown assumption '" << n << "'\n";
      return kExitInput;
    }
    requested.push_back(*a);
  }
  std::optional<io::LoadedModel> loaded;
  try {
    loaded.emplace(io::load_model_file(model_path, opt.mode));
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitInput;
  }
  return std::visit(
      [&]<class T>(const HiddenModel<T>& model) {
        T tol;
        try {
          tol = tolerance_for<T>(opt);
        } catch (const Error& e) {
          err << e.what() << "\n";
          return kExitInput;
        }
        bool all = true;
        std::vector<AssumptionVerdict<T>> verdicts;
        for (auto a : requested) {
          try {
            auto v = detail::run_check(model, a, tol, simplified_reference);
            print_verdict(out, *v);
            all = all && v->holds;
            verdicts.push_back(std::move(*v));
          } catch (const Error& e) {
            if (e.code() == Errc::NotExactlyRepresentable) {
              err << e.what() << " (use --mode float)\n";
              return kExitInput;
            }
            out << to_string(a) << ": undefined (" << e.what() << ")\n";
            all = false;
          }
        }
        if (opt.out && !write_file(*opt.out, io::check_report_json(verdicts).dump(2) + "\n")) {
          err << "cannot write " << *opt.out << "\n";
          return kExitOutput;
        }
        return all ? kExitOk : kExitFailed;
      },
      loaded->model);
}

inline int cmd_theorem(const std::string& model_path, const std::string& which, const CommonOptions& opt,
                       std::ostream& out, std::ostream& err) {
  if (which != "stronger" && which != "bell") {
    err << "theorem must be 'stronger' or 'bell'\n";
    return kExitInput;
  }
  std::optional<io::LoadedModel> loaded;
  try {
    loaded.emplace(io::load_model_file(model_path, opt.mode));
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitInput;
  }
  return std::visit(
      [&]<class T>(const HiddenModel<T>& model) {
        try {
          const T tol = tolerance_for<T>(opt);
          const auto report = which == "stronger" ? run_stronger_theorem(model, tol) : run_bell_corollary(model, tol);
          for (const auto& s : report.trace) out << s.rule << ": " << s.statement << "\n";
          if (opt.out && !write_file(*opt.out, io::to_json(report).dump(2) + "\n")) {
            err << "cannot write " << *opt.out << "\n";
            return kExitOutput;
          }
          return report.conclusion.kind == ConclusionKind::ContradictionEstablished ? kExitOk : kExitFailed;
        } catch (const Error& e) {
          err << e.what() << "\n";
          return kExitInput;
        }
      },
      loaded->model);
}

inline int cmd_strategies(int n, std::ostream& out, std::ostream& err) {
  try {
    const auto chain = build_chain(n);
    const auto count = strategy_count(chain);
    const auto floor = local_min_total_failure(chain);
    out << "strategies," << count << " min_broken," << floor.str() << "\n";
    out << "qm_expected_failures," << io::csv_number(qm_expected_failures<double>(chain)) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitInput;
  }
}

inline int cmd_ghz(const std::string& sub, std::ostream& out, std::ostream& err) {
  if (sub == "enumerate") {
    const auto r = enumerate_ghz_assignments();
    out << "satisfying," << r.satisfying << " total," << r.total << "\n";
    return r.satisfying == 0 ? kExitOk : kExitFailed;
  }
  if (sub == "verify") {
    const auto qm = check_ghz_correlations(ghz_qm_surface_model<Rational>());
    const auto qm_loc = check_ghz_surface_locality(ghz_qm_surface_model<Rational>());
    const auto report = check_no_sorites_ghz<Rational>();
    out << "qm correlations: " << (qm.holds ? "holds" : "fails") << "\n";
    out << "qm surface locality: " << (qm_loc.holds ? "holds" : "fails") << "\n";
    out << "counterexample correlations: " << (report.correlations.holds ? "holds" : "fails") << "\n";
    out << "counterexample surface locality: " << (report.locality.holds ? "holds" : "fails") << "\n";
    out << "counterexample P(X=1|A=1)," << report.x_given_a1.str() << " P(X=1|A=2)," << report.x_given_a2.str() << "\n";
    out << "residual chain:";
    for (const auto& e : report.residual_chain.entries) out << " " << e.label << "=" << ScalarTraits<Rational>::format(e.value);
    out << "\n";
    out << "photon chain with P(X=1|A=30)=1: " << (report.photon_chain_pin_infeasible ? "infeasible" : "feasible") << "\n";
    out << "no sorites chain in GHZ: " << (report.no_sorites ? "established" : "not established") << "\n";
    return qm.holds && qm_loc.holds && report.no_sorites && report.photon_chain_pin_infeasible ? kExitOk : kExitFailed;
  }
  if (sub == "counterexample") {
    const auto model = build_ghz_counterexample<Rational>();
    out << "setting,x,y,z,p\n";
    for (const auto& [s, t] : model.tables())
      for (const auto& [a, w] : t.table())
        out << ghz_setting_str(s) << "," << a[0] << "," << a[1] << "," << a[2] << "," << ScalarTraits<Rational>::format(w)
            << "\n";
    const auto corr = check_ghz_correlations(model);
    const auto loc = check_ghz_surface_locality(model);
    print_verdict(out, corr);
    print_verdict(out, loc);
    return corr.holds && loc.holds ? kExitOk : kExitFailed;
  }
  err << "ghz subcommand must be verify, enumerate or counterexample\n";
  return kExitInput;
}

/// "(30,0)" in degrees, mapped to angle indices of the chain.
inline SettingPair parse_pair_degrees(const std::string& text, const ChainSpec& chain) {
  std::string s;
  for (char c : text)
    if (c != '(' && c != ')' && c != ' ') s += c;
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw Error(Errc::ParseError, "pair must look like (a,b) in degrees");
  auto to_index = [&](const std::string& deg) {
    const Rational d = decimal_to_rational(deg);
    const Rational k = d * chain.n_links() / 90;
    if (boost::multiprecision::denominator(k) != 1)
      throw Error(Errc::UnknownSettingPair, deg + " degrees is not a multiple of the chain step");
    return static_cast<int>(boost::multiprecision::numerator(k));
  };
  return {to_index(s.substr(0, comma)), to_index(s.substr(comma + 1))};
}

inline int cmd_simulate(const std::string& model_path, const std::string& pair_text, std::uint64_t trials,
                        std::uint64_t seed, const CommonOptions& opt, std::ostream& out, std::ostream& err) {
  std::optional<io::LoadedModel> loaded;
  try {
    loaded.emplace(io::load_model_file(model_path, opt.mode));
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitInput;
  }
  return std::visit(
      [&]<class T>(const HiddenModel<T>& model) {
        try {
          const auto pair = parse_pair_degrees(pair_text, model.chain());
          const auto summary = sample_runs(model.surface(), pair, trials, seed);
          std::string csv = "alice_degrees,bob_degrees,trials,seed,n00,n01,n10,n11,matches,mismatches\n";
          csv += io::csv_number(model.chain().angle(pair.alice).to_double()) + "," +
                 io::csv_number(model.chain().angle(pair.bob).to_double()) + "," + std::to_string(summary.trials) + "," +
                 std::to_string(seed);
          for (auto c : summary.cells) csv += "," + std::to_string(c);
          csv += "," + std::to_string(summary.matches()) + "," + std::to_string(summary.mismatches()) + "\n";
          if (opt.out) {
            if (!write_file(*opt.out, csv)) {
              err << "cannot write " << *opt.out << "\n";
              return kExitOutput;
            }
          } else {
            out << csv;
          }
          return kExitOk;
        } catch (const Error& e) {
          err << e.what() << "\n";
          return kExitInput;
        }
      },
      loaded->model);
}

/// Ready-made model files for the documented scenarios.
inline int cmd_emit_model(const std::string& kind, int n, const std::optional<std::string>& out_path,
                          std::ostream& out, std::ostream& err) {
  std::string text;
  try {
    const auto chain = build_chain(n);
    if (kind == "trivial-lift") {
      text = io::write_model(trivial_lift(qm_surface_model<Rational>(chain, true)),
                             "simplified QM surface lifted with a single hidden member");
    } else if (kind == "qm-full") {
      const auto d = chain.delta_theta().degrees();
      if (d == 30)
        text = io::write_model(trivial_lift(qm_surface_model<Rational>(chain, false)), "full QM surface, single hidden member");
      else
        text = io::write_model(trivial_lift(qm_surface_model<double>(chain, false)), "full QM surface, single hidden member");
    } else if (kind == "deterministic") {
      std::vector<DeterministicStrategy> best;
      for (const auto& s : enumerate_strategies(chain))
        if (broken_links(s, chain).count == 1) best.push_back(s);
      text = io::write_model(strategy_mixture_model(chain, best),
                             "uniform mixture of deterministic strategies breaking exactly one link");
    } else if (kind == "strictness-weak-ha") {
      if (n != 3) throw Error(Errc::InvalidModel, "strictness witnesses are stored for N = 3");
      text = io::write_model(strictness_witnesses().weak_ha_not_ha, "Weak H.A. holds, H.A. fails");
    } else if (kind == "strictness-ip") {
      if (n != 3) throw Error(Errc::InvalidModel, "strictness witnesses are stored for N = 3");
      text = io::write_model(strictness_witnesses().ip_not_oi, "Improved Predictions holds, O.I. fails");
    } else if (kind == "zero-dashed") {
      std::vector<HiddenBlock<Rational>> blocks;
      const auto solid = chain.solid_links();
      for (const auto& p : solid)
        blocks.push_back({0, p, Rational(1, static_cast<long long>(solid.size())),
                          {Rational(1, 2), Rational(0), Rational(0), Rational(1, 2)}});
      text = io::write_model(make_hidden_model(chain, {0}, blocks), "dashed setting pair never chosen");
    } else {
      err << "unknown model kind '" << kind << "'\n";
      return kExitInput;
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitInput;
  }
  if (!out_path) {
    out << text;
    return kExitOk;
  }
  if (!write_file(*out_path, text)) {
    err << "cannot write " << *out_path << "\n";
    return kExitOutput;
  }
  return kExitOk;
}

}  // namespace sorites::cli
