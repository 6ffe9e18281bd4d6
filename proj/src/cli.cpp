#include "mmfloor/cli.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmfloor/domination.hpp"
#include "mmfloor/examples.hpp"
#include "mmfloor/lp.hpp"
#include "mmfloor/market_io.hpp"

namespace mmfloor {

namespace {

using nlohmann::json;

std::string show(const Rat& r) { return to_fraction(r) + " (~" + to_decimal(r) + ")"; }

std::string show_vector(const std::vector<Rat>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += to_fraction(v[i]);
  }
  return s + "]";
}

std::vector<Rat> parse_rat_list(const std::string& text) {
  std::vector<Rat> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
  if (out.empty()) throw std::invalid_argument("empty rational list");
  return out;
}

NFunction parse_phi_args(const std::string& knots_text, const std::string& slope,
                         const std::string& quad) {
  std::vector<std::pair<Rat, Rat>> knots;
  std::stringstream ss(knots_text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("knot '" + item + "' is not t:value");
    knots.emplace_back(parse_rational(item.substr(0, colon)),
                       parse_rational(item.substr(colon + 1)));
  }
  return NFunction(std::move(knots), parse_rational(slope), parse_rational(quad));
}

const char* mode_name(ConeMode mode) {
  switch (mode) {
    case ConeMode::Cone: return "cone";
    case ConeMode::Subspace: return "subspace";
    case ConeMode::ConeMinusPositives: return "cone_minus_positives";
  }
  return "?";
}

// Shared by `check` and the per-family analysis paths.
int analyze_market(const Market& market, bool machine, std::ostream& out) {
  json report;
  report["atoms"] = market.space->size();
  report["generators"] = market.cone.generators().size();
  report["mode"] = mode_name(market.cone.mode());

  const NoArbitrageResult na = no_arbitrage_check(market.cone);
  report["no_arbitrage"] = na.no_arbitrage;
  if (!na.no_arbitrage) {
    report["arbitrage_witness"] = to_fraction_vector(na.witness->values());
    report["result"] = "arbitrage detected";
    if (machine) {
      out << report.dump(2) << '\n';
    } else {
      out << "market: " << market.space->size() << " atoms, "
          << market.cone.generators().size() << " generators, mode "
          << mode_name(market.cone.mode()) << '\n'
          << "no-arbitrage: VIOLATED\n"
          << "arbitrage witness: " << show_vector(na.witness->values()) << '\n'
          << "result: arbitrage detected\n";
    }
    return 2;
  }

  const DominationReport dom = find_dominating_density(market.cone, market.f);
  std::optional<Rat> trunc_sup;
  std::string trunc_kind;
  if (market.truncation &&
      market.truncation->kind() != TruncationSpec::Kind::UnitBall) {
    trunc_kind = market.truncation->kind() == TruncationSpec::Kind::EpsSequence
                     ? "eps_sequence"
                     : "orlicz";
    trunc_sup = sup_over_truncation(market.cone, market.f, *market.truncation,
                                    market.witnesses)
                    .value;
  }

  const bool found = dom.dominating_g.has_value();
  report["sup_unbounded"] = dom.sup_unbounded;
  if (dom.sup_c1) report["sup_c1"] = to_fraction(*dom.sup_c1);
  if (found) {
    report["dominating_g"] = to_fraction_vector(dom.dominating_g->values());
    report["min_mass"] = to_fraction(*dom.min_mass);
    report["min_l1_norm"] = to_fraction(*dom.min_l1_norm);
  }
  if (dom.certificate) {
    report["certificate"] = to_fraction_vector(dom.certificate->values());
    report["certificate_pairing"] = to_fraction(*dom.certificate_pairing);
  }
  const bool duality = duality_check(market.cone, market.f);
  report["duality"] = duality;
  if (trunc_sup) {
    report["truncation_kind"] = trunc_kind;
    report["truncation_sup"] = to_fraction(*trunc_sup);
    report["truncation_candidates"] = market.witnesses.size();
  }
  report["result"] = found ? "dominating density exists" : "no dominating density";

  if (machine) {
    out << report.dump(2) << '\n';
  } else {
    out << "market: " << market.space->size() << " atoms, "
        << market.cone.generators().size() << " generators, mode "
        << mode_name(market.cone.mode()) << '\n'
        << "no-arbitrage: satisfied\n";
    if (dom.sup_unbounded)
      out << "sup over C1: unbounded\n";
    else
      out << "sup over C1: " << show(*dom.sup_c1) << '\n';
    if (found) {
      out << "dominating density: found\n"
          << "g: " << show_vector(dom.dominating_g->values()) << '\n'
          << "min mass: " << show(*dom.min_mass) << '\n'
          << "min l1 norm: " << show(*dom.min_l1_norm) << '\n';
    } else {
      out << "dominating density: none\n";
      if (dom.certificate) {
        out << "certificate in C1: " << show_vector(dom.certificate->values()) << '\n'
            << "certificate pairing: " << show(*dom.certificate_pairing) << '\n';
      }
    }
    out << "duality: " << (duality ? "consistent" : "INCONSISTENT") << '\n';
    if (trunc_sup)
      out << trunc_kind << " sup over " << market.witnesses.size()
          << " candidate(s): " << show(*trunc_sup) << '\n';
    out << "result: " << report["result"].get<std::string>() << '\n';
  }
  return found ? 0 : 1;
}

int run_sweep(ExampleKind kind, const Ex2DensityRule& rule, std::span<const int> levels,
              const Rat& threshold, bool machine, std::ostream& out) {
  SweepOptions options;
  options.divergence_threshold = threshold;
  const SweepResult sweep =
      truncation_sweep(kind, rule, TruncationSpec::unit_ball(), levels, options);
  if (machine) {
    json rows = json::array();
    for (const SweepRow& row : sweep.rows) {
      json r;
      r["level"] = row.level;
      if (row.sup) r["sup"] = to_fraction(*row.sup);
      if (row.min_l1) r["min_l1"] = to_fraction(*row.min_l1);
      rows.push_back(std::move(r));
    }
    out << json{{"rows", std::move(rows)},
                {"sup_diverging", sweep.sup_diverging},
                {"min_l1_diverging", sweep.min_l1_diverging}}
               .dump(2)
        << '\n';
  } else {
    out << "level | sup | min_l1\n";
    for (const SweepRow& row : sweep.rows) {
      out << row.level << " | " << (row.sup ? show(*row.sup) : "unbounded") << " | "
          << (row.min_l1 ? show(*row.min_l1) : "-") << '\n';
    }
    out << "sup diverging: " << (sweep.sup_diverging ? "yes" : "no") << '\n'
        << "min_l1 diverging: " << (sweep.min_l1_diverging ? "yes" : "no") << '\n';
  }
  return 0;
}

struct TraceGuard {
  explicit TraceGuard(std::ostream* os) { lp::set_trace_stream(os); }
  ~TraceGuard() { lp::set_trace_stream(nullptr); }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dominating martingale-density floor checks for finite atomic markets"};
  app.name("mmfloor");

  std::string format = "text";
  bool debug_lp = false;
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "machine"}));
  app.add_flag("--debug-lp", debug_lp, "Dump simplex tableaus to stderr");

  std::function<int()> action;

  // check ------------------------------------------------------------------
  auto* check = app.add_subcommand("check", "Analyze a market file");
  auto check_path = std::make_shared<std::string>();
  check->add_option("file", *check_path, "Market file (JSON)")->required();
  check->callback([&action, check_path, &format, &out]() {
    action = [check_path, &format, &out]() {
      const Market market = load_market(*check_path);
      return analyze_market(market, format == "machine", out);
    };
  });

  // examples ----------------------------------------------------------------
  auto* examples = app.add_subcommand("examples", "Build and analyze the market families");
  auto ex = std::make_shared<std::string>();
  auto level = std::make_shared<int>(4);
  auto rule_name = std::make_shared<std::string>("ones-odd");
  auto eps_text = std::make_shared<std::string>();
  auto sweep_range = std::make_shared<std::vector<int>>();
  auto dump_path = std::make_shared<std::string>();
  auto witness_beta = std::make_shared<std::string>();
  auto threshold = std::make_shared<std::string>("0");
  examples->add_option("kind", *ex, "example1 | example2 | example3")
      ->required()
      ->check(CLI::IsMember({"example1", "example2", "example3"}));
  examples->add_option("--level", *level, "Truncation level N >= 1");
  examples->add_option("--f", *rule_name, "Density rule for example2")
      ->check(CLI::IsMember({"ones-odd", "geometric-odd", "ones"}));
  examples->add_option("--eps", *eps_text, "Eps list for example1 (default 2^-n)");
  examples->add_option("--sweep", *sweep_range, "Run levels L1..L2")->expected(2);
  examples->add_option("--dump", *dump_path, "Write the market file");
  examples->add_option("--witness-beta", *witness_beta,
                       "Build the eps-truncation witness beating this bound (example3)");
  examples->add_option("--threshold", *threshold, "Divergence verdict threshold");
  examples->callback([&, ex, level, rule_name, eps_text, sweep_range, dump_path, witness_beta,
                      threshold]() {
    action = [&, ex, level, rule_name, eps_text, sweep_range, dump_path, witness_beta,
              threshold]() {
      const bool machine = format == "machine";
      if (*level < 1) throw std::invalid_argument("--level must be >= 1");
      Ex2DensityRule rule = ex2_rule_ones_odd();
      if (*rule_name == "geometric-odd") rule = ex2_rule_geometric_odd();
      if (*rule_name == "ones") rule = ex2_rule_ones();

      if (*ex == "example1") {
        std::vector<Rat> eps;
        if (eps_text->empty())
          for (int n = 1; n <= *level; ++n) eps.push_back(pow2(-n));
        else
          eps = parse_rat_list(*eps_text);
        const Example1Family fam = build_example1(*level, std::move(eps));
        const RandomVariable ones = RandomVariable::constant(fam.space, Rat(1));
        if (machine) {
          json rows = json::array();
          for (std::size_t n = 1; n <= fam.x.size(); ++n)
            rows.push_back({{"n", n},
                            {"eps", to_fraction(fam.eps[n - 1])},
                            {"pairing_with_one", to_fraction(pairing(fam.x[n - 1], ones))}});
          out << json{{"example", "example1"}, {"level", *level}, {"rows", std::move(rows)}}
                     .dump(2)
              << '\n';
        } else {
          out << "n | eps_n | <x_n,1>\n";
          for (std::size_t n = 1; n <= fam.x.size(); ++n)
            out << n << " | " << to_fraction(fam.eps[n - 1]) << " | "
                << show(pairing(fam.x[n - 1], ones)) << '\n';
        }
        if (!dump_path->empty()) {
          Market market{fam.space, MarketCone(fam.space, {}, ConeMode::Subspace), ones,
                        std::nullopt, fam.x};
          save_market(market, *dump_path);
          if (!machine) out << "wrote " << *dump_path << '\n';
        }
        return 0;
      }

      if (*ex == "example2") {
        Example2Market market = build_example2(*level);
        const RandomVariable f = market.density(rule.f, rule.residual);
        if (!sweep_range->empty()) {
          std::vector<int> levels;
          for (int l = (*sweep_range)[0]; l <= (*sweep_range)[1]; ++l) levels.push_back(l);
          return run_sweep(ExampleKind::Example2, rule, levels, parse_rational(*threshold),
                           machine, out);
        }
        Market m{market.space, market.cone, f, TruncationSpec::unit_ball(), {}};
        if (!dump_path->empty()) {
          save_market(m, *dump_path);
          if (!machine) out << "wrote " << *dump_path << '\n';
          return 0;
        }
        return analyze_market(m, machine, out);
      }

      // example3
      Example3Market market = build_example3(*level);
      if (!witness_beta->empty()) {
        const Rat beta = parse_rational(*witness_beta);
        const long m_slots = mpz_get_si(rat_floor(beta).get_num_mpz_t()) + 2;
        std::vector<Rat> eps;
        for (long k = 1; k <= std::max(m_slots, 1L); ++k) eps.push_back(pow2(-k));
        const std::optional<RandomVariable> w =
            divergence_witness_eps(market.cone, market.f, EpsSequence(eps), beta);
        if (!w) {
          out << (machine ? "{\"witness\": null}\n" : "witness: none (level too small)\n");
          return 0;
        }
        if (machine) {
          out << json{{"witness", to_fraction_vector(w->values())},
                      {"pairing", to_fraction(pairing(*w, market.f))}}
                     .dump(2)
              << '\n';
        } else {
          out << "witness: " << show_vector(w->values()) << '\n'
              << "pairing: " << show(pairing(*w, market.f)) << '\n';
        }
        return 0;
      }
      if (!sweep_range->empty()) {
        std::vector<int> levels;
        for (int l = (*sweep_range)[0]; l <= (*sweep_range)[1]; ++l) levels.push_back(l);
        return run_sweep(ExampleKind::Example3, rule, levels, parse_rational(*threshold),
                         machine, out);
      }
      Market m{market.space, market.cone, market.f, TruncationSpec::unit_ball(), {}};
      if (!dump_path->empty()) {
        save_market(m, *dump_path);
        if (!machine) out << "wrote " << *dump_path << '\n';
        return 0;
      }
      return analyze_market(m, machine, out);
    };
  });

  // orlicz -------------------------------------------------------------------
  auto* orlicz = app.add_subcommand("orlicz", "N-function constructions and norms");
  auto* eps_to_phi = orlicz->add_subcommand("eps-to-phi", "Build phi from an eps sequence");
  auto e2p_eps = std::make_shared<std::string>();
  eps_to_phi->add_option("--eps", *e2p_eps, "Comma list, e.g. 1/2,1/4")->required();
  eps_to_phi->callback([&action, e2p_eps, &format, &out]() {
    action = [e2p_eps, &format, &out]() {
      const NFunction phi = eps_to_nfunction(EpsSequence(parse_rat_list(*e2p_eps)));
      if (format == "machine") {
        json knots = json::array();
        for (const auto& [t, y] : phi.knots())
          knots.push_back({to_fraction(t), to_fraction(y)});
        out << json{{"knots", std::move(knots)},
                    {"tail_slope", to_fraction(phi.tail_slope())},
                    {"tail_quad", to_fraction(phi.tail_quad())}}
                   .dump(2)
            << '\n';
      } else {
        out << "t | phi(t)\n";
        for (const auto& [t, y] : phi.knots())
          out << to_fraction(t) << " | " << to_fraction(y) << '\n';
        out << "tail: slope " << to_fraction(phi.tail_slope()) << ", quadratic "
            << to_fraction(phi.tail_quad()) << '\n';
      }
      return 0;
    };
  });

  auto* phi_to_eps = orlicz->add_subcommand("phi-to-eps", "Derive eps_k = k^-2 / phi(k+1)");
  auto p2e_knots = std::make_shared<std::string>();
  auto p2e_slope = std::make_shared<std::string>("1");
  auto p2e_quad = std::make_shared<std::string>("1");
  auto p2e_k = std::make_shared<int>(3);
  phi_to_eps->add_option("--knots", *p2e_knots, "t:value pairs, e.g. 0:0,1/2:0,1:1")->required();
  phi_to_eps->add_option("--tail-slope", *p2e_slope, "Tail slope");
  phi_to_eps->add_option("--tail-quad", *p2e_quad, "Tail quadratic coefficient");
  phi_to_eps->add_option("--k", *p2e_k, "Number of levels");
  phi_to_eps->callback([&action, p2e_knots, p2e_slope, p2e_quad, p2e_k, &format, &out]() {
    action = [p2e_knots, p2e_slope, p2e_quad, p2e_k, &format, &out]() {
      const NFunction phi = parse_phi_args(*p2e_knots, *p2e_slope, *p2e_quad);
      const EpsSequence eps = nfunction_to_eps(phi, *p2e_k);
      if (format == "machine") {
        out << json{{"eps", to_fraction_vector(eps.values())}}.dump(2) << '\n';
      } else {
        out << "k | eps_k\n";
        for (std::size_t k = 1; k <= eps.size(); ++k)
          out << k << " | " << show(eps[k - 1]) << '\n';
      }
      return 0;
    };
  });

  auto* norm = orlicz->add_subcommand("norm", "Luxemburg norm bracket of a vector");
  auto n_x = std::make_shared<std::string>();
  auto n_probs = std::make_shared<std::string>();
  auto n_knots = std::make_shared<std::string>();
  auto n_slope = std::make_shared<std::string>("1");
  auto n_quad = std::make_shared<std::string>("1");
  auto n_tol = std::make_shared<std::string>("1/1024");
  norm->add_option("--x", *n_x, "Values, comma list")->required();
  norm->add_option("--probs", *n_probs, "Probabilities, comma list")->required();
  norm->add_option("--knots", *n_knots, "phi knots")->required();
  norm->add_option("--tail-slope", *n_slope, "Tail slope");
  norm->add_option("--tail-quad", *n_quad, "Tail quadratic coefficient");
  norm->add_option("--tol", *n_tol, "Bracket width");
  norm->callback([&action, n_x, n_probs, n_knots, n_slope, n_quad, n_tol, &format, &out]() {
    action = [n_x, n_probs, n_knots, n_slope, n_quad, n_tol, &format, &out]() {
      std::vector<Rat> probs = parse_rat_list(*n_probs);
      std::vector<std::string> labels;
      for (std::size_t i = 0; i < probs.size(); ++i) labels.push_back("a" + std::to_string(i));
      SpacePtr space = make_space(std::move(labels), std::move(probs));
      const RandomVariable x(space, parse_rat_list(*n_x));
      const NFunction phi = parse_phi_args(*n_knots, *n_slope, *n_quad);
      const NormBracket bracket = luxemburg_norm(x, phi, parse_rational(*n_tol));
      const bool inside = luxemburg_le_one(x, phi);
      if (format == "machine") {
        out << json{{"lo", to_fraction(bracket.lo)},
                    {"hi", to_fraction(bracket.hi)},
                    {"le_one", inside}}
                   .dump(2)
            << '\n';
      } else {
        out << "norm bracket: [" << show(bracket.lo) << ", " << show(bracket.hi) << "]\n"
            << "||x||_phi <= 1: " << (inside ? "yes" : "no") << '\n';
      }
      return 0;
    };
  });

  app.require_subcommand(1);
  orlicz->require_subcommand(1);

  std::vector<const char*> argv;
  argv.push_back("mmfloor");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }

  TraceGuard trace(debug_lp ? &err : nullptr);
  try {
    if (!action) {
      err << "error: no command\n";
      return 3;
    }
    return action();
  } catch (const MarketFormatError& e) {
    err << "input error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace mmfloor
