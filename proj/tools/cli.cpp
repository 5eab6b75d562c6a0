#include "cli.hpp"

#include "io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace kdiv::cli {

namespace {

using io::json;

struct Common {
  std::string couple;
  std::string element;
  std::string param;
  std::string grid;
  std::string out;
  std::uint64_t seed = 1;
  double accuracy = 1e-9;

  [[nodiscard]] KOptions options() const {
    KOptions o;
    if (!grid.empty()) {
      o.grid = io::grid(grid);
    } else if (const char* env = std::getenv("KDIV_GRID"); env != nullptr && *env != '\0') {
      o.grid = io::grid(std::string(env));
    }
    if (!(accuracy > 0.0)) throw ValidationError("--accuracy must be positive");
    o.accuracy = accuracy;
    return o;
  }
};

std::string require(const std::string& value, const char* flag) {
  if (value.empty()) throw ValidationError(std::string("missing ") + flag);
  return value;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<ConcavePL> majorant_list(const std::string& text) {
  const json j = io::parse(require(text, "--majorants"));
  if (!j.is_array() || j.empty()) throw ValidationError("--majorants must be a nonempty array of curves");
  std::vector<ConcavePL> out;
  for (const json& f : j) out.push_back(io::curve(f));
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"K-functionals, K-method norms and K-divisibility on finite instances", "kdiv"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--couple", c.couple, "couple JSON (or @file)");
  app.add_option("--element", c.element, "element JSON (or @file)");
  app.add_option("--param", c.param, "parameter JSON (or @file)");
  app.add_option("--grid", c.grid, "grid \"min,max,per_octave\" or JSON; overrides KDIV_GRID");
  app.add_option("--seed", c.seed, "seed of random families");
  app.add_option("--out", c.out, "output file (default: standard output)");
  app.add_option("--accuracy", c.accuracy, "relative accuracy of numeric K values");

  std::string text;
  auto emit = [&](const std::string& s) { text = s; };

  auto* kfunc = app.add_subcommand("kfunc", "K(t, x) on the grid as CSV \"t,K\"");
  std::vector<double> ts;
  double witness_t = 0.0;
  kfunc->add_option("--t", ts, "evaluate at these t instead of the grid");
  kfunc->add_option("--witness", witness_t, "print the split witness at this t as JSON");

  auto* norm = app.add_subcommand("norm", "K-space norm of an element");

  auto* orbit = app.add_subcommand("orbit", "orbit norm sup_t K(t, target) / K(t, element)");
  std::string target;
  std::string target_couple;
  orbit->add_option("--target", target, "element y (JSON)")->required();
  orbit->add_option("--target-couple", target_couple, "couple of y (default: --couple)");

  auto* divide = app.add_subcommand("divide", "K-divisibility certificate");
  auto* pdivide = app.add_subcommand("pdivide", "p-K-divisibility certificate");
  std::string majorants;
  double p = 1.0;
  for (auto* sub : {divide, pdivide}) sub->add_option("--majorants", majorants, "array of curves")->required();
  pdivide->add_option("--p", p, "exponent in (0, 1]")->required();

  auto* witness = app.add_subcommand("witness", "operator T with Tx = y in (l^1, l^inf)");
  double bound = 1.0;
  witness->add_option("--target", target, "y (JSON)")->required();
  witness->add_option("--bound", bound, "bound on both operator norms");

  auto* probe = app.add_subcommand("probe", "K(p, q)-monotonicity estimate");
  std::string space;
  double q = 1.0;
  ProbeOptions po;
  probe->add_option("--space", space, "space X as {\"p\": r}")->required();
  probe->add_option("--p", p, "p in (0, 1]")->required();
  probe->add_option("--q", q, "q in (0, p]")->required();
  probe->add_option("--trials", po.trials, "number of random instances");
  probe->add_option("--dim", po.dimension, "dimension");
  probe->add_option("--pieces", po.pieces, "pieces per instance");

  auto* convexify = app.add_subcommand("convexify", "p-convexification of an element or a curve");
  std::string curve;
  convexify->add_option("--p", p, "exponent")->required();
  convexify->add_option("--space", space, "space X as {\"p\": r} (element form)");
  convexify->add_option("--curve", curve, "curve JSON (majorant form)");

  auto* demo = app.add_subcommand("demo", "demonstrations");
  std::string which;
  Eigen::Index nmax = 16;
  std::string qtext = "inf";
  demo->add_option("name", which, "non-cm")->required();
  demo->add_option("--p", p, "p in (0, 1)");
  demo->add_option("--q", qtext, "q (number or inf)");
  demo->add_option("--nmax", nmax, "largest n");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "kdiv: " << e.what() << "\n";
    return 2;
  }

  try {
    const KOptions opt = c.options();
    auto the_couple = [&] { return io::couple(io::parse(require(c.couple, "--couple"))); };
    auto the_element = [&] { return io::element(io::parse(require(c.element, "--element"))); };

    if (kfunc->parsed()) {
      const CoupleDescriptor cd = the_couple();
      const Element x = the_element();
      cd.validate_element(x);
      if (kfunc->count("--witness") != 0) {
        emit(dump(io::to_json(k_numeric(x, cd, witness_t, opt.accuracy).witness)));
      } else {
        const KCurve k = k_curve(x, cd, opt);
        std::ostringstream s;
        s << "t,K\n";
        const VecXd nodes = ts.empty() ? opt.grid.nodes() : Eigen::Map<const VecXd>(ts.data(), static_cast<Eigen::Index>(ts.size())).eval();
        for (Eigen::Index i = 0; i < nodes.size(); ++i) {
          if (!(nodes(i) > 0.0)) throw ValidationError("--t values must be positive");
          s << io::format(nodes(i)) << "," << io::format(k(nodes(i))) << "\n";
        }
        emit(s.str());
      }
    } else if (norm->parsed()) {
      const CoupleDescriptor cd = the_couple();
      const Element x = the_element();
      cd.validate_element(x);
      const json pj = io::parse(require(c.param, "--param"));
      const std::string kind = pj.is_object() && pj.contains("kind") && pj["kind"].is_string()
                                   ? pj["kind"].get<std::string>()
                                   : "";
      if (kind == "lions_peetre") {
        const double v = lions_peetre_norm(x, cd, io::number(pj.at("theta")), io::number(pj.at("r")), opt);
        emit(dump({{"value", io::number(v)}}));
      } else if (kind == "e_hat") {
        EHatNorm cfg;
        cfg.couple = cd;
        cfg.space = io::leg(pj.at("space"));
        cfg.dimension = element_size(x);
        cfg.p = io::number(pj.at("p"));
        cfg.q = io::number(pj.at("q"));
        if (pj.contains("grid")) cfg.grid = io::grid(pj.at("grid"));
        emit(dump(io::to_json(e_hat_upper(k_curve(x, cd, opt).curve, cfg))));
      } else {
        emit(dump(io::to_json(k_space_norm(x, cd, io::parameter(pj, opt.grid), opt))));
      }
    } else if (orbit->parsed()) {
      const CoupleDescriptor cx = the_couple();
      const CoupleDescriptor cy = target_couple.empty() ? cx : io::couple(io::parse(target_couple));
      const Element x = the_element();
      const Element y = io::element(io::parse(target));
      cx.validate_element(x);
      cy.validate_element(y);
      emit(dump({{"value", io::number(orbit_norm(y, cy, x, cx, opt))}}));
    } else if (divide->parsed() || pdivide->parsed()) {
      const CoupleDescriptor cd = the_couple();
      const Element x = the_element();
      const std::vector<ConcavePL> phis = majorant_list(majorants);
      const DivisibilityCertificate cert =
          divide->parsed() ? k_divide(x, cd, phis, opt) : p_k_divide(x, cd, p, phis, opt);
      emit(dump(io::to_json(cert)));
    } else if (witness->parsed()) {
      const Element x = the_element();
      const Element y = io::element(io::parse(target));
      if (!std::holds_alternative<WeightedSeq>(x) || !std::holds_alternative<WeightedSeq>(y)) {
        throw ValidationError("witness: sequences only");
      }
      WitnessOptions wo;
      wo.k = opt;
      emit(dump(io::to_json(cm_witness_l1_linf(std::get<WeightedSeq>(x), std::get<WeightedSeq>(y), bound, wo))));
    } else if (probe->parsed()) {
      po.seed = c.seed;
      po.k = opt;
      emit(dump(io::to_json(kpq_probe(io::leg(io::parse(space)), the_couple(), p, q, po))));
    } else if (convexify->parsed()) {
      if (!curve.empty()) {
        emit(dump(io::to_json(convexified_majorant(io::curve(io::parse(curve)), p))));
      } else {
        emit(dump(io::to_json(convexify_element(the_element(), p, io::leg(io::parse(require(space, "--space")))))));
      }
    } else if (demo->parsed()) {
      if (which != "non-cm") throw ValidationError("demo: unknown demonstration \"" + which + "\"");
      const double qq = io::number(qtext == "inf" ? json("inf") : json(std::stod(qtext)));
      if (demo->count("--p") == 0) p = 0.5;
      std::ostringstream s;
      s << "n,ratio_lp_l1,sup_K\n";
      for (const NonCmRow& row : non_cm_demo(p, qq, nmax, opt)) {
        s << row.n << "," << io::format(row.ratio_lp_l1) << "," << io::format(row.sup_k) << "\n";
      }
      emit(s.str());
    }
  } catch (const ValidationError& e) {
    err << "kdiv: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const io::json::exception& e) {
    err << "kdiv: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "kdiv: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "kdiv: numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "kdiv: numeric failure: " << e.what() << "\n";
    return 3;
  }

  if (c.out.empty()) {
    out << text;
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
      err << "kdiv: cannot write " << c.out << "\n";
      return 2;
    }
    f << text;
  }
  return 0;
}

}  // namespace kdiv::cli
