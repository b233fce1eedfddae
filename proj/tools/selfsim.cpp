// selfsim: exact computation with self-similar group actions on rooted
// trees, and numeric monodromy actions of quadratic polynomials.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "selfsim/element.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/heisenberg.hpp"
#include "selfsim/lattes.hpp"
#include "selfsim/lattice.hpp"
#include "selfsim/limitspace.hpp"
#include "selfsim/monodromy.hpp"
#include "selfsim/nucleus.hpp"
#include "selfsim/presentation.hpp"
#include "selfsim/presets.hpp"
#include "selfsim/virtual_endo.hpp"

namespace {

using namespace selfsim;

constexpr const char* kVersion = "selfsim 1.0.0";

constexpr const char* kFormats = R"fmt(presentation file (UTF-8, line oriented, '#' comments):
  alphabet = 2
  gens = a b
  a : perm = (0 1) ; 0 -> b ; 1 -> 1
  b : perm = ()    ; 0 -> a ; 1 -> 1
  perm uses cycle notation, () is the identity; 'x -> w' gives the
  restriction at letter x as a word over the generators, 1 and g^-1.
tree words: digit string "0110" (alphabet <= 10) or space/comma ints.
sequence spec: "<preperiod>:<period>", rightmost preperiod letter first,
  e.g. "10:1" is ...11110.
complex numbers: "re,im".  integer matrix: rows "a,b;c,d".
digit sets: "(0,0);(1,0)".  group words: "a b^-1 a".
julia cloud CSV: header re,im; one point per line; rows in lexicographic
  word order.
lambda CSV: word,re,im; level by level, lexicographic within a level.
schreier CSV: src,dst,gen with lexicographic word indices; DOT output
  merges parallel edges, the CSV keeps them.
tile CSV: x1,...,xn,word; rows in lexicographic word order.
moore diagram: DOT, edge labels "input|output".
)fmt";

struct GlobalOpts {
  std::size_t budget_states = kDefaultStateBudget;
  std::uint64_t seed = 1;
  std::string out = "-";
  int depth = 8;
  double step = 0.05;
};

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw domain_error("cannot open output file " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw domain_error("cannot open file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::complex<double> parse_complex(const std::string& text) {
  std::size_t comma = text.find(',');
  if (comma == std::string::npos) return {std::stod(text), 0.0};
  return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

IntMat parse_matrix(const std::string& text) {
  IntMat m;
  std::istringstream rows(text);
  std::string row;
  while (std::getline(rows, row, ';')) {
    IntVec r;
    std::istringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) r.push_back(std::stoll(cell));
    m.push_back(std::move(r));
  }
  return m;
}

std::vector<IntVec> parse_digits(const std::string& text) {
  std::vector<IntVec> out;
  std::string cleaned;
  for (char c : text)
    if (c != '(' && c != ')' && c != ' ') cleaned += c;
  std::istringstream items(cleaned);
  std::string item;
  while (std::getline(items, item, ';')) {
    IntVec v;
    std::istringstream cells(item);
    std::string cell;
    while (std::getline(cells, cell, ',')) v.push_back(std::stoll(cell));
    out.push_back(std::move(v));
  }
  return out;
}

IntVec parse_elem(const std::string& text) {
  IntVec v;
  std::string cleaned;
  for (char c : text)
    if (c != '(' && c != ')' && c != ' ') cleaned += c;
  std::istringstream cells(cleaned);
  std::string cell;
  while (std::getline(cells, cell, ',')) v.push_back(std::stoll(cell));
  return v;
}

/// Group-presentation source: a named preset or a file.
struct PresentationArgs {
  std::string preset;
  std::string file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "named preset (adding-machine, z2, z2m1, z2m2)");
    cmd->add_option("--file", file, "presentation file");
  }

  PresentationPtr resolve() const {
    if (!file.empty()) return make_presentation(read_file(file));
    if (!preset.empty()) return presets::presentation(preset);
    throw domain_error("need --preset or --file");
  }
};

/// Concrete-group source for the vend-* commands.
struct ConcreteArgs {
  std::string preset;
  std::string matrix;
  std::string digits;
  int p = 2, q = 2;
  std::string basis;
  std::string alpha;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset,
                    "lattice | heisenberg | lattes | adding-machine | dragon | heisenberg22 | lattes2");
    cmd->add_option("--matrix", matrix, "integer matrix rows, e.g. \"-1,1;-1,-1\"");
    cmd->add_option("--digits", digits, "digit set, e.g. \"(0,0);(1,0)\"");
    cmd->add_option("--p", p, "Heisenberg p (>= 2)");
    cmd->add_option("--q", q, "Heisenberg q (>= 2)");
    cmd->add_option("--basis", basis, "lattice basis as two complex rows, e.g. \"1,0;0,1\"");
    cmd->add_option("--alpha", alpha, "multiplier as \"re,im\"");
  }

  std::unique_ptr<ConcreteGroup> resolve() const {
    if (preset == "lattice" || (preset.empty() && !matrix.empty())) {
      IntMat a = parse_matrix(matrix);
      std::vector<IntVec> dig = digits.empty() ? residue_system(a) : parse_digits(digits);
      return std::make_unique<LatticePreset>(a, dig);
    }
    if (preset == "heisenberg") return std::make_unique<HeisenbergPreset>(p, q);
    if (preset == "lattes") {
      std::istringstream rows(basis);
      std::string r1, r2;
      if (!std::getline(rows, r1, ';') || !std::getline(rows, r2, ';'))
        throw domain_error("--basis needs two complex rows \"re,im;re,im\"");
      return std::make_unique<LattesPreset>(parse_complex(r1), parse_complex(r2),
                                            parse_complex(alpha));
    }
    if (auto lat = presets::lattice(preset)) return std::make_unique<LatticePreset>(*lat);
    if (auto heis = presets::heisenberg(preset)) return std::make_unique<HeisenbergPreset>(*heis);
    if (auto lt = presets::lattes(preset)) return std::make_unique<LattesPreset>(*lt);
    throw domain_error("unknown concrete-group preset '" + preset + "'");
  }
};

/// Polynomial-map source for the img-* commands.
struct MapArgs {
  std::string c_text;
  std::string preset;
  std::string basepoint;
  std::string postcritical;
  std::string detour = "above";
  double radius_factor = 0.1;
  double step = 0.05;

  void attach(CLI::App* cmd) {
    cmd->add_option("--c", c_text, "quadratic parameter c as \"re,im\"");
    cmd->add_option("--preset", preset, "z2 | z2m1 | z2m2");
    cmd->add_option("--basepoint", basepoint, "override the basepoint, \"re,im\"");
    cmd->add_option("--postcritical", postcritical, "override the postcritical set, \"re,im;re,im\"");
    cmd->add_option("--detour", detour, "side for the connecting-path detour: above | below");
    cmd->add_option("--radius-factor", radius_factor, "loop radius as a fraction of the min gap");
  }

  PolynomialMap resolve_map() const {
    if (!c_text.empty()) return PolynomialMap::quadratic(parse_complex(c_text));
    if (!preset.empty()) {
      auto c = presets::polynomial_parameter(preset);
      if (!c) throw domain_error("preset '" + preset + "' has no polynomial map");
      return PolynomialMap::quadratic(*c);
    }
    throw domain_error("need --c or --preset");
  }

  Geometry resolve_geometry(const PolynomialMap& f) const {
    GeometryOptions opts;
    opts.radius_factor = radius_factor;
    opts.max_seg_step = step;
    if (detour == "above")
      opts.detour = DetourSide::above;
    else if (detour == "below")
      opts.detour = DetourSide::below;
    else
      throw domain_error("--detour must be above or below");
    if (!basepoint.empty()) opts.basepoint = parse_complex(basepoint);
    if (!postcritical.empty()) {
      std::vector<Complex> ps;
      std::istringstream rows(postcritical);
      std::string row;
      while (std::getline(rows, row, ';')) ps.push_back(parse_complex(row));
      opts.postcritical = ps;
    }
    return default_geometry(f, opts);
  }
};

nlohmann::json geometry_json(const Geometry& geom) {
  nlohmann::json j;
  j["basepoint"] = {geom.basepoint.real(), geom.basepoint.imag()};
  j["radius"] = geom.radius;
  auto dump_polyline = [](const Polyline& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (Complex z : p.points) arr.push_back({z.real(), z.imag()});
    return arr;
  };
  j["postcritical"] = nlohmann::json::array();
  for (Complex p : geom.postcritical) j["postcritical"].push_back({p.real(), p.imag()});
  j["loops"] = nlohmann::json::array();
  for (std::size_t i = 0; i < geom.loops.size(); ++i)
    j["loops"].push_back({{"name", geom.loop_names[i]}, {"points", dump_polyline(geom.loops[i])}});
  j["connecting"] = nlohmann::json::array();
  for (std::size_t x = 0; x < geom.connecting.size(); ++x)
    j["connecting"].push_back({{"letter", x}, {"points", dump_polyline(geom.connecting[x])}});
  return j;
}

std::string describe_nucleus(const ContractionReport& report) {
  std::ostringstream out;
  if (report.contracting()) {
    const Nucleus& n = *report.nucleus;
    out << "contracting: nucleus has " << n.size() << " elements\n";
    for (int i = 0; i < n.size(); ++i) out << "  " << n.member(i).to_string() << "\n";
    out << "rounds: " << report.rounds << "  peak candidates: " << report.peak_candidates
        << "  absorption depth: " << report.absorption_depth << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", report.rho_estimate);
    out << "contraction coefficient estimate: " << buf << " (empirical, upper-biased)\n";
  } else {
    out << "budget exceeded (" << report.budget_note << "); partial candidate set has "
        << report.partial.size() << " elements; contraction undecided\n";
  }
  return out.str();
}

int run(int argc, char** argv) {
  CLI::App app{"exact self-similar group actions and numeric monodromy actions"};
  app.set_version_flag("--version", kVersion);
  bool show_formats = false;
  app.add_flag("--formats", show_formats, "describe all file formats and exit");
  app.require_subcommand(0, 1);

  GlobalOpts g;
  app.add_option("--budget-states", g.budget_states, "state budget for equality checks")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "seed for randomized estimates")->capture_default_str();
  app.add_option("--out", g.out, "output file ('-' = stdout)")->capture_default_str();
  app.add_option("--depth", g.depth, "default depth/level for tree computations")
      ->capture_default_str();
  app.add_option("--step", g.step, "base sampling step for numeric paths")->capture_default_str();

  // ---- core -------------------------------------------------------------
  auto* act = app.add_subcommand("act", "apply a group word to a tree word");
  PresentationArgs act_pres;
  act_pres.attach(act);
  std::string act_word_text, act_on;
  act->add_option("--word", act_word_text, "group word, e.g. \"a b^-1\"")->required();
  act->add_option("--on", act_on, "tree word")->required();

  auto* restr = app.add_subcommand("restrict", "restriction of a group word at a tree word");
  PresentationArgs restr_pres;
  restr_pres.attach(restr);
  std::string restr_word, restr_at;
  restr->add_option("--word", restr_word, "group word")->required();
  restr->add_option("--at", restr_at, "tree word")->required();

  auto* eq = app.add_subcommand("eq", "decide equality of two group words");
  PresentationArgs eq_pres;
  eq_pres.attach(eq);
  std::string eq_word, eq_word2;
  eq->add_option("--word", eq_word, "group word")->required();
  eq->add_option("--word2", eq_word2, "second group word (default: identity)");

  auto* levelperm = app.add_subcommand("level-perm", "permutation induced on one level");
  PresentationArgs lp_pres;
  lp_pres.attach(levelperm);
  std::string lp_word;
  int lp_level = -1;
  levelperm->add_option("--word", lp_word, "group word")->required();
  levelperm->add_option("--level", lp_level, "level (default --depth)");

  // ---- nucleus ----------------------------------------------------------
  auto* nucleus_cmd = app.add_subcommand("nucleus", "compute the nucleus of a contracting action");
  PresentationArgs nuc_pres;
  nuc_pres.attach(nucleus_cmd);
  NucleusBudgets nuc_budgets;
  nucleus_cmd->add_option("--max-set-size", nuc_budgets.max_set_size)->capture_default_str();
  nucleus_cmd->add_option("--max-rounds", nuc_budgets.max_rounds)->capture_default_str();
  nucleus_cmd->add_option("--depth-per-round", nuc_budgets.depth_per_round)->capture_default_str();

  auto* rho = app.add_subcommand("rho", "empirical contraction-coefficient estimate");
  PresentationArgs rho_pres;
  rho_pres.attach(rho);
  int rho_samples = 20, rho_depth = 0;
  rho->add_option("--samples", rho_samples)->capture_default_str();
  rho->add_option("--rho-depth", rho_depth, "restriction depth (0 = auto)")->capture_default_str();

  auto* moore = app.add_subcommand("moore", "Moore diagram of the nucleus as DOT");
  PresentationArgs moore_pres;
  moore_pres.attach(moore);

  // ---- virtual endomorphisms ---------------------------------------------
  auto* vend_act = app.add_subcommand("vend-act", "act through a virtual-endomorphism triple");
  ConcreteArgs va_group;
  va_group.attach(vend_act);
  std::string va_elem, va_on;
  vend_act->add_option("--elem", va_elem, "group element, e.g. \"3\" or \"(1,0,0)\"")->required();
  vend_act->add_option("--on", va_on, "tree word (letters as integers)")->required();

  auto* vend_closure = app.add_subcommand("vend-closure", "state closure as a presentation");
  ConcreteArgs vc_group;
  vc_group.attach(vend_closure);
  std::string vc_gens;
  std::size_t vc_budget = 4096;
  vend_closure->add_option("--gens", vc_gens, "generators, ';' separated")->required();
  vend_closure->add_option("--budget", vc_budget, "state budget")->capture_default_str();

  auto* vend_faithful = app.add_subcommand("vend-faithful", "lattice faithfulness check");
  std::string vf_matrix, vf_digits;
  int vf_kmax = 24;
  vend_faithful->add_option("--matrix", vf_matrix)->required();
  vend_faithful->add_option("--digits", vf_digits, "digit set (default: a residue system)");
  vend_faithful->add_option("--k-max", vf_kmax)->capture_default_str();

  auto* vend_kernel = app.add_subcommand("vend-kernel", "kernel-depth probe for one element");
  ConcreteArgs vk_group;
  vk_group.attach(vend_kernel);
  std::string vk_elem;
  int vk_nmax = 32;
  vend_kernel->add_option("--elem", vk_elem)->required();
  vend_kernel->add_option("--n-max", vk_nmax)->capture_default_str();

  // ---- monodromy ----------------------------------------------------------
  auto* img_lambda = app.add_subcommand("img-lambda", "preimage table of a quadratic");
  MapArgs il_map;
  il_map.attach(img_lambda);
  std::string il_geometry;
  img_lambda->add_option("--geometry", il_geometry, "also dump the geometry as JSON to this file");

  auto* img_perms = app.add_subcommand("img-perms", "numeric level permutations of the loops");
  MapArgs ip_map;
  ip_map.attach(img_perms);

  auto* img_verify = app.add_subcommand("img-verify", "verify a recursion against the numeric action");
  MapArgs iv_map;
  iv_map.attach(img_verify);
  std::string iv_recursion, iv_recursion_preset;
  img_verify->add_option("--recursion", iv_recursion, "presentation file to verify");
  img_verify->add_option("--recursion-preset", iv_recursion_preset, "preset presentation to verify");

  auto* img_infer = app.add_subcommand("img-infer", "infer the wreath recursion numerically");
  MapArgs ii_map;
  ii_map.attach(img_infer);
  int ii_maxlen = 3;
  img_infer->add_option("--max-word-len", ii_maxlen, "restriction word length bound")
      ->capture_default_str();

  auto* img_julia = app.add_subcommand("img-julia", "Julia point cloud of a quadratic");
  MapArgs ij_map;
  ij_map.attach(img_julia);

  // ---- limit space --------------------------------------------------------
  auto* schreier = app.add_subcommand("schreier", "level action graph");
  PresentationArgs sch_pres;
  sch_pres.attach(schreier);
  int sch_level = -1;
  std::string sch_dot;
  schreier->add_option("--level", sch_level, "level (default --depth)");
  schreier->add_option("--dot", sch_dot, "also write DOT to this file");

  auto* equiv = app.add_subcommand("equiv", "asymptotic equivalence of eventually periodic sequences");
  PresentationArgs eqv_pres;
  eqv_pres.attach(equiv);
  std::string eqv_s1, eqv_s2;
  equiv->add_option("--seq1", eqv_s1, "first sequence, \"<preperiod>:<period>\"")->required();
  equiv->add_option("--seq2", eqv_s2, "second sequence")->required();

  auto* tile = app.add_subcommand("tile", "digit-tile point cloud of a lattice preset");
  ConcreteArgs tile_group;
  tile_group.attach(tile);

  auto* tile_check = app.add_subcommand("tile-check", "self-affinity check of the digit tile");
  ConcreteArgs tc_group;
  tc_group.attach(tile_check);

  auto* presets_cmd = app.add_subcommand("presets", "preset registry");
  auto* presets_list = presets_cmd->add_subcommand("list", "list all presets");

  // Global options may appear after the subcommand name.
  for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; })) sc->fallthrough();
  presets_list->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  if (show_formats) {
    std::cout << kFormats;
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 0;
  }

  if (*act) {
    auto pres = act_pres.resolve();
    Element e = parse_element(pres, act_word_text);
    Word w = parse_word(act_on, pres->alphabet_size());
    write_output(g.out, format_word(act_word(e, w)) + "\n");
  } else if (*restr) {
    auto pres = restr_pres.resolve();
    Element e = parse_element(pres, restr_word);
    Word w = parse_word(restr_at, pres->alphabet_size());
    write_output(g.out, restrict_word(e, w).to_string() + "\n");
  } else if (*eq) {
    auto pres = eq_pres.resolve();
    Element e1 = parse_element(pres, eq_word);
    if (eq_word2.empty()) {
      write_output(g.out, std::string(is_identity(e1, g.budget_states) ? "identity" : "not identity") + "\n");
    } else {
      Element e2 = parse_element(pres, eq_word2);
      write_output(g.out, std::string(equal(e1, e2, g.budget_states) ? "equal" : "not equal") + "\n");
    }
  } else if (*levelperm) {
    auto pres = lp_pres.resolve();
    Element e = parse_element(pres, lp_word);
    int level = lp_level >= 0 ? lp_level : g.depth;
    auto perm = permutation_on_level(e, level);
    std::string out;
    for (std::size_t i = 0; i < perm.size(); ++i) out += (i ? " " : "") + std::to_string(perm[i]);
    write_output(g.out, out + "\n");
  } else if (*nucleus_cmd) {
    nuc_budgets.state_budget = g.budget_states;
    auto report = compute_nucleus(nuc_pres.resolve(), nuc_budgets);
    write_output(g.out, describe_nucleus(report));
    if (!report.contracting()) return 2;
  } else if (*rho) {
    double est = estimate_contraction_coefficient(rho_pres.resolve(), rho_samples, rho_depth, g.seed);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f\n", est);
    write_output(g.out, buf);
  } else if (*moore) {
    auto report = compute_nucleus(moore_pres.resolve(),
                                  NucleusBudgets{5000, 50, 16, g.budget_states});
    if (!report.contracting()) {
      write_output(g.out, describe_nucleus(report));
      return 2;
    }
    write_output(g.out, moore_diagram(*report.nucleus).to_dot());
  } else if (*vend_act) {
    auto group = va_group.resolve();
    Word w = parse_word(va_on, group->degree());
    write_output(g.out, format_word(act_via_triple(*group, parse_elem(va_elem), w)) + "\n");
  } else if (*vend_closure) {
    auto group = vc_group.resolve();
    std::vector<GroupElem> gens;
    std::istringstream items(vc_gens);
    std::string item;
    while (std::getline(items, item, ';')) gens.push_back(parse_elem(item));
    write_output(g.out, format_presentation(closure_presentation(*group, gens, vc_budget)));
  } else if (*vend_faithful) {
    IntMat a = parse_matrix(vf_matrix);
    std::vector<IntVec> dig = vf_digits.empty() ? residue_system(a) : parse_digits(vf_digits);
    auto report = lattice_faithfulness_check(LatticePreset(a, dig), vf_kmax);
    std::string verdict = report.verdict == FaithfulnessReport::Verdict::faithful ? "faithful"
                          : report.verdict == FaithfulnessReport::Verdict::unfaithful
                              ? "unfaithful, witness " + format_vec(*report.witness)
                              : "unknown";
    write_output(g.out, verdict + " (" + report.note + ")\n");
  } else if (*vend_kernel) {
    auto group = vk_group.resolve();
    KernelDepth kd = kernel_intersection_depth(*group, parse_elem(vk_elem), vk_nmax);
    if (std::holds_alternative<int>(kd))
      write_output(g.out, std::to_string(std::get<int>(kd)) + "\n");
    else
      write_output(g.out, "survives\n");
  } else if (*img_lambda) {
    PolynomialMap f = il_map.resolve_map();
    il_map.step = g.step;
    Geometry geom = il_map.resolve_geometry(f);
    PreimageTree tree = build_lambda(f, geom, g.depth);
    if (!il_geometry.empty()) write_output(il_geometry, geometry_json(geom).dump(2) + "\n");
    std::string csv = "word,re,im\n";
    char buf[96];
    for (int n = 0; n <= g.depth; ++n)
      for (std::size_t i = 0; i < tree.level(n).size(); ++i) {
        Complex z = tree.level(n)[i];
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n",
                      format_word(word_from_index(i, n, tree.alphabet_size())).c_str(), z.real(),
                      z.imag());
        csv += buf;
      }
    write_output(g.out, csv);
  } else if (*img_perms) {
    PolynomialMap f = ip_map.resolve_map();
    ip_map.step = g.step;
    Geometry geom = ip_map.resolve_geometry(f);
    PreimageTree tree = build_lambda(f, geom, g.depth);
    MonodromyAction action = monodromy_permutations(tree, g.depth);
    std::string out;
    for (std::size_t gi = 0; gi < action.perms.size(); ++gi) {
      out += "loop " + action.loop_names[gi] + "\n";
      for (int n = 1; n <= action.depth; ++n) {
        out += "  level " + std::to_string(n) + ":";
        for (std::uint64_t v : action.perms[gi][static_cast<std::size_t>(n - 1)])
          out += " " + std::to_string(v);
        out += "\n";
      }
    }
    write_output(g.out, out);
  } else if (*img_verify) {
    PolynomialMap f = iv_map.resolve_map();
    iv_map.step = g.step;
    Geometry geom = iv_map.resolve_geometry(f);
    PresentationPtr pres;
    if (!iv_recursion.empty())
      pres = make_presentation(read_file(iv_recursion));
    else if (!iv_recursion_preset.empty())
      pres = presets::presentation(iv_recursion_preset);
    else
      throw domain_error("need --recursion or --recursion-preset");
    PreimageTree tree = build_lambda(f, geom, g.depth);
    MonodromyAction action = monodromy_permutations(tree, g.depth);
    write_output(g.out, verify_recursion(pres, action, g.depth).summary() + "\n");
  } else if (*img_infer) {
    PolynomialMap f = ii_map.resolve_map();
    ii_map.step = g.step;
    Geometry geom = ii_map.resolve_geometry(f);
    write_output(g.out, format_presentation(infer_recursion(f, geom, ii_maxlen, g.depth)));
  } else if (*img_julia) {
    PolynomialMap f = ij_map.resolve_map();
    ij_map.step = g.step;
    Geometry geom = ij_map.resolve_geometry(f);
    PreimageTree tree = build_lambda(f, geom, g.depth);
    write_output(g.out, cloud_to_csv(julia_cloud(tree, g.depth)));
  } else if (*schreier) {
    auto pres = sch_pres.resolve();
    int level = sch_level >= 0 ? sch_level : g.depth;
    LevelGraph graph = schreier_graph(pres, level);
    if (!sch_dot.empty()) write_output(sch_dot, graph.to_dot());
    write_output(g.out, graph.to_csv());
  } else if (*equiv) {
    auto pres = eqv_pres.resolve();
    auto report = compute_nucleus(pres, NucleusBudgets{5000, 50, 16, g.budget_states});
    if (!report.contracting()) {
      write_output(g.out, "cannot decide: " + describe_nucleus(report));
      return 2;
    }
    SequenceSpec s1 = SequenceSpec::parse(eqv_s1, pres->alphabet_size());
    SequenceSpec s2 = SequenceSpec::parse(eqv_s2, pres->alphabet_size());
    bool same = asymptotic_equivalent(*report.nucleus, s1, s2);
    write_output(g.out, std::string(same ? "equivalent" : "not equivalent") + "\n");
  } else if (*tile) {
    auto group = tile_group.resolve();
    auto* lat = dynamic_cast<LatticePreset*>(group.get());
    if (!lat) throw domain_error("tile clouds are defined for lattice presets");
    write_output(g.out, tile_cloud(*lat, g.depth).to_csv());
  } else if (*tile_check) {
    auto group = tc_group.resolve();
    auto* lat = dynamic_cast<LatticePreset*>(group.get());
    if (!lat) throw domain_error("tile checks are defined for lattice presets");
    auto report = tile_ifs_check(*lat, g.depth);
    char buf[160];
    std::snprintf(buf, sizeof buf, "depth %d: provenance %s, hausdorff to depth %d = %.6g\n",
                  report.depth, report.provenance_exact ? "exact" : "BROKEN", report.depth - 1,
                  report.hausdorff_to_previous);
    write_output(g.out, buf);
    if (!report.provenance_exact) return 1;
  } else if (*presets_cmd) {
    if (*presets_list || presets_cmd->get_subcommands().empty()) {
      std::string out;
      for (const auto& info : presets::list())
        out += info.name + "  [" + info.kinds + "]  " + info.description + "\n";
      write_output(g.out, out);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const selfsim::budget_error& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return 2;
  } catch (const selfsim::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
