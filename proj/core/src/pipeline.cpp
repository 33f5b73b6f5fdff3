#include "stablered/pipeline.hpp"

#include <chrono>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "stablered/errors.hpp"

namespace stablered {

using nlohmann::json;

/* ---------------- small helpers ---------------- */

namespace {

std::string elem_compact(const FieldElement& x) { return x.str(); }

ElemMatrix elem_matrix(const FieldElement& x) {
  const auto& F = x.field();
  ElemMatrix rows;
  for (int i = 0; i < F->k(); ++i) {
    std::vector<std::string> row;
    for (int j = 0; j < F->e(); ++j) row.push_back(format_rational(x.coord(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

FieldElement elem_from_json(const json& j, const FieldPtr& F) {
  require(j.is_array() && static_cast<int>(j.size()) == F->k(), errc::parse_error,
          "field element must have k coefficient rows");
  std::vector<Rat> coords(static_cast<size_t>(F->k()) * F->e(), Rat(0));
  for (int i = 0; i < F->k(); ++i) {
    const json& row = j[static_cast<size_t>(i)];
    require(row.is_array() && static_cast<int>(row.size()) == F->e(), errc::parse_error,
            "field element row must have e entries");
    for (int jj = 0; jj < F->e(); ++jj)
      coords[static_cast<size_t>(i + F->k() * jj)] =
          parse_rational(row[static_cast<size_t>(jj)].get<std::string>());
  }
  return FieldElement::from_coords(F, std::move(coords));
}

void run_parallel(long count, int threads, const std::function<void(long)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        while (true) {
          long i = next.fetch_add(1);
          if (i >= count) break;
          fn(i);
        }
      } catch (...) {
        errors[static_cast<size_t>(t)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

/* ---------------- JobSpec JSON ---------------- */

JobSpec jobspec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("invalid JSON: ") + e.what());
  }
  JobSpec job;
  require(j.contains("field") && j["field"].is_object(), errc::parse_error, "missing field block");
  const json& f = j["field"];
  require(f.contains("p"), errc::parse_error, "missing field.p");
  if (f["p"].is_number_integer())
    job.p = Int(f["p"].get<long>());
  else
    job.p = Int(f["p"].get<std::string>());
  job.e = f.value("e", 1);
  if (f.contains("residue_modulus")) {
    for (const auto& c : f["residue_modulus"]) job.residue_modulus.push_back(c.get<int64_t>());
  } else {
    job.residue_modulus = {0, 1};  // F_p itself
  }

  require(j.contains("f"), errc::parse_error, "missing polynomial f");
  if (j["f"].is_string()) {
    job.f_text = j["f"].get<std::string>();
  } else if (j["f"].is_array()) {
    for (const auto& c : j["f"]) {
      std::vector<std::vector<std::string>> rows;
      for (const auto& row : c) {
        std::vector<std::string> r;
        for (const auto& s : row) r.push_back(s.get<std::string>());
        rows.push_back(std::move(r));
      }
      job.f_coeffs.push_back(std::move(rows));
    }
  } else {
    fail(errc::parse_error, "f must be a string or a coefficient array");
  }

  if (j.contains("options")) {
    const json& o = j["options"];
    if (o.contains("precision_cap")) job.precision_cap = parse_rational(o["precision_cap"].get<std::string>());
    job.max_extension = o.value("max_extension", job.max_extension);
    job.threads = o.value("threads", job.threads);
    job.verbose = o.value("verbose", job.verbose);
    job.emit_fixture = o.value("emit_fixture", job.emit_fixture);
  }
  return job;
}

std::string jobspec_to_json(const JobSpec& job) {
  json j;
  j["field"]["p"] = job.p.get_str();
  j["field"]["e"] = job.e;
  j["field"]["residue_modulus"] = job.residue_modulus;
  if (!job.f_text.empty()) {
    j["f"] = job.f_text;
  } else {
    j["f"] = job.f_coeffs;
  }
  json o;
  if (job.precision_cap) o["precision_cap"] = format_rational(*job.precision_cap);
  o["max_extension"] = job.max_extension;
  o["threads"] = job.threads;
  o["verbose"] = job.verbose;
  o["emit_fixture"] = job.emit_fixture;
  j["options"] = o;
  return j.dump(2);
}

/* ---------------- polynomial grammar ---------------- */

namespace {

struct PolyParser {
  const std::string& s;
  size_t pos = 0;
  const FieldPtr& F;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  [[noreturn]] void err(const std::string& what) {
    fail(errc::parse_error, what + " at position " + std::to_string(pos));
  }

  Int parse_int() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) err("expected an integer");
    return Int(s.substr(start, pos - start));
  }

  long parse_exponent() {
    if (peek() == '^') {
      ++pos;
      return parse_int().get_si();
    }
    return 1;
  }

  /* one term: product of rational / pi^j / u^i / X^i factors */
  void parse_term(std::vector<FieldElement>& coeffs, int sign) {
    FieldElement c = FieldElement::one(F);
    if (sign < 0) c = -c;
    long xpow = 0;
    bool any = false;
    while (true) {
      skip_ws();
      if (pos >= s.size()) break;
      char ch = s[pos];
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        Int num = parse_int();
        Rat q(num);
        if (peek() == '/') {
          ++pos;
          Int den = parse_int();
          require(den != 0, errc::parse_error, "zero denominator");
          q = Rat(num) / Rat(den);
        }
        c = c * q;
        any = true;
      } else if (s.compare(pos, 2, "pi") == 0) {
        pos += 2;
        long t = parse_exponent();
        c = c * FieldElement::pi_pow(F, t);
        any = true;
      } else if (ch == 'u') {
        ++pos;
        long t = parse_exponent();
        c = c * FieldElement::u_gen(F).pow(t);
        any = true;
      } else if (ch == 'X' || ch == 'x') {
        ++pos;
        if (pos < s.size() && s[pos] == '0') ++pos;  // accept X0
        xpow += parse_exponent();
        any = true;
      } else {
        break;
      }
      if (peek() == '*') {
        ++pos;
        continue;
      }
      break;
    }
    if (!any) err("expected a term");
    if (static_cast<long>(coeffs.size()) <= xpow)
      coeffs.resize(static_cast<size_t>(xpow) + 1, FieldElement::zero(F));
    coeffs[static_cast<size_t>(xpow)] = coeffs[static_cast<size_t>(xpow)] + c;
  }
};

}  // namespace

Poly parse_poly(const std::string& text, const FieldPtr& F, Var var) {
  PolyParser pp{text, 0, F};
  std::vector<FieldElement> coeffs;
  int sign = 1;
  if (pp.peek() == '-') {
    ++pp.pos;
    sign = -1;
  } else if (pp.peek() == '+') {
    ++pp.pos;
  }
  pp.parse_term(coeffs, sign);
  while (!pp.eof()) {
    char op = pp.peek();
    if (op == '+')
      sign = 1;
    else if (op == '-')
      sign = -1;
    else
      pp.err("expected + or -");
    ++pp.pos;
    pp.parse_term(coeffs, sign);
  }
  return Poly::from_coeffs(F, std::move(coeffs), var);
}

/* ---------------- run ---------------- */

namespace {

struct StageTimer {
  Report& rep;
  std::string name;
  std::chrono::steady_clock::time_point start;
  StageTimer(Report& r, std::string n) : rep(r), name(std::move(n)), start(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    auto dt = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    rep.timings_ms.emplace_back(name, dt.count());
  }
};

}  // namespace

Report run(const JobSpec& job) {
  Report rep;
  rep.job = job;
  std::string stage = "setup";
  try {
    FieldPtr base;
    Poly f;
    {
      StageTimer t(rep, "setup");
      base = FieldDescriptor::make_with_lift(job.p, job.e, [&] {
        std::vector<Int> lift;
        Int pz = job.p;
        for (int64_t c : job.residue_modulus) {
          Int v(static_cast<long>(c));
          v %= pz;
          if (v < 0) v += pz;
          lift.push_back(v);
        }
        if (!lift.empty()) lift.back() = 1;
        return lift;
      }(), job.precision_cap);
      if (!job.f_text.empty()) {
        f = parse_poly(job.f_text, base, Var::X0);
      } else {
        std::vector<FieldElement> coeffs;
        for (const auto& c : job.f_coeffs) {
          json cj = json::array();
          for (const auto& row : c) {
            json rj = json::array();
            for (const auto& x : row) rj.push_back(x);
            cj.push_back(rj);
          }
          coeffs.push_back(elem_from_json(cj, base));
        }
        f = Poly::from_coeffs(base, std::move(coeffs), Var::X0);
      }
      rep.f_echo = f.str();
    }

    stage = "validate";
    ValidationResult val;
    {
      StageTimer t(rep, "validate");
      val = validate_input(f);
    }
    rep.n = val.n;
    rep.m = val.m;
    rep.genus_c = val.genus_c;
    rep.small_m_warning = val.small_m_warning;

    stage = "decompose";
    RepData rd;
    SpecialDecomposition dec;
    {
      StageTimer t(rep, "decompose");
      rd = min_reps(val.n, job.p);
      dec = special_decomposition(f, rd);
      normalize_tail(dec);
    }
    rep.r = rd.r;
    rep.alpha = rd.alpha;

    stage = "monodromy_polynomial";
    MonodromyData md;
    {
      StageTimer t(rep, "monodromy_polynomial");
      md = logderiv_parts(f);
      monodromy_polynomial(dec, md);
      rep.congruence_ok = check_congruence(md);
      require(rep.congruence_ok, errc::internal_invariant_violation,
              "monodromy polynomial fails the mod-p congruence");
    }
    for (const auto& c : md.L.coeffs()) {
      rep.L_coeffs.push_back(elem_compact(c));
      rep.L_matrix.push_back(elem_matrix(c));
    }
    {
      NewtonPolygon np = newton_polygon(md.L);
      if (np.ord_zero > 0) rep.polygon.emplace_back("inf", np.ord_zero);
      for (const auto& seg : np.segments)
        rep.polygon.emplace_back(format_rational(seg.slope), seg.length);
    }

    stage = "roots";
    auto tower = std::make_shared<FieldTower>(base, job.max_extension, job.precision_cap);
    RootSet rs;
    {
      StageTimer t(rep, "roots");
      IsolationOptions opts;
      opts.precision_cap = job.precision_cap;
      rs = isolate_roots(md.L, tower, opts);
    }
    for (const auto& rt : rs.roots)
      if (rt.multiplicity > 1) rep.has_multiple_roots = true;

    stage = "radii";
    std::vector<Rat> radii(rs.size());
    {
      StageTimer t(rep, "radii");
      const Rat lp = base->lambda_p_valuation();
      run_parallel(static_cast<long>(rs.size()), job.threads, [&](long i) {
        auto tails = tail_valuations(dec, rs, static_cast<size_t>(i));
        radii[static_cast<size_t>(i)] = radius_valuation(tails, lp);
      });
      for (const auto& rr : radii)
        require(rr > 0, errc::internal_invariant_violation, "nonpositive radius valuation");
    }

    stage = "clustering";
    DifferenceData diff;
    std::vector<CenterClass> classes;
    {
      StageTimer t(rep, "clustering");
      diff = difference_data(rs, &radii);
      classes = dedupe_centers(rs, radii, diff);
    }

    stage = "reduction";
    std::vector<ComponentData> components(classes.size());
    std::vector<char> verified(classes.size(), 0);
    {
      StageTimer t(rep, "reduction");
      long need = std::lcm(1L, rat_den(base->lambda_p_valuation()).get_si());
      for (const auto& cls : classes) need = std::lcm(need, rat_den(cls.radius).get_si());
      tower->ensure_ramification(need);
      run_parallel(static_cast<long>(classes.size()), job.threads, [&](long ci) {
        const auto& cls = classes[static_cast<size_t>(ci)];
        components[static_cast<size_t>(ci)] = reduced_equation(dec, rs, cls.rep, cls.radius);
        verified[static_cast<size_t>(ci)] = verify_reduction(dec, rs, cls.rep, cls.radius) ? 1 : 0;
      });
      rep.all_verified = true;
      for (char v : verified)
        if (!v) rep.all_verified = false;
      require(rep.all_verified, errc::internal_invariant_violation,
              "reduction verification failed at an emitted center");
    }

    stage = "tree";
    {
      StageTimer t(rep, "tree");
      rep.tree = build_tree(classes, components, rs, diff);
      /* build_tree asserts the cluster-level ultrametric inequality */
      rep.ultrametric_ok = true;
      rep.genus_sum_ok = genus_sum_check(rep.tree, val.m, job.p);
      require(rep.genus_sum_ok, errc::internal_invariant_violation,
              "leaf genera do not sum to the genus of the curve");
      if (job.p == 2 && val.m == 5) rep.reduction_type = classify_genus2(rep.tree, val.m, job.p);
    }

    stage = "bound";
    {
      StageTimer t(rep, "bound");
      rep.bound = bound_report(md, dec.s0, rs, classes, radii);
    }

    /* summaries */
    for (size_t i = 0; i < rs.size(); ++i) {
      const auto& rt = rs.roots[i];
      RootSummary s;
      const auto& K = rs.tower->field(rt.level);
      s.host_e = K->e();
      s.host_k = K->k();
      s.kind = rt.kind == ApproxRoot::Kind::branch ? "branch" : "single";
      s.count = rt.count;
      const FieldElement& shown = rt.kind == ApproxRoot::Kind::branch ? rt.center : rt.value;
      s.value = shown.str();
      s.value_matrix = elem_matrix(shown);
      s.slope = rt.slope.str();
      if (rt.kind == ApproxRoot::Kind::branch)
        s.gamma = format_rational(rt.center_gamma);
      else
        s.gamma = rt.exact ? "exact" : format_rational(rt.gamma);
      s.exact = rt.kind == ApproxRoot::Kind::single && rt.exact;
      s.multiplicity = rt.multiplicity;
      s.family = rt.family;
      rep.roots.push_back(std::move(s));
    }
    for (size_t ci = 0; ci < classes.size(); ++ci) {
      const auto& cd = components[ci];
      ComponentSummary s;
      s.class_size = static_cast<size_t>(classes[ci].class_size);
      s.n_classes = classes[ci].n_classes;
      s.radius = format_rational(cd.radius_valuation);
      for (const auto& [i, c] : cd.surviving) s.surviving.push_back(i);
      for (const auto& [i, c] : cd.as_rhs) s.as_rhs.emplace_back(i, c.c);
      s.conductor = cd.conductor;
      s.genus = cd.genus;
      s.residues_up_to_unit = cd.residues_up_to_unit;
      s.verified = verified[ci] != 0;
      rep.components.push_back(std::move(s));
    }

    rep.exit_code = 0;
  } catch (const error& e) {
    rep.exit_code = errc_is_input_error(e.code()) ? 1 : 2;
    rep.error_stage = stage;
    rep.error_code = errc_name(e.code());
    rep.error_message = e.what();
  } catch (const std::exception& e) {
    rep.exit_code = 2;
    rep.error_stage = stage;
    rep.error_code = "Unhandled";
    rep.error_message = e.what();
  }
  return rep;
}

/* ---------------- report serialization ---------------- */

std::string report_to_json(const Report& rep) {
  json j;
  j["input"] = json::parse(jobspec_to_json(rep.job));
  j["f"] = rep.f_echo;
  if (rep.exit_code != 0) {
    j["status"] = "error";
    j["error"]["stage"] = rep.error_stage;
    j["error"]["code"] = rep.error_code;
    j["error"]["message"] = rep.error_message;
    j["exit_code"] = rep.exit_code;
    return j.dump(2);
  }
  j["status"] = "ok";
  j["n"] = rep.n;
  j["m"] = rep.m;
  j["r"] = rep.r;
  j["alpha"] = rep.alpha;
  j["genus"] = format_rational(rep.genus_c);
  j["small_m_warning"] = rep.small_m_warning;
  j["monodromy_polynomial"] = rep.L_coeffs;
  j["monodromy_polynomial_coeffs"] = rep.L_matrix;
  {
    json poly = json::array();
    for (const auto& [s, l] : rep.polygon) poly.push_back({{"slope", s}, {"length", l}});
    j["newton_polygon"] = poly;
  }
  {
    json roots = json::array();
    for (const auto& rt : rep.roots) {
      json r;
      r["host"] = {{"e", rt.host_e}, {"k", rt.host_k}};
      r["kind"] = rt.kind;
      r["count"] = rt.count;
      r["value"] = rt.value;
      r["value_coeffs"] = rt.value_matrix;
      r["slope"] = rt.slope;
      r["gamma"] = rt.gamma;
      r["exact"] = rt.exact;
      r["multiplicity"] = rt.multiplicity;
      r["family"] = rt.family;
      roots.push_back(r);
    }
    j["roots"] = roots;
  }
  {
    json comps = json::array();
    for (const auto& c : rep.components) {
      json cj;
      cj["class_size"] = c.class_size;
      cj["n_classes"] = c.n_classes;
      cj["radius_valuation"] = c.radius;
      cj["surviving"] = c.surviving;
      json rhs = json::array();
      for (const auto& [i, coeffs] : c.as_rhs) rhs.push_back({{"exponent", i}, {"coeff", coeffs}});
      cj["artin_schreier_rhs"] = rhs;
      cj["conductor"] = c.conductor;
      cj["genus"] = c.genus;
      cj["residues_up_to_unit"] = c.residues_up_to_unit;
      cj["verified"] = c.verified;
      comps.push_back(cj);
    }
    j["components"] = comps;
  }
  {
    std::function<json(int)> node_json = [&](int ni) {
      const auto& nd = rep.tree.nodes[static_cast<size_t>(ni)];
      json nj;
      nj["depth"] = nd.depth.str();
      if (nd.component) {
        nj["component"] = *nd.component;
        nj["genus"] = rep.tree.components[*nd.component].genus;
      } else {
        nj["genus"] = 0;
      }
      json ch = json::array();
      for (int c : nd.children) ch.push_back(node_json(c));
      nj["children"] = ch;
      return nj;
    };
    if (!rep.tree.nodes.empty()) j["tree"] = node_json(0);
  }
  if (rep.reduction_type) j["reduction_type"] = *rep.reduction_type;
  {
    json b;
    json sd = json::array();
    for (const auto& d : rep.bound.slope_denominators) sd.push_back(d.get_str());
    b["slope_denominators"] = sd;
    json rdj = json::array();
    for (const auto& d : rep.bound.radius_denominators) rdj.push_back(d.get_str());
    b["radius_denominators"] = rdj;
    b["branch_degrees"] = rep.bound.branch_degrees;
    b["class_branch_degrees"] = rep.bound.class_branch_degrees;
    json s0v = json::array();
    for (const auto& v : rep.bound.s0_valuations) s0v.push_back(format_rational(v));
    b["s0_valuations"] = s0v;
    b["s0_residue_pth_power"] = rep.bound.s0_residue_pth_power;
    b["degree_bound"] = rep.bound.degree_bound.get_str();
    b["degree_bound_note"] = "coarse upper bound for [E:K]; not claimed minimal";
    json ann;
    ann["l"] = rep.bound.annotation.l;
    ann["s"] = rep.bound.annotation.s;
    ann["d"] = rep.bound.annotation.d;
    ann["case"] = rep.bound.annotation.case_label;
    ann["wild_bound_exponent"] = rep.bound.annotation.wild_bound_exponent;
    ann["ambiguous"] = rep.bound.annotation.ambiguous;
    b["annotation"] = ann;
    j["monodromy_bound"] = b;
  }
  j["checks"] = {{"congruence", rep.congruence_ok},
                 {"ultrametric", rep.ultrametric_ok},
                 {"genus_sum", rep.genus_sum_ok},
                 {"verify_reduction", rep.all_verified},
                 {"multiple_roots_flag", rep.has_multiple_roots}};
  {
    json t;
    for (const auto& [name, ms] : rep.timings_ms) t[name] = ms;
    j["timings_ms"] = t;
  }
  if (rep.job.emit_fixture) {
    json fx;
    fx["n"] = rep.n;
    fx["m"] = rep.m;
    fx["r"] = rep.r;
    fx["alpha"] = rep.alpha;
    fx["L"] = rep.L_coeffs;
    json radii = json::array();
    for (const auto& c : rep.components) radii.push_back(c.radius);
    fx["radii"] = radii;
    j["fixture"] = fx;
  }
  j["exit_code"] = 0;
  return j.dump(2);
}

std::string tree_to_dot(const ReductionTree& tree) {
  std::ostringstream os;
  os << "digraph reduction_tree {\n";
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& nd = tree.nodes[i];
    long g = nd.component ? tree.components[*nd.component].genus : 0;
    os << "  n" << i << " [label=\"g=" << g << " d=" << nd.depth.str() << "\"];\n";
  }
  for (size_t i = 0; i < tree.nodes.size(); ++i)
    for (int c : tree.nodes[i].children) os << "  n" << i << " -> n" << c << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace stablered
