// gonlab: command-line front end.
//
// Subcommands dispatch to one library operation each and emit deterministic
// CSV (RFC 4180) or JSON ("gonlab/1") reports. Exit codes: 0 success, 1 a
// requested audit or invariant check failed (the report is the payload),
// 2 input error.

#include "gonlab/badlab.hpp"
#include "gonlab/dynamics.hpp"
#include "gonlab/io.hpp"
#include "gonlab/minima.hpp"
#include "gonlab/templates.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

using namespace gonlab;
using nlohmann::json;

namespace {

struct Out {
  std::string path;  // empty = stdout
  std::unique_ptr<std::ofstream> file;
  std::ostream& stream() {
    if (path.empty()) return std::cout;
    if (!file) {
      file = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file) throw scalar_error("cannot open output file: " + path);
    }
    return *file;
  }
};

struct Common {
  std::string out;
  std::string config;
  int digits = 12;
  bool symbolic = false;
  long precision_bits = 256;
  int threads = 1;
  uint64_t seed = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "output file (default: stdout)");
  cmd->add_option("--digits", c.digits, "decimal digits in rendered output")
      ->check(CLI::Range(1, 200));
  cmd->add_flag("--symbolic", c.symbolic, "render exact scalars symbolically in CSV");
  cmd->add_option("--precision", c.precision_bits, "bigreal working precision in bits")
      ->check(CLI::Range(16L, 65536L));
  cmd->add_option("--threads", c.threads, "worker threads for grid loops")
      ->check(CLI::Range(1, 256));
  cmd->add_option("--seed", c.seed, "seed for randomized audits and searches");
}

std::vector<Scalar> parse_grid(const std::string& spec) {
  // "start:step:count" or a JSON array of scalar literals
  if (!spec.empty() && spec.front() == '[') {
    return parse_vector(spec);
  }
  auto first = spec.find(':');
  auto second = spec.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw scalar_error("grid must be start:step:count or a JSON array");
  Scalar start = parse_scalar(spec.substr(0, first));
  Scalar step = parse_scalar(spec.substr(first + 1, second - first - 1));
  long count = std::stol(spec.substr(second + 1));
  if (count < 1 || count > 2000000) throw scalar_error("grid count out of range");
  std::vector<Scalar> g;
  for (long i = 0; i < count; ++i) g.push_back(start + Scalar(i) * step);
  return g;
}

std::vector<size_t> parse_indices(const std::string& spec) {
  std::vector<size_t> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = detail::strip(tok);
    if (tok.empty()) continue;
    out.push_back(std::stoul(tok));
  }
  return out;
}

std::vector<long> parse_longs(const std::string& spec) {
  std::vector<long> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = detail::strip(tok);
    if (tok.empty()) continue;
    out.push_back(std::stol(tok));
  }
  return out;
}

IntVec to_intvec(const std::vector<long>& v) {
  IntVec r;
  for (long x : v) r.push_back(x);
  return r;
}

void emit_json(Out& out, const json& j) { out.stream() << j.dump(2) << "\n"; }

void write_sequence_csv(Out& out, const BestApproxSequence& seq, const Common& c) {
  CsvWriter csv(out.stream(), c.digits, c.symbolic);
  csv.header({"l", "M_l", "zeta_l", "Delta_l", "witness_q"});
  for (size_t l = 0; l < seq.entries.size(); ++l) {
    std::string wit;
    for (size_t j = 0; j < seq.entries[l].witness.size(); ++j) {
      if (j) wit += " ";
      wit += seq.entries[l].witness[j].get_str();
    }
    std::string delta =
        (l + 1 < seq.entries.size()) ? csv.render(seq.delta(l)) : std::string();
    csv.row_strings({std::to_string(l + 1), seq.entries[l].M.get_str(),
                     csv.render(seq.entries[l].zeta), delta, wit});
  }
}

// Merge a JSON config file into argv-style tokens; explicit flags win because
// they come later and every option takes the last value.
std::vector<std::string> config_tokens(const std::string& path, const CLI::App* cmd) {
  std::ifstream in(path);
  if (!in) throw scalar_error("cannot open config file: " + path);
  json j = json::parse(in);
  std::vector<std::string> tokens;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string name = "--" + it.key();
    if (!cmd->get_option_no_throw(name)) throw scalar_error("unknown config key: " + it.key());
    std::string val;
    if (it.value().is_string())
      val = it.value().get<std::string>();
    else
      val = it.value().dump();
    tokens.push_back(name + "=" + val);
  }
  return tokens;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gonlab: exact-arithmetic experiments with lattices, grids, and approximation"};
  app.require_subcommand(1);

  // shared state filled by whichever subcommand runs
  struct Args {
    Common common;
    std::string matrix, eta, theta, basis, shift, grid, subseq, atail, lk, gammas, map,
        b_vec, base, direction, qvec, pvec, mode = "line";
    long m = 1, n = 1, k = 1, tmax = 100, Q = 100, Q0 = 1, level = 1, levels = 0, steps = 10,
         planeQ = 10000, fullQ = 4, M = 5, budget = 200, resolution = 100, samples = 100000,
         kmax = 4, tail_start = 0, bins = 32;
    double eps_d = 0.05;
    std::string Qlist, epsilon = "rat:1/20", delta = "rat:1/10", Aconst, Bconst, theta_norm = "0",
                window = "1", Qscalar = "3";
    bool validate = false, require_nonzero = false, no_centers = false, audit_growth = false,
         csv = false;
  } a;

  auto add_dims = [&](CLI::App* cmd) {
    cmd->add_option("--m", a.m, "target dimension m")->check(CLI::Range(1L, 8L));
    cmd->add_option("--n", a.n, "coefficient dimension n")->check(CLI::Range(1L, 8L));
  };

  std::map<std::string, std::function<int(Out&)>> runners;

  // --- bestapprox ---------------------------------------------------------
  auto* c_psi = app.add_subcommand("psi", "irrationality measure function: jump table of Psi_A up to tmax");
  c_psi->add_option("--matrix", a.matrix, "matrix A as JSON rows of scalar literals")->required();
  add_dims(c_psi);
  c_psi->add_option("--tmax", a.tmax, "enumeration horizon");
  add_common(c_psi, a.common);
  runners["psi"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    auto seq = best_approx_sequence(parse_matrix(a.matrix), a.tmax, dims);
    write_sequence_csv(out, seq, a.common);
    return 0;
  };

  auto* c_seq = app.add_subcommand("seq", "best-approximation sequence (M_l, zeta_l, Delta_l) with optional growth audit");
  c_seq->add_option("--matrix", a.matrix)->required();
  add_dims(c_seq);
  c_seq->add_option("--tmax", a.tmax);
  c_seq->add_flag("--audit-growth", a.audit_growth, "fail (exit 1) if the doubling bound is violated");
  add_common(c_seq, a.common);
  runners["seq"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    auto seq = best_approx_sequence(parse_matrix(a.matrix), a.tmax, dims);
    write_sequence_csv(out, seq, a.common);
    if (a.audit_growth) {
      auto g = growth_audit(seq);
      if (!g.inconclusive && !g.violations.empty()) return 1;
    }
    return 0;
  };

  auto* c_classc = app.add_subcommand("classc", "finite-horizon class-C diagnostic report");
  c_classc->add_option("--matrix", a.matrix)->required();
  add_dims(c_classc);
  c_classc->add_option("--tmax", a.tmax);
  c_classc->add_option("--subseq", a.subseq, "comma list of 1-based indices l_k (default: auto)");
  add_common(c_classc, a.common);
  runners["classc"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    auto seq = best_approx_sequence(parse_matrix(a.matrix), a.tmax, dims);
    std::vector<size_t> lk;
    if (!a.subseq.empty())
      for (size_t i : parse_indices(a.subseq)) {
        if (i < 1) throw scalar_error("subsequence indices are 1-based");
        lk.push_back(i - 1);
      }
    auto rep = class_c_test(seq, lk);
    json j = report_envelope("classc");
    j["verdict"] = ClassCReport::verdict_name(rep.verdict);
    j["subsequence"] = json::array();
    for (size_t i : rep.subsequence) j["subsequence"].push_back(i + 1);
    j["partial_sums"] = json::array();
    for (const auto& s : rep.partial_sums) j["partial_sums"].push_back(scalar_field(s, a.common.digits));
    j["H"] = json::array();
    for (const auto& h : rep.H) j["H"].push_back(scalar_field(h, a.common.digits));
    j["finite_horizon_sup"] = rep.finite_horizon_sup;
    j["sums_divergent_trend"] = rep.sums_divergent_trend;
    j["h_decreasing_trend"] = rep.h_decreasing_trend;
    emit_json(out, j);
    return 0;
  };

  // --- minima --------------------------------------------------------------
  auto* c_min = app.add_subcommand("minima", "successive minima of a parametric parallelepiped");
  c_min->add_option("--theta", a.theta, "target vector (JSON array of scalar literals)")->required();
  c_min->add_option("--Q", a.Qscalar, "body parameter Q >= 1 (scalar literal)");
  add_common(c_min, a.common);
  runners["minima"] = [&](Out& out) {
    Vec theta = parse_vector(a.theta);
    auto body = Parallelepiped::target_body(theta, parse_scalar(a.Qscalar));
    auto mr = body_minima(body);
    json j = report_envelope("minima");
    j["capped"] = mr.capped;
    j["lambda"] = json::array();
    for (const auto& l : mr.lambda) j["lambda"].push_back(scalar_field(l, a.common.digits));
    j["witnesses"] = json::array();
    for (const auto& w : mr.witnesses) {
      json ws = json::array();
      for (const auto& x : w) ws.push_back(x.get_str());
      j["witnesses"].push_back(ws);
    }
    auto audit = minkowski_audit(body, mr);
    j["minkowski"] = {{"product_times_volume", scalar_field(audit.product_times_volume, a.common.digits)},
                      {"lower", scalar_field(audit.lower, a.common.digits)},
                      {"upper", scalar_field(audit.upper, a.common.digits)},
                      {"pass", audit.pass}};
    emit_json(out, j);
    return audit.pass ? 0 : 1;
  };

  auto* c_prof = app.add_subcommand("profile", "log-minima profile L_j(q) over a q grid (CSV)");
  c_prof->add_option("--theta", a.theta)->required();
  c_prof->add_option("--qgrid", a.grid, "start:step:count or JSON array")->required();
  add_common(c_prof, a.common);
  runners["profile"] = [&](Out& out) {
    Vec theta = parse_vector(a.theta);
    auto prof = log_minima_profile(theta, parse_grid(a.grid));
    CsvWriter csv(out.stream(), a.common.digits, a.common.symbolic);
    std::vector<std::string> head = {"q"};
    for (size_t j = 0; j < theta.size() + 1; ++j) head.push_back("L" + std::to_string(j + 1));
    csv.header(head);
    for (size_t i = 0; i < prof.q_grid.size(); ++i) {
      std::vector<std::string> row = {csv.render(prof.q_grid[i])};
      for (const auto& L : prof.L[i]) row.push_back(csv.render(L));
      csv.row_strings(row);
    }
    return 0;
  };

  // --- templates -----------------------------------------------------------
  auto* c_tpl = app.add_subcommand("template", "rational 3-system template on [1, Q-1]");
  c_tpl->add_option("--Q", a.Qscalar, "template parameter Q > 2 (scalar literal)");
  c_tpl->add_option("--levels", a.levels, "self-similar levels beyond the base interval")
      ->check(CLI::Range(0L, 24L));
  c_tpl->add_flag("--validate", a.validate, "run the axiom validator; exit 1 on violations");
  add_common(c_tpl, a.common);
  runners["template"] = [&](Out& out) {
    auto P = a.levels > 0 ? self_similar_extend(parse_scalar(a.Qscalar), static_cast<int>(a.levels))
                          : appendix_template(parse_scalar(a.Qscalar));
    json j = report_envelope("template");
    j["template"] = three_system_to_json(P);
    int rc = 0;
    if (a.validate) {
      auto v = validate_three_system(P);
      j["violations"] = v.size();
      rc = v.empty() ? 0 : 1;
    }
    emit_json(out, j);
    return rc;
  };

  auto* c_ext = app.add_subcommand("extend", "self-similar extension of the template over level intervals");
  c_ext->add_option("--Q", a.Qscalar);
  c_ext->add_option("--levels", a.levels, "number of extra levels")->check(CLI::Range(0L, 24L));
  c_ext->add_flag("--validate", a.validate);
  add_common(c_ext, a.common);
  runners["extend"] = [&](Out& out) {
    auto P = self_similar_extend(parse_scalar(a.Qscalar), static_cast<int>(a.levels));
    json j = report_envelope("template");
    j["template"] = three_system_to_json(P);
    int rc = 0;
    if (a.validate) {
      auto v = validate_three_system(P);
      j["violations"] = v.size();
      rc = v.empty() ? 0 : 1;
    }
    emit_json(out, j);
    return rc;
  };

  auto* c_claims = app.add_subcommand("claims", "chord bound and endpoint equalities for the extended template");
  c_claims->add_option("--Q", a.Qscalar);
  c_claims->add_option("--levels", a.levels)->check(CLI::Range(0L, 24L));
  add_common(c_claims, a.common);
  runners["claims"] = [&](Out& out) {
    Scalar Q = parse_scalar(a.Qscalar);
    auto P = self_similar_extend(Q, static_cast<int>(a.levels));
    auto c = template_claims_check(P, Q);
    json j = report_envelope("claims");
    j["chord_upper_holds"] = c.chord_upper_holds;
    j["endpoint_equality_holds"] = c.endpoint_equality_holds;
    emit_json(out, j);
    return (c.chord_upper_holds && c.endpoint_equality_holds) ? 0 : 1;
  };

  auto* c_tr = app.add_subcommand("transfer", "power bounds on Psi from linear bounds on L_1");
  c_tr->add_option("--A", a.Aconst, "slope A in (0,1), scalar literal")->required();
  c_tr->add_option("--B", a.Bconst, "offset B > 0, scalar literal")->required();
  c_tr->add_option("--theta-norm", a.theta_norm, "||theta|| for the lower direction");
  c_tr->add_option("--direction", a.mode, "lower | upper")->check(CLI::IsMember({"lower", "upper"}));
  add_common(c_tr, a.common);
  runners["transfer"] = [&](Out& out) {
    Scalar A = parse_scalar(a.Aconst), B = parse_scalar(a.Bconst);
    TransferenceBounds t = (a.mode == "lower")
                               ? psi_lower_from_L1(A, B, parse_scalar(a.theta_norm))
                               : psi_upper_from_L1(A, B);
    json j = report_envelope("transfer");
    j["direction"] = a.mode;
    j["coefficient"] = scalar_field(t.coefficient, a.common.digits);
    j["exponent"] = scalar_field(t.exponent, a.common.digits, true);
    emit_json(out, j);
    return 0;
  };

  // --- dynamics -------------------------------------------------------------
  auto* c_flow = app.add_subcommand("flow", "systole of h_t basis along a t grid (CSV)");
  c_flow->add_option("--basis", a.basis, "d x d basis, JSON rows of scalar literals")->required();
  add_dims(c_flow);
  c_flow->add_option("--tgrid", a.grid, "start:step:count or JSON array")->required();
  add_common(c_flow, a.common);
  runners["flow"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    LatticeBasis x(dims, parse_matrix(a.basis));
    auto curve = systole_curve(x, parse_grid(a.grid));
    CsvWriter csv(out.stream(), a.common.digits, a.common.symbolic);
    csv.header({"t", "systole", "witness"});
    for (const auto& p : curve.points) {
      std::string wit;
      for (size_t j = 0; j < p.witness.size(); ++j) {
        if (j) wit += " ";
        wit += p.witness[j].get_str();
      }
      csv.row_strings({csv.render(p.t), csv.render(p.systole), wit});
    }
    return 0;
  };

  auto* c_w = app.add_subcommand("weights", "wedge weights of the diagonal flow (CSV)");
  add_dims(c_w);
  c_w->add_option("--k", a.k, "exterior power")->check(CLI::Range(1L, 16L));
  c_w->add_flag("--require-nonzero", a.require_nonzero, "exit 1 when a zero weight exists");
  add_common(c_w, a.common);
  runners["weights"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    auto t = wedge_weights(dims, static_cast<int>(a.k));
    CsvWriter csv(out.stream(), a.common.digits, a.common.symbolic);
    csv.header({"I", "exponent"});
    for (const auto& r : t.rows) csv.row_strings({r.I.to_string(), std::to_string(r.exponent)});
    return (a.require_nonzero && !t.zero_rows.empty()) ? 1 : 0;
  };

  auto* c_val = app.add_subcommand("values", "value set of a grid with coverage report");
  c_val->add_option("--basis", a.basis, "d x d basis (JSON rows); identity if omitted");
  c_val->add_option("--shift", a.shift, "grid shift (JSON array)")->required();
  add_dims(c_val);
  c_val->add_option("--Q", a.Q, "coefficient bound");
  c_val->add_option("--window", a.window, "coverage window [0, s]");
  c_val->add_option("--bins", a.bins)->check(CLI::Range(1L, 100000L));
  c_val->add_flag("--csv", a.csv, "emit the sorted value list as CSV instead of JSON");
  add_common(c_val, a.common);
  runners["values"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    Mat basis = a.basis.empty() ? Mat::identity(dims.d()) : parse_matrix(a.basis);
    Grid y(LatticeBasis(dims, basis), parse_vector(a.shift));
    auto rep = value_set_sample(y, a.Q, dims, parse_scalar(a.window), a.bins);
    if (a.csv) {
      CsvWriter csv(out.stream(), a.common.digits, a.common.symbolic);
      csv.header({"value"});
      for (const auto& v : rep.values) csv.row_strings({csv.render(v)});
      return 0;
    }
    json j = report_envelope("values");
    j["inf"] = scalar_field(rep.inf_value, a.common.digits, a.common.symbolic);
    json iw = json::array();
    for (const auto& x : rep.inf_witness) iw.push_back(x.get_str());
    j["inf_witness"] = iw;
    j["count"] = rep.values.size();
    j["window"] = scalar_field(rep.window, a.common.digits);
    j["bins"] = rep.bins;
    j["bins_hit"] = rep.bins_hit;
    j["max_gap"] = scalar_field(rep.max_gap, a.common.digits);
    emit_json(out, j);
    return 0;
  };

  auto* c_f = app.add_subcommand("fourier", "Fourier coefficient of a pushed-forward measure");
  c_f->add_option("--mode", a.mode, "line | haar")->check(CLI::IsMember({"line", "haar"}));
  c_f->add_option("--base", a.base, "line base point w (JSON array)");
  c_f->add_option("--direction", a.direction, "line direction u (JSON array)");
  c_f->add_option("--basis", a.basis, "source lattice basis for haar mode (JSON rows)");
  c_f->add_option("--map-t", a.Aconst, "flow time t (scalar literal); exclusive with --map");
  c_f->add_option("--map", a.map, "explicit map matrix (JSON rows)");
  c_f->add_option("--b", a.b_vec, "character vector (JSON array)")->required();
  add_dims(c_f);
  add_common(c_f, a.common);
  runners["fourier"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    Mat M = a.map.empty() ? flow_matrix(a.Aconst.empty() ? Scalar(0) : parse_scalar(a.Aconst), dims)
                          : parse_matrix(a.map);
    Vec b = parse_vector(a.b_vec);
    json j = report_envelope("fourier");
    ComplexScalar value;
    if (a.mode == "line") {
      LineMeasure mu(parse_vector(a.base), parse_vector(a.direction));
      value = pushforward_fourier_line(mu, M, b);
    } else {
      Mat basis = a.basis.empty() ? Mat::identity(dims.d()) : parse_matrix(a.basis);
      LatticeBasis x0(dims, basis);
      auto h = pushforward_fourier_haar(x0, M, b, x0);
      value = h.value;
      j["exact_decision"] = h.exact_decision;
    }
    j["re"] = scalar_field(value.re, a.common.digits);
    j["im"] = scalar_field(value.im, a.common.digits);
    j["abs"] = scalar_field(value.abs(), a.common.digits);
    j["error_radius"] = value.re.error_radius().get_d() + value.im.error_radius().get_d();
    emit_json(out, j);
    return 0;
  };

  auto* c_coset = app.add_subcommand("coset", "integer relation harvest and unimodular reduction of a vector sequence");
  c_coset->add_option("--gammas", a.gammas, "CSV file of integer rows, or inline JSON [[..],[..]]")->required();
  c_coset->add_option("--tail-start", a.tail_start, "ignore entries before this index");
  add_common(c_coset, a.common);
  runners["coset"] = [&](Out& out) {
    std::vector<IntVec> gammas;
    std::string g = detail::strip(a.gammas);
    if (!g.empty() && g.front() == '[') {
      json arr = json::parse(g);
      for (const auto& row : arr) {
        IntVec v;
        for (const auto& x : row) v.push_back(mpz_class(x.get<long>()));
        gammas.push_back(v);
      }
    } else {
      std::ifstream in(g);
      if (!in) throw scalar_error("cannot open gammas file: " + g);
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::strip(line).empty()) continue;
        IntVec v;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) v.push_back(mpz_class(detail::strip(tok)));
        gammas.push_back(v);
      }
    }
    auto ce = coset_extract(gammas, static_cast<size_t>(a.tail_start));
    json j = report_envelope("coset");
    j["rank"] = ce.rank;
    j["degenerate"] = ce.degenerate;
    auto dump_rows = [](const std::vector<IntVec>& rows) {
      json out = json::array();
      for (const auto& r : rows) {
        json v = json::array();
        for (const auto& x : r) v.push_back(x.get_str());
        out.push_back(v);
      }
      return out;
    };
    j["relations"] = dump_rows(ce.relation_basis);
    json gm = json::array();
    for (size_t i = 0; i < ce.gamma.rows(); ++i) {
      json row = json::array();
      for (size_t c = 0; c < ce.gamma.cols(); ++c) row.push_back(ce.gamma(i, c).get_str());
      gm.push_back(row);
    }
    j["gamma"] = gm;
    j["residual_constants"] = json::array();
    for (const auto& x : ce.residual_constants) j["residual_constants"].push_back(x.get_str());
    j["subtorus_basis"] = dump_rows(ce.S.basis);
    emit_json(out, j);
    return 0;
  };

  auto* c_tail = app.add_subcommand("tailspan", "smallest subspace containing a tail of a subspace sequence");
  c_tail->add_option("--subspaces", a.gammas, "JSON: list of subspaces, each a list of integer vectors")->required();
  add_common(c_tail, a.common);
  runners["tailspan"] = [&](Out& out) {
    json arr = json::parse(a.gammas);
    std::vector<RationalSubspace> vs;
    size_t ambient = 0;
    for (const auto& sub : arr) {
      std::vector<IntVec> basis;
      for (const auto& row : sub) {
        IntVec v;
        for (const auto& x : row) v.push_back(mpz_class(x.get<long>()));
        basis.push_back(v);
      }
      if (!basis.empty()) ambient = basis[0].size();
      vs.push_back(RationalSubspace::span_of(basis, ambient));
    }
    auto ts = tail_span_limit(vs);
    json j = report_envelope("tailspan");
    j["dim"] = ts.v_infinity.dim();
    j["stabilization_index"] = ts.stabilization_index;
    j["limsup_dim"] = ts.limsup_dim;
    j["dim_jump"] = ts.dim_jump;
    json basis = json::array();
    for (const auto& r : ts.v_infinity.basis) {
      json v = json::array();
      for (const auto& x : r) v.push_back(x.get_str());
      basis.push_back(v);
    }
    j["basis"] = basis;
    emit_json(out, j);
    return 0;
  };

  // --- badlab ----------------------------------------------------------------
  auto* c_bad = app.add_subcommand("bad", "badness score over a coefficient shell");
  c_bad->add_option("--matrix", a.matrix)->required();
  add_dims(c_bad);
  c_bad->add_option("--eta", a.eta, "target vector (JSON array)")->required();
  c_bad->add_option("--Q0", a.Q0);
  c_bad->add_option("--Q", a.Q);
  c_bad->add_option("--doubling-steps", a.steps, "also emit the shell profile");
  add_common(c_bad, a.common);
  runners["bad"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    Mat A = parse_matrix(a.matrix);
    Vec eta = parse_vector(a.eta);
    BadnessQuery q{A, dims, eta, a.Q0, a.Q};
    auto sc = badness_score(q);
    json j = report_envelope("bad");
    j["query"] = {{"Q0", a.Q0}, {"Q", a.Q}};
    j["score"] = scalar_field(sc.score, a.common.digits);
    json qw = json::array(), pw = json::array();
    for (const auto& x : sc.q) qw.push_back(x.get_str());
    for (const auto& x : sc.p) pw.push_back(x.get_str());
    j["witness"] = {{"q", qw}, {"p", pw}};
    if (c_bad->count("--doubling-steps")) {
      auto prof = shell_profile(A, dims, eta, static_cast<int>(a.steps));
      json shells = json::array();
      for (const auto& r : prof.rows)
        shells.push_back({{"Q0", r.Q0},
                          {"Q1", r.Q1},
                          {"shell_score", scalar_field(r.shell_score, a.common.digits)},
                          {"running_min", scalar_field(r.running_min, a.common.digits)}});
      j["shells"] = shells;
      j["last_decrease_at"] = prof.last_decrease_at;
    }
    emit_json(out, j);
    return 0;
  };

  auto* c_scan = app.add_subcommand("scan", "badness along a translated line of targets (CSV)");
  c_scan->add_option("--matrix", a.matrix)->required();
  add_dims(c_scan);
  c_scan->add_option("--q0", a.qvec, "comma list for q0");
  c_scan->add_option("--p0", a.pvec, "comma list for p0");
  c_scan->add_option("--eta", a.eta)->required();
  c_scan->add_option("--tgrid", a.grid)->required();
  c_scan->add_option("--Q", a.Q);
  c_scan->add_option("--eps", a.epsilon, "threshold (scalar literal)");
  add_common(c_scan, a.common);
  runners["scan"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    Mat A = parse_matrix(a.matrix);
    IntVec q0 = a.qvec.empty() ? IntVec(dims.n, 0) : to_intvec(parse_longs(a.qvec));
    IntVec p0 = a.pvec.empty() ? IntVec(dims.m, 0) : to_intvec(parse_longs(a.pvec));
    auto scan = coset_scan(A, dims, q0, p0, parse_vector(a.eta), parse_grid(a.grid), a.Q,
                           parse_scalar(a.epsilon));
    CsvWriter csv(out.stream(), a.common.digits, a.common.symbolic);
    csv.header({"t", "score"});
    for (const auto& [t, s] : scan.scores) csv.row_strings({csv.render(t), csv.render(s)});
    std::ostringstream frac;
    frac << scan.fraction_above;
    csv.row_strings({"fraction_above", frac.str()});
    return 0;
  };

  auto* c_meas = app.add_subcommand("measure", "fraction of an eta grid with badness above eps, per checkpoint");
  c_meas->add_option("--matrix", a.matrix)->required();
  add_dims(c_meas);
  c_meas->add_option("--resolution", a.resolution, ">= 10 per axis");
  c_meas->add_option("--Qs", a.Qlist, "comma list of checkpoints")->required();
  c_meas->add_option("--eps", a.epsilon);
  add_common(c_meas, a.common);
  runners["measure"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    auto md = bad_measure_estimate(parse_matrix(a.matrix), dims, static_cast<int>(a.resolution),
                                   parse_longs(a.Qlist), parse_scalar(a.epsilon),
                                   a.common.threads);
    json j = report_envelope("measure");
    j["grid_size"] = md.grid_size;
    json rows = json::array();
    for (size_t i = 0; i < md.checkpoints.size(); ++i)
      rows.push_back({{"Q", md.checkpoints[i]}, {"fraction_above", md.fraction_above[i]}});
    j["checkpoints"] = rows;
    emit_json(out, j);
    return 0;
  };

  auto* c_pell = app.add_subcommand("pell", "exact product certificate for the block lattice with shift 1/2");
  c_pell->add_option("--mblock", a.M, "m (= n); the lattice lives in dimension 2m");
  c_pell->add_option("--plane-Q", a.planeQ, "projection enumeration bound");
  c_pell->add_option("--full-Q", a.fullQ, "full-dimensional enumeration bound");
  c_pell->add_option("--tgrid", a.grid, "flow times for the systole check");
  add_common(c_pell, a.common);
  runners["pell"] = [&](Out& out) {
    std::vector<Scalar> ts;
    if (!a.grid.empty()) ts = parse_grid(a.grid);
    auto cert = pell_certificate(static_cast<int>(a.M), a.planeQ, a.fullQ, ts);
    json j = report_envelope("pell");
    j["m"] = cert.m;
    j["plane_infimum"] = scalar_field(cert.plane_infimum, a.common.digits, true);
    j["value_bound"] = scalar_field(cert.value_bound, a.common.digits, true);
    j["algebra_ok"] = cert.algebra_ok;
    j["plane_enum_min"] = scalar_field(cert.plane_enum_min, a.common.digits, true);
    j["full_enum_min"] = scalar_field(cert.full_enum_min, a.common.digits, true);
    j["enum_ok"] = cert.enum_ok;
    j["systole_ok"] = cert.systole_ok;
    json sys = json::array();
    for (const auto& [t, s] : cert.systole)
      sys.push_back({{"t", scalar_field(t, a.common.digits)}, {"systole", scalar_field(s, a.common.digits)}});
    j["systole"] = sys;
    emit_json(out, j);
    return (cert.algebra_ok && cert.enum_ok && cert.systole_ok) ? 0 : 1;
  };

  auto* c_box = app.add_subcommand("boxcheck", "covering-box check: every B_l(eta) contains a point Aq - p");
  c_box->add_option("--matrix", a.matrix)->required();
  add_dims(c_box);
  c_box->add_option("--l", a.level, "1-based jump index l");
  c_box->add_option("--eta-count", a.resolution, "grid points per axis");
  add_common(c_box, a.common);
  runners["boxcheck"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    Mat A = parse_matrix(a.matrix);
    if (a.level < 1) throw scalar_error("l is 1-based");
    auto seq = best_approx_sequence(A, mpz_class(1) << 40, dims, static_cast<size_t>(a.level) + 1);
    if (seq.entries.size() < static_cast<size_t>(a.level) + 1)
      throw scalar_error("sequence ended before l+1 entries");
    std::vector<Vec> etas;
    long R = a.resolution;
    std::vector<long> idx(dims.m, 0);
    while (true) {
      Vec eta(dims.m);
      for (int i = 0; i < dims.m; ++i) eta[i] = Scalar(mpq_class(idx[i], R));
      etas.push_back(eta);
      int i = dims.m - 1;
      while (i >= 0 && idx[i] == R - 1) { idx[i] = 0; --i; }
      if (i < 0) break;
      ++idx[i];
    }
    auto rep = box_cover_check(seq, static_cast<size_t>(a.level) - 1, etas);
    json j = report_envelope("boxcheck");
    j["l"] = a.level;
    j["R"] = scalar_field(rep.R, a.common.digits);
    j["side"] = scalar_field(rep.side, a.common.digits);
    j["grid_points"] = rep.grid_points;
    j["hits"] = rep.hits;
    j["all_hit"] = rep.all_hit();
    emit_json(out, j);
    return rep.all_hit() ? 0 : 1;
  };

  auto* c_cover = app.add_subcommand("cover", "build and audit a covering plan over a chosen subsequence");
  c_cover->add_option("--matrix", a.matrix)->required();
  add_dims(c_cover);
  c_cover->add_option("--lk", a.lk, "comma list of 1-based indices l_k")->required();
  c_cover->add_option("--eps", a.epsilon);
  c_cover->add_option("--kmax", a.kmax);
  c_cover->add_flag("--no-centers", a.no_centers, "geometry only");
  add_common(c_cover, a.common);
  runners["cover"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    Mat A = parse_matrix(a.matrix);
    std::vector<size_t> lk;
    for (size_t i : parse_indices(a.lk)) {
      if (i < 1) throw scalar_error("l_k indices are 1-based");
      lk.push_back(i - 1);
    }
    size_t need = lk.empty() ? 2 : lk.back() + 2;
    auto seq = best_approx_sequence(A, mpz_class(1) << 40, dims, need);
    if (seq.entries.size() < need) throw scalar_error("sequence ended before the requested l_k");
    auto plan = covering_plan_build(seq, lk, parse_scalar(a.epsilon), static_cast<size_t>(a.kmax),
                                    !a.no_centers);
    json j = report_envelope("cover");
    json levels = json::array();
    bool all_ok = true;
    for (const auto& lev : plan.levels) {
      json L;
      L["k"] = lev.k;
      L["l"] = lev.l + 1;
      L["H"] = scalar_field(lev.H, a.common.digits);
      L["required_phi"] = scalar_field(lev.required_phi, a.common.digits);
      L["built"] = lev.built;
      if (lev.built) {
        L["phi"] = scalar_field(lev.phi, a.common.digits);
        L["W"] = lev.W.get_str();
        L["Wpp"] = lev.Wpp.get_str();
        L["delta_k"] = scalar_field(lev.delta_k, a.common.digits);
        L["lambda_Ek"] = scalar_field(lev.lambda_Ek, a.common.digits);
        L["centers"] = lev.centers.size();
        L["disjoint_ok"] = lev.disjoint_ok;
        all_ok = all_ok && lev.disjoint_ok;
      } else {
        L["skip_reason"] = lev.skip_reason;
      }
      levels.push_back(L);
    }
    j["levels"] = levels;
    json audits = json::array();
    for (const auto& s : plan.sharp_audits) {
      audits.push_back({{"k", s.k},
                        {"k1", s.k1},
                        {"max_count", s.max_count.get_str()},
                        {"bound", scalar_field(s.bound, a.common.digits)},
                        {"pass", s.pass}});
      all_ok = all_ok && s.pass;
    }
    j["sharp_audits"] = audits;
    j["notes"] = plan.notes;
    json sums = json::array();
    for (const auto& s : plan.phi_delta_partial_sums) sums.push_back(scalar_field(s, a.common.digits));
    j["phi_delta_partial_sums"] = sums;
    emit_json(out, j);
    return all_ok ? 0 : 1;
  };

  auto* c_aux = app.add_subcommand("auxcount", "exact feasible-count audit against the 18 M^2 bound");
  c_aux->add_option("--M", a.M);
  c_aux->add_option("--delta", a.delta, "0 < delta < 1/2 (scalar literal)");
  c_aux->add_option("--atail", a.atail, "comma list a_3..a_m (nonzero)")->required();
  c_aux->add_option("--theta1", a.Aconst, "scalar literal (default sqrt:2)");
  c_aux->add_option("--theta2", a.Bconst, "scalar literal (default sqrt:3)");
  add_common(c_aux, a.common);
  runners["auxcount"] = [&](Out& out) {
    Scalar t1 = a.Aconst.empty() ? Scalar::sqrt_of_ui(2) : parse_scalar(a.Aconst);
    Scalar t2 = a.Bconst.empty() ? Scalar::sqrt_of_ui(3) : parse_scalar(a.Bconst);
    auto rep = aux_count_audit(a.M, parse_scalar(a.delta), parse_longs(a.atail), t1, t2);
    json j = report_envelope("auxcount");
    j["count"] = rep.count.get_str();
    j["bound"] = rep.bound.get_str();
    j["pass"] = rep.pass;
    emit_json(out, j);
    return rep.pass ? 0 : 1;
  };

  auto* c_bme = app.add_subcommand("bmeasure", "Monte-Carlo audit of the slab-union measure bound");
  c_bme->add_option("--M", a.M);
  c_bme->add_option("--eps", a.eps_d);
  c_bme->add_option("--mdim", a.m, "ambient m > 2");
  c_bme->add_option("--samples", a.samples);
  add_common(c_bme, a.common);
  runners["bmeasure"] = [&](Out& out) {
    auto rep = bme_measure_audit(a.M, a.eps_d, static_cast<int>(a.m), std::sqrt(2.0),
                                 std::sqrt(3.0), static_cast<size_t>(a.samples), a.common.seed);
    json j = report_envelope("bmeasure");
    j["estimate"] = rep.estimate;
    j["standard_error"] = rep.standard_error;
    j["K"] = rep.K;
    j["bound"] = rep.bound;
    j["pass"] = rep.pass;
    j["samples"] = rep.samples;
    emit_json(out, j);
    return rep.pass ? 0 : 1;
  };

  auto* c_eta = app.add_subcommand("etasearch", "deterministic dyadic search for a high-badness target");
  c_eta->add_option("--matrix", a.matrix)->required();
  add_dims(c_eta);
  c_eta->add_option("--Q", a.Q);
  c_eta->add_option("--budget", a.budget, "score evaluations");
  add_common(c_eta, a.common);
  runners["etasearch"] = [&](Out& out) {
    Dims dims(a.m, a.n);
    auto res = eta_search(parse_matrix(a.matrix), dims, a.Q, static_cast<size_t>(a.budget),
                          a.common.seed);
    json j = report_envelope("etasearch");
    json eta = json::array();
    for (const auto& x : res.eta) eta.push_back(x.to_string());
    j["eta"] = eta;
    j["score"] = scalar_field(res.score, a.common.digits);
    j["evaluations"] = res.evaluations;
    emit_json(out, j);
    return 0;
  };

  // config file support: tokens from the file are parsed before the real
  // argv tail, so explicit flags win
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; keys mirror the long flags")
      ->expected(1);
  for (CLI::App* sub : app.get_subcommands(nullptr)) {
    sub->add_option("--config", config_path, "JSON config file; keys mirror the long flags");
    for (CLI::Option* opt : sub->get_options())
      if (opt->get_expected() > 0) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }

  try {
    // First pass only to discover the subcommand and a config file.
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!args.empty() && runners.count(args[0])) {
      // scan for --config
      std::string cfg;
      for (size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) cfg = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) cfg = args[i].substr(9);
      }
      if (!cfg.empty()) {
        CLI::App* sub = app.get_subcommand(args[0]);
        auto extra = config_tokens(cfg, sub);
        args.insert(args.begin() + 1, extra.begin(), extra.end());
      }
    }
    std::vector<const char*> cargs = {argv[0]};
    for (const auto& s : args) cargs.push_back(s.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    set_default_precision(a.common.precision_bits);
    for (CLI::App* sub : app.get_subcommands()) {
      auto it = runners.find(sub->get_name());
      if (it != runners.end()) {
        Out out;
        out.path = a.common.out;
        return it->second(out);
      }
    }
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const scalar_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
