#ifndef SCATTER_CLI_HPP
#define SCATTER_CLI_HPP

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scatter/chy.hpp"
#include "scatter/hilbert.hpp"
#include "scatter/homotopy.hpp"
#include "json.hpp"

namespace scatter::cli {

using Json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kInstanceError = 1, kNumericalFailure = 2, kCountMismatch = 3 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedInput:
    case ErrorKind::RankDeficient:
    case ErrorKind::GroundSetTooLarge:
    case ErrorKind::NotEssential:
    case ErrorKind::BadM:
    case ErrorKind::MatrixTooLarge:
      return kInstanceError;
    case ErrorKind::CountMismatch:
      return kCountMismatch;
    default:
      return kNumericalFailure;
  }
}

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline Json to_json(const RationalVector& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(format_rational(q));
  return out;
}

inline Json subset_json(Subset s) {
  Json out = Json::array();
  for (int i : to_indices(s)) out.push_back(i);
  return out;
}

inline Complex complex_from_json(const Json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_string()) return {parse_rational(e.get<std::string>()).get_d(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw Error(ErrorKind::MalformedInput, "expected a number or an [re, im] pair, got " + e.dump());
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MalformedInput, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::MalformedInput, path + ": invalid JSON: " + e.what());
  }
}

/// A vector of exponents: a JSON array of numbers, rational strings or [re, im] pairs.
inline CVector read_complex_vector(const std::string& path, int size) {
  const Json doc = read_json_file(path);
  const Json& arr = doc.is_object() && doc.contains("u") ? doc["u"] : doc;
  if (!arr.is_array() || static_cast<int>(arr.size()) != size)
    throw Error(ErrorKind::MalformedInput, path + ": expected an array of " + std::to_string(size) + " entries");
  CVector v(size);
  for (int i = 0; i < size; ++i) v(i) = complex_from_json(arr[static_cast<std::size_t>(i)]);
  return v;
}

/// Exact exponents: rational strings, integers, or real numbers (converted exactly).
inline RationalVector read_rational_vector(const std::string& path, int size) {
  const Json doc = read_json_file(path);
  const Json& arr = doc.is_object() && doc.contains("u") ? doc["u"] : doc;
  if (!arr.is_array() || static_cast<int>(arr.size()) != size)
    throw Error(ErrorKind::MalformedInput, path + ": expected an array of " + std::to_string(size) + " entries");
  RationalVector v;
  for (const auto& e : arr) {
    if (e.is_string()) {
      v.push_back(parse_rational(e.get<std::string>()));
    } else if (e.is_number_integer()) {
      v.emplace_back(mpz_class(std::to_string(e.get<long long>())));
    } else if (e.is_number()) {
      v.emplace_back(e.get<double>());
    } else {
      throw Error(ErrorKind::MalformedInput, "exact exponents must be real, got " + e.dump());
    }
  }
  return v;
}

inline CMatrix read_complex_matrix(const std::string& path, int rows, int cols) {
  const Json doc = read_json_file(path);
  if (!doc.is_array() || static_cast<int>(doc.size()) != rows)
    throw Error(ErrorKind::MalformedInput, path + ": A0 must have d = " + std::to_string(rows) + " rows");
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto& row = doc[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw Error(ErrorKind::MalformedInput, path + ": every row of A0 must have n+1 entries");
    for (int j = 0; j < cols; ++j) m(i, j) = complex_from_json(row[static_cast<std::size_t>(j)]);
  }
  return m;
}

inline std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

inline WeightOrder parse_omega(const std::string& text, int size) {
  std::vector<long long> w;
  for (const auto& item : split_commas(text)) {
    try {
      std::size_t used = 0;
      w.push_back(std::stoll(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::MalformedInput, "--omega entries must be integers, got '" + item + "'");
    }
  }
  if (static_cast<int>(w.size()) != size)
    throw Error(ErrorKind::MalformedInput, "--omega needs " + std::to_string(size) + " entries");
  return WeightOrder::make(std::move(w));
}

inline Polynomial parse_linear_form(const std::string& text, int size) {
  RationalVector coeffs;
  for (const auto& item : split_commas(text)) coeffs.push_back(parse_rational(item));
  if (static_cast<int>(coeffs.size()) != size)
    throw Error(ErrorKind::MalformedInput, "linear forms need " + std::to_string(size) + " coefficients");
  return Polynomial::linear_form(coeffs);
}

struct Options {
  std::string instance;
  std::uint64_t seed = 1;
  std::string omega;
  std::string u_file;
  std::string a0_file;
  std::string report_file;
  std::string out;
  std::string format = "json";
  TrackerConfig tracker;
  bool bench = false;
  bool return_boundary = false;
  int threads = 1;
  int m = 6;
  int q = -1;
  std::string h1;
  std::string h2;
  int bench_d = 0;
  int bench_n = 0;
  int trials = 3;
};

inline Instance load_instance(const Options& o) {
  if (o.instance.empty()) throw Error(ErrorKind::MalformedInput, "an instance file is required");
  return parse_instance(read_file(o.instance));
}

/// u from --u-file, else from the instance, else complex Gaussian draws from rng.
template <typename Rng>
CVector resolve_u(const Options& o, const Instance& inst, Rng& rng) {
  const int size = inst.arrangement.ground_size();
  if (!o.u_file.empty()) return read_complex_vector(o.u_file, size);
  if (inst.u) return *inst.u;
  CVector u(size);
  for (int i = 0; i < size; ++i) u(i) = detail::complex_gaussian(rng);
  return u;
}

template <typename Rng>
RationalVector resolve_rational_u(const Options& o, int size, Rng& rng) {
  if (!o.u_file.empty()) return read_rational_vector(o.u_file, size);
  return random_rational_vector(size, rng);
}

inline SolveConfig solve_config(const Options& o, const ArrangementMatrix& arr, std::uint64_t seed) {
  SolveConfig cfg;
  cfg.tracker = o.tracker;
  cfg.seed = seed;
  cfg.return_boundary = true;
  cfg.threads = o.threads;
  if (!o.omega.empty()) cfg.omega = parse_omega(o.omega, arr.ground_size());
  if (!o.a0_file.empty()) cfg.A0 = read_complex_matrix(o.a0_file, arr.d(), arr.ground_size());
  return cfg;
}

inline Json flat_json(const Flat& f) {
  return Json{{"support", subset_json(f.support)}, {"rank_L", f.rank_L}, {"rank_A", f.rank_A},
              {"type", std::string(to_string(f.type))}};
}

inline Json report_json(const ArrangementMatrix& arr, const CVector& u, const SolutionReport& r, bool with_boundary,
                        bool with_timings) {
  Json doc;
  doc["d"] = arr.d();
  doc["n"] = arr.n();
  doc["L"] = arrangement_to_json(arr)["L"];
  doc["u"] = to_json(u);
  doc["omega"] = r.omega.omega;
  doc["gamma"] = to_json(r.gamma);
  Json by_status = Json::object();
  for (const auto& [k, v] : r.path_stats.by_status) by_status[k] = v;
  doc["path_stats"] = {{"total", r.path_stats.total}, {"by_status", by_status}, {"unverified", r.path_stats.unverified}, {"retried", r.path_stats.retried}};
  Json interior = Json::array();
  for (const auto& s : r.interior) {
    Json paths = s.paths;
    interior.push_back({{"x", to_json(s.point.x)},
                        {"residual", s.point.residual},
                        {"hessian_ok", s.point.hessian_ok},
                        {"hessian_condition", s.hessian_condition},
                        {"y", to_json(s.y)},
                        {"paths", paths}});
  }
  doc["interior"] = interior;
  if (with_boundary) {
    Json clusters = Json::array();
    for (const auto& c : r.boundary_clusters) {
      Json paths = c.paths;
      clusters.push_back({{"support", subset_json(c.support)},
                          {"flat_type", c.type_ii ? "type_ii" : "other"},
                          {"observed_multiplicity", c.multiplicity},
                          {"paths", paths},
                          {"residual", c.residual},
                          {"y", to_json(c.representative)}});
    }
    doc["boundary_clusters"] = clusters;
  }
  const auto& cc = r.counts_check;
  doc["counts_check"] = {{"interior", cc.interior},
                         {"ml_degree", cc.ml_degree},
                         {"interior_matches", cc.interior_matches},
                         {"paths", cc.paths},
                         {"reciprocal_degree", cc.reciprocal_degree},
                         {"paths_match", cc.paths_match},
                         {"boundary_paths", cc.boundary_paths}};
  doc["warnings"] = r.warnings;
  if (with_timings) {
    doc["timings"] = {{"combinatorics", r.timings.combinatorics},
                      {"start", r.timings.start},
                      {"tracking", r.timings.tracking},
                      {"endpoints", r.timings.endpoints}};
  }
  return doc;
}

inline int report_exit_code(const SolutionReport& r) {
  if (r.path_stats.failed() > 0 || r.path_stats.unverified > 0) return kNumericalFailure;
  if (!r.counts_check.paths_match || !r.counts_check.interior_matches) return kCountMismatch;
  return kOk;
}

inline std::string fmt(double x) {
  std::ostringstream ss;
  ss << std::setprecision(6) << x;
  return ss.str();
}

inline std::string fmt(Complex z) {
  std::ostringstream ss;
  ss << std::setprecision(10) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return ss.str();
}

// ---- commands ----

inline int cmd_analyze(const Options& o, Json& doc, std::ostream& table) {
  const auto inst = load_instance(o);
  const auto& arr = inst.arrangement;
  const auto circs = circuits(arr);
  const auto all_flats = flats(arr);
  const auto omega = o.omega.empty() ? WeightOrder::identity(arr.ground_size()) : parse_omega(o.omega, arr.ground_size());
  const int rec = reciprocal_degree(arr, circs);
  std::optional<int> ml;
  if (is_essential(arr)) ml = ml_degree(arr, all_flats);
  const auto crit = degree_criterion(arr, all_flats);

  doc["d"] = arr.d();
  doc["n"] = arr.n();
  Json cj = Json::array();
  for (const auto& c : circs) cj.push_back({{"support", subset_json(c.support)}, {"alpha", to_json(c.alpha)}});
  doc["circuits"] = cj;
  Json counts = {{"type_i", 0}, {"type_ii", 0}, {"neither", 0}};
  Json fj = Json::array();
  for (const auto& f : all_flats) {
    counts[std::string(to_string(f.type))] = counts[std::string(to_string(f.type))].get<int>() + 1;
    fj.push_back(flat_json(f));
  }
  doc["flat_counts"] = counts;
  doc["flats"] = fj;
  doc["omega"] = omega.omega;
  Json bases = Json::array();
  for (Subset b : nbc_bases(arr, omega, circs)) bases.push_back(subset_json(b));
  doc["nbc_bases"] = bases;
  doc["reciprocal_degree"] = rec;
  doc["essential"] = is_essential(arr);
  doc["ml_degree"] = ml ? Json(*ml) : Json(nullptr);
  doc["beta"] = beta_invariant(arr);
  doc["connected"] = is_connected(arr);
  Json witnesses = Json::array();
  for (const auto& f : crit.witnesses) witnesses.push_back(subset_json(f.support));
  doc["criterion"] = {{"verdict", crit.equal ? "equal" : "strict"}, {"witnesses", witnesses}};

  table << "d = " << arr.d() << ", n = " << arr.n() << "\n";
  table << "circuits: " << circs.size() << "\n";
  table << "flats: " << all_flats.size() << " (type_i " << counts["type_i"] << ", type_ii " << counts["type_ii"]
        << ", neither " << counts["neither"] << ")\n";
  table << "reciprocal degree: " << rec << "\n";
  table << "ML degree: " << (ml ? std::to_string(*ml) : std::string("n/a (not essential)")) << "\n";
  table << "criterion: " << (crit.equal ? "equal" : "strict");
  for (const auto& f : crit.witnesses) table << " " << format_subset(f.support);
  table << "\n";
  return kOk;
}

inline int cmd_solve_instance(const Options& o, Json& doc, std::ostream& table) {
  const auto inst = load_instance(o);
  const auto& arr = inst.arrangement;
  std::mt19937_64 rng(o.seed);
  const CVector u = resolve_u(o, inst, rng);
  const auto cfg = solve_config(o, arr, rng());
  const auto report = track_all(arr, u, cfg);
  doc = report_json(arr, u, report, o.return_boundary, o.bench);
  table << "paths: " << report.path_stats.total << " (reciprocal degree " << report.counts_check.reciprocal_degree
        << ")\n";
  for (const auto& [k, v] : report.path_stats.by_status) table << "  " << k << ": " << v << "\n";
  table << "interior solutions: " << report.interior.size() << " (ML degree " << report.counts_check.ml_degree << ")\n";
  for (const auto& s : report.interior) {
    table << "  x =";
    for (Eigen::Index j = 0; j < s.point.x.size(); ++j) table << "  " << fmt(s.point.x(j));
    table << "   residual " << fmt(s.point.residual) << (s.point.hessian_ok ? "" : "  (degenerate Hessian)") << "\n";
  }
  if (o.return_boundary) {
    table << "boundary clusters: " << report.boundary_clusters.size() << "\n";
    for (const auto& c : report.boundary_clusters)
      table << "  " << format_subset(c.support) << "  multiplicity " << c.multiplicity << "\n";
  }
  if (o.bench) {
    table << "timings (s): combinatorics " << fmt(report.timings.combinatorics) << ", start " << fmt(report.timings.start)
          << ", tracking " << fmt(report.timings.tracking) << ", endpoints " << fmt(report.timings.endpoints) << "\n";
  }
  for (const auto& w : report.warnings) table << "warning: " << w << "\n";
  return report_exit_code(report);
}

/// Random integer matrices with entries in [-20, 20] and random complex u,
/// timed per phase.
inline int cmd_bench(const Options& o, Json& doc, std::ostream& table) {
  if (o.bench_d < 1 || o.bench_n < o.bench_d)
    throw Error(ErrorKind::MalformedInput, "--bench without an instance needs --d and --n with 1 <= d <= n");
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> entry(-20, 20);
  Json runs = Json::array();
  int code = kOk;
  table << "trial  paths  interior  combinatorics     start  tracking  endpoints\n";
  for (int trial = 0; trial < o.trials; ++trial) {
    std::optional<ArrangementMatrix> arr;
    while (!arr) {
      RationalMatrix L(static_cast<std::size_t>(o.bench_d + 1), static_cast<std::size_t>(o.bench_n + 1));
      for (std::size_t i = 0; i < L.rows(); ++i)
        for (std::size_t j = 0; j < L.cols(); ++j) L(i, j) = entry(rng);
      try {
        arr = ArrangementMatrix::from_matrix(L);
      } catch (const Error&) {
      }
    }
    CVector u(arr->ground_size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = detail::complex_gaussian(rng);
    const auto report = track_all(*arr, u, solve_config(o, *arr, rng()));
    const auto& t = report.timings;
    runs.push_back({{"paths", report.path_stats.total},
                    {"interior", report.interior.size()},
                    {"ml_degree", report.counts_check.ml_degree},
                    {"timings", {{"combinatorics", t.combinatorics}, {"start", t.start}, {"tracking", t.tracking},
                                 {"endpoints", t.endpoints}}}});
    table << std::setw(5) << trial << std::setw(7) << report.path_stats.total << std::setw(10) << report.interior.size()
          << std::fixed << std::setprecision(5) << std::setw(15) << t.combinatorics << std::setw(10) << t.start
          << std::setw(10) << t.tracking << std::setw(11) << t.endpoints << std::defaultfloat << "\n";
    code = std::max(code, report_exit_code(report));
  }
  doc["d"] = o.bench_d;
  doc["n"] = o.bench_n;
  doc["runs"] = runs;
  return code;
}

inline int cmd_solve(const Options& o, Json& doc, std::ostream& table) {
  if (o.instance.empty() && o.bench) return cmd_bench(o, doc, table);
  return cmd_solve_instance(o, doc, table);
}

inline int cmd_chy(const Options& o, Json& doc, std::ostream& table) {
  std::mt19937_64 rng(o.seed);
  std::optional<CVector> s;
  const int size = (o.m >= 4 && o.m <= 9) ? o.m * (o.m - 3) / 2 : 0;
  if (!o.u_file.empty() && size > 0) s = read_complex_vector(o.u_file, size);
  const auto inst = build_chy(o.m, s, rng);
  auto cfg = solve_config(o, inst.arrangement, rng());
  const auto report = track_all(inst.arrangement, inst.s, cfg);
  const auto t2 = type_two_flats(inst);
  const auto census = boundary_census(inst, report);
  bool sub_ok = true;
  std::string sub_error;
  try {
    sub_scattering_check(inst, report);
  } catch (const Error& e) {
    sub_ok = false;
    sub_error = e.what();
  }

  doc["m"] = inst.m;
  Json labels = Json::array();
  for (const auto& [i, j] : inst.labels) labels.push_back(Json::array({i, j}));
  doc["column_labels"] = labels;
  doc["s"] = to_json(inst.s);
  doc["reciprocal_degree"] = report.counts_check.reciprocal_degree;
  doc["ml_degree"] = report.counts_check.ml_degree;
  Json entries = Json::array();
  for (const auto& e : census.entries) {
    Json mults = e.observed_multiplicities;
    entries.push_back({{"r", e.r},
                       {"W", subset_json(e.W)},
                       {"support", subset_json(e.support)},
                       {"expected_count", e.expected_count},
                       {"observed_count", e.observed_count},
                       {"expected_multiplicity", e.expected_multiplicity},
                       {"observed_multiplicities", mults},
                       {"matches", e.matches()}});
  }
  doc["census"] = entries;
  doc["census_matches"] = census.all_match();
  doc["path_mass"] = census.path_mass;
  doc["total_paths"] = census.total_paths;
  doc["sub_scattering_ok"] = sub_ok;
  if (!sub_ok) doc["sub_scattering_error"] = sub_error;
  if (inst.arrangement.ground_size() <= 9) {
    Json extra = Json::array();
    for (const auto& f : extra_type_two_flats(inst, t2)) extra.push_back(flat_json(f));
    doc["extra_type_ii_flats"] = extra;
  }
  doc["solve"] = report_json(inst.arrangement, inst.s, report, true, o.bench);

  table << "M_{0," << inst.m << "}: reciprocal degree " << report.counts_check.reciprocal_degree << ", ML degree "
        << report.counts_check.ml_degree << ", paths " << report.path_stats.total << "\n";
  table << " r  W           support                expected  observed  mult(expected)  mult(observed)\n";
  for (const auto& e : census.entries) {
    std::string mults;
    for (int k : e.observed_multiplicities) mults += (mults.empty() ? "" : ",") + std::to_string(k);
    table << std::setw(2) << e.r << "  " << std::left << std::setw(12) << format_subset(e.W) << std::setw(23)
          << format_subset(e.support) << std::right << std::setw(8) << e.expected_count << std::setw(10)
          << e.observed_count << std::setw(16) << e.expected_multiplicity << "  " << mults << "\n";
  }
  table << "path mass " << census.path_mass << " of " << census.total_paths
        << (census.all_match() ? ", census matches" : ", census deviates") << "\n";
  if (!sub_ok) table << "sub-scattering check failed: " << sub_error << "\n";
  int code = report_exit_code(report);
  if (!sub_ok) code = std::max(code, static_cast<int>(kNumericalFailure));
  return code;
}

inline Json polynomial_json(const UnivariatePolynomial& p) {
  Json out = Json::array();
  for (const auto& c : p.coeffs) out.push_back(format_rational(c));
  return out;
}

inline void eliminant_json(const Eliminant& e, Json& doc, std::ostream& table) {
  doc["q"] = e.q;
  doc["matrix_size"] = e.size;
  doc["degree"] = e.degree;
  doc["coefficients"] = polynomial_json(e.monic);
  Json roots = Json::array();
  for (auto r : e.roots) roots.push_back(to_json(r));
  doc["roots"] = roots;
  table << "eliminant (q = " << e.q << ", " << e.size << " x " << e.size << "), monic, lowest degree first:\n";
  for (const auto& c : e.monic.coeffs) table << "  " << format_rational(c) << "\n";
  table << "roots:\n";
  for (auto r : e.roots) table << "  " << fmt(r) << "\n";
}

inline int cmd_hilbert(const Options& o, Json& doc, std::ostream& table) {
  const auto inst = load_instance(o);
  const auto& arr = inst.arrangement;
  std::mt19937_64 rng(o.seed);
  const auto u = resolve_rational_u(o, arr.ground_size(), rng);
  const auto omega = o.omega.empty() ? WeightOrder::identity(arr.ground_size()) : parse_omega(o.omega, arr.ground_size());
  const int qmax = o.q >= 0 ? o.q : arr.d() + 2;
  const auto faces = nbc_face_counts(arr, omega);
  doc["d"] = arr.d();
  doc["n"] = arr.n();
  doc["u"] = to_json(u);
  doc["f_vector"] = faces;
  doc["h_vector"] = hilbert_numerator(faces);
  doc["regularity"] = hilbert_regularity_RL(arr, omega);
  doc["reciprocal_degree"] = reciprocal_degree(arr);
  Json rows = Json::array();
  table << " q  HF(K[R_L])  HF(quotient)\n";
  for (int q = 0; q <= qmax; ++q) {
    const long long hf = hilbert_function_RL(faces, q);
    const long long quot = quotient_hilbert_function(arr, u, q);
    rows.push_back({{"q", q}, {"HF_RL", hf}, {"HF_quotient", quot}});
    table << std::setw(2) << q << std::setw(12) << hf << std::setw(14) << quot << "\n";
  }
  doc["hilbert_function"] = rows;
  table << "regularity of K[R_L]: " << doc["regularity"].get<int>() << "\n";
  if (!o.h1.empty() || !o.h2.empty()) {
    if (o.h1.empty() || o.h2.empty()) throw Error(ErrorKind::MalformedInput, "--h1 and --h2 go together");
    const auto h1 = parse_linear_form(o.h1, arr.ground_size());
    const auto h2 = parse_linear_form(o.h2, arr.ground_size());
    Json el;
    eliminant_json(eliminant(arr, u, h1, h2, std::nullopt, o.seed, omega), el, table);
    doc["eliminant"] = el;
  }
  return kOk;
}

inline int cmd_eliminant(const Options& o, Json& doc, std::ostream& table) {
  const auto inst = load_instance(o);
  const auto& arr = inst.arrangement;
  if (o.h1.empty() || o.h2.empty()) throw Error(ErrorKind::MalformedInput, "eliminant needs --h1 and --h2");
  std::mt19937_64 rng(o.seed);
  const auto u = resolve_rational_u(o, arr.ground_size(), rng);
  const auto h1 = parse_linear_form(o.h1, arr.ground_size());
  const auto h2 = parse_linear_form(o.h2, arr.ground_size());
  const auto omega = o.omega.empty() ? std::nullopt : std::optional(parse_omega(o.omega, arr.ground_size()));
  doc["u"] = to_json(u);
  eliminant_json(eliminant(arr, u, h1, h2, o.q >= 0 ? std::optional(o.q) : std::nullopt, o.seed, omega), doc, table);
  return kOk;
}

/// Reruns verify_solution_set on a stored solve report.
inline int cmd_certify(const Options& o, Json& doc, std::ostream& table) {
  if (o.report_file.empty()) throw Error(ErrorKind::MalformedInput, "certify needs --report");
  const Json stored = read_json_file(o.report_file);
  ArrangementMatrix arr = o.instance.empty() ? parse_arrangement(stored.dump()) : load_instance(o).arrangement;
  const int size = arr.ground_size();
  CVector u(size);
  if (!o.u_file.empty()) {
    u = read_complex_vector(o.u_file, size);
  } else {
    if (!stored.contains("u") || stored["u"].size() != static_cast<std::size_t>(size))
      throw Error(ErrorKind::MalformedInput, "report has no usable 'u'");
    for (int i = 0; i < size; ++i) u(i) = complex_from_json(stored["u"][static_cast<std::size_t>(i)]);
  }
  if (!stored.contains("interior") || !stored["interior"].is_array())
    throw Error(ErrorKind::MalformedInput, "report has no 'interior' list");
  SolutionReport report;
  double worst = 0.0;
  bool hessians = true;
  for (const auto& s : stored["interior"]) {
    InteriorSolution sol;
    const auto& xs = s.at("x");
    sol.point.x.resize(arr.d());
    if (static_cast<int>(xs.size()) != arr.d()) throw Error(ErrorKind::MalformedInput, "stored x has wrong dimension");
    for (int j = 0; j < arr.d(); ++j) sol.point.x(j) = complex_from_json(xs[static_cast<std::size_t>(j)]);
    sol.point.residual = scattering_residual(arr, u, sol.point.x);
    sol.point.hessian_ok = hessian_nondegenerate(arr, u, sol.point.x).nondegenerate;
    worst = std::max(worst, sol.point.residual);
    hessians = hessians && sol.point.hessian_ok;
    report.interior.push_back(std::move(sol));
  }
  const auto cert = verify_solution_set(arr, u, report);
  doc["expected"] = cert.expected;
  doc["observed"] = cert.observed;
  doc["max_residual"] = worst;
  doc["hessians_nondegenerate"] = hessians;
  doc["reality_checked"] = cert.reality_checked;
  doc["chambers_checked"] = cert.chambers_checked;
  doc["bounded_chambers"] = cert.bounded_chambers;
  doc["chamber_signs"] = cert.chamber_signs;
  const bool ok = worst < o.tracker.verify_tol && hessians;
  doc["certified"] = ok;
  table << "interior solutions: " << cert.observed << " of " << cert.expected << "\n";
  table << "max residual: " << fmt(worst) << (hessians ? "" : ", degenerate Hessian present") << "\n";
  if (cert.reality_checked) table << "all solutions real\n";
  if (cert.chambers_checked) table << "one solution in each of " << cert.bounded_chambers << " bounded chambers\n";
  return ok ? kOk : kNumericalFailure;
}

/// Entry point shared by the executable and the tests. Returns the exit code;
/// the report goes to `out` (or --out), diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scattering equations of hyperplane arrangements"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub, bool instance_required) {
    auto* opt = sub->add_option("instance", o.instance, "instance JSON file");
    if (instance_required) opt->required();
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
    sub->add_option("--out", o.out, "write the report to this file");
    sub->add_option("--omega", o.omega, "weight order, comma separated");
    sub->add_option("--u-file", o.u_file, "exponents u as a JSON array");
  };
  auto add_tracking = [&](CLI::App* sub) {
    sub->add_option("--a0-file", o.a0_file, "start matrix A0 (d x (n+1)) as JSON");
    sub->add_option("--tol-corrector", o.tracker.corrector_tol, "Newton corrector tolerance");
    sub->add_option("--tol-zero", o.tracker.zero_tol, "relative zero tolerance for coordinates");
    sub->add_option("--tol-cluster", o.tracker.cluster_tol, "endpoint clustering radius");
    sub->add_option("--max-steps", o.tracker.max_steps, "step limit per path");
    sub->add_option("--threads", o.threads, "worker threads for path tracking");
    sub->add_flag("--return-boundary", o.return_boundary, "include boundary clusters in the report");
    sub->add_flag("--bench", o.bench, "record wall time per phase");
  };
  auto* analyze = app.add_subcommand("analyze", "matroid statistics and degrees");
  add_common(analyze, true);
  auto* solve = app.add_subcommand("solve", "solve the scattering equations by homotopy continuation");
  add_common(solve, false);
  add_tracking(solve);
  solve->add_option("--d", o.bench_d, "bench: dimension of random instances");
  solve->add_option("--n", o.bench_n, "bench: n of random instances");
  solve->add_option("--trials", o.trials, "bench: number of random instances");
  auto* chy = app.add_subcommand("chy", "boundary census on M_{0,m}");
  chy->add_option("--m", o.m, "number of particles")->required();
  chy->add_option("--seed", o.seed, "random seed");
  chy->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
  chy->add_option("--out", o.out, "write the report to this file");
  chy->add_option("--omega", o.omega, "weight order, comma separated");
  chy->add_option("--u-file", o.u_file, "Mandelstam values s as a JSON array");
  add_tracking(chy);
  auto* hilbert = app.add_subcommand("hilbert", "Hilbert functions and regularity");
  add_common(hilbert, true);
  hilbert->add_option("--q", o.q, "largest degree");
  hilbert->add_option("--h1", o.h1, "linear form h1, comma separated coefficients");
  hilbert->add_option("--h2", o.h2, "linear form h2, comma separated coefficients");
  auto* elim = app.add_subcommand("eliminant", "univariate eliminant of h2/h1");
  add_common(elim, true);
  elim->add_option("--q", o.q, "degree of the Macaulay matrix (default d+1)");
  elim->add_option("--h1", o.h1, "linear form h1")->required();
  elim->add_option("--h2", o.h2, "linear form h2")->required();
  auto* certify = app.add_subcommand("certify", "verify a stored solve report");
  add_common(certify, false);
  certify->add_option("--report", o.report_file, "report JSON written by solve")->required();

  std::vector<std::string> argv_store{"scatter"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    Json body = {{"error", "MalformedInput"}, {"message", e.what()}};
    out << body.dump(2) << "\n";
    return kInstanceError;
  }

  Json doc;
  std::ostringstream table;
  int code = kOk;
  std::string command;
  try {
    if (*analyze) {
      command = "analyze";
      code = cmd_analyze(o, doc, table);
    } else if (*solve) {
      command = "solve";
      code = cmd_solve(o, doc, table);
    } else if (*chy) {
      command = "chy";
      code = cmd_chy(o, doc, table);
    } else if (*hilbert) {
      command = "hilbert";
      code = cmd_hilbert(o, doc, table);
    } else if (*elim) {
      command = "eliminant";
      code = cmd_eliminant(o, doc, table);
    } else if (*certify) {
      command = "certify";
      code = cmd_certify(o, doc, table);
    }
  } catch (const Error& e) {
    doc = Json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
    table.str("");
    table << e.what() << "\n";
    err << e.what() << "\n";
    code = exit_code_for(e.kind());
  }
  Json wrapped;
  wrapped["command"] = command;
  wrapped["seed"] = o.seed;
  wrapped["exit_code"] = code;
  for (auto it = doc.begin(); it != doc.end(); ++it) wrapped[it.key()] = it.value();
  const std::string text = o.format == "table" ? table.str() : wrapped.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    std::ofstream file(o.out);
    if (!file) {
      err << "cannot write " << o.out << "\n";
      return kInstanceError;
    }
    file << text;
  }
  return code;
}

}  // namespace scatter::cli

#endif  // SCATTER_CLI_HPP
