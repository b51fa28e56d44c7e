#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "json_config.hpp"
#include "table.hpp"
#include "wfmgf/error.hpp"
#include "wfmgf/format.hpp"
#include "wfmgf/master.hpp"
#include "wfmgf/montecarlo.hpp"
#include "wfmgf/spectral2.hpp"
#include "wfmgf/spectral_k.hpp"

namespace wfmgf::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

double parse_double(std::string_view text) {
  double v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw InvalidArgument("'" + std::string(text) + "' is not a number");
  }
  return v;
}

int parse_int(std::string_view text) {
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw InvalidArgument("'" + std::string(text) + "' is not an integer");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string join_doubles(std::span<const double> values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += '/';
    s += format_double(values[i]);
  }
  return s;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Common {
  std::string format = "csv";
  std::string out;
  bool no_timestamp = false;
};

/// What a command hands back for writing.
struct Report {
  Table table;
  Json config = Json::object();
  Json extra = Json::object();
  bool comparison_failed = false;
};

// ---------------------------------------------------------------- moments

struct MomentsParams {
  int alleles = 2;
  std::vector<double> p{0.5};
  std::vector<std::string> orders{"1", "2"};
  std::vector<std::string> times{"1"};
  int nmax = spectral2::kDefaultOrder;
  int degmax = spectral_k::kDefaultDegree;
};

Report run_moments(const MomentsParams& prm) {
  Report r;
  r.config = {{"alleles", prm.alleles}, {"p", prm.p},         {"orders", prm.orders},
              {"times", prm.times},     {"nmax", prm.nmax}, {"degmax", prm.degmax}};
  r.table.columns = {"p", "t", "order", "value"};
  const auto times = parse_times(prm.times);
  if (prm.alleles < 2) throw InvalidArgument("--alleles must be >= 2");
  if (prm.p.empty()) throw InvalidArgument("--p needs at least one value");

  if (prm.alleles == 2) {
    std::vector<int> orders;
    for (const auto& o : prm.orders) {
      const int n = parse_multi_index(o, 1)[0];
      if (n > prm.nmax) {
        throw InvalidArgument("order " + o + " exceeds the truncation --nmax " +
                              std::to_string(prm.nmax));
      }
      orders.push_back(n);
    }
    const auto table = spectral2::build_eigen_table<double>(prm.nmax);
    for (double p : prm.p) {
      const auto sol = spectral2::solve_coefficients(p, table);
      for (double t : times) {
        for (int n : orders) {
          r.table.add({p, t, std::to_string(n), spectral2::moment(sol, n, t)});
        }
      }
    }
    return r;
  }

  const int dimension = prm.alleles - 1;
  if (static_cast<int>(prm.p.size()) != dimension) {
    throw InvalidArgument("--p needs " + std::to_string(dimension) + " frequencies for " +
                          std::to_string(prm.alleles) + " alleles");
  }
  std::vector<MultiIndex> orders;
  for (const auto& o : prm.orders) {
    orders.push_back(parse_multi_index(o, dimension));
    if (degree(orders.back()) > prm.degmax) {
      throw InvalidArgument("order " + o + " exceeds the truncation --degmax " +
                            std::to_string(prm.degmax));
    }
  }
  const auto sol = spectral_k::solve_coefficients<double>(
      prm.p, spectral_k::build_eigen_table<double>(dimension, prm.degmax));
  const std::string p_text = join_doubles(prm.p);
  for (double t : times) {
    for (const auto& beta : orders) {
      r.table.add({p_text, t, format_multi_index(beta), spectral_k::moment(sol, beta, t)});
    }
  }
  return r;
}

// ------------------------------------------- fixation / extinction / het

struct SeriesParams {
  std::vector<double> p{0.5};
  std::vector<std::string> times{"1"};
  int kmax = spectral2::kDefaultOrder;
  double tail_tol = 0;
  bool has_tail_tol = false;
};

enum class SeriesKind { fixation, extinction, heterozygosity };

Report run_series(const SeriesParams& prm, SeriesKind kind) {
  Report r;
  r.config = {{"p", prm.p}, {"times", prm.times}};
  if (kind != SeriesKind::heterozygosity) {
    r.config["kmax"] = prm.kmax;
    r.config["tail-tol"] = prm.has_tail_tol ? Json(prm.tail_tol) : Json(nullptr);
  }
  r.table.columns = {"p", "t", "value", "kmax", "last_term"};
  const auto times = parse_times(prm.times);
  if (prm.kmax < 2) throw InvalidArgument("--kmax must be >= 2");
  const std::optional<double> tol =
      prm.has_tail_tol ? std::optional<double>(prm.tail_tol) : std::nullopt;
  const auto table = spectral2::build_eigen_table<double>(
      kind == SeriesKind::heterozygosity ? 2 : prm.kmax);
  for (double p : prm.p) {
    const auto sol = spectral2::solve_coefficients(p, table);
    for (double t : times) {
      if (kind == SeriesKind::heterozygosity) {
        // A single decaying mode: the k = 2 term is the whole value.
        const double h = spectral2::heterozygosity(sol, t);
        r.table.add({p, t, h, std::int64_t{2}, h});
        continue;
      }
      const auto v = kind == SeriesKind::fixation
                         ? spectral2::fixation_probability(sol, t, prm.kmax, tol)
                         : spectral2::extinction_probability(sol, t, prm.kmax, tol);
      r.table.add({p, t, v.value, std::int64_t{v.kmax}, v.last_term});
    }
  }
  return r;
}

struct AbsorptionParams {
  std::vector<double> p{0.5};
  int kmax = 400;
  double tail_tol = 0;
  bool has_tail_tol = false;
};

Report run_absorption(const AbsorptionParams& prm) {
  Report r;
  r.config = {{"p", prm.p},
              {"kmax", prm.kmax},
              {"tail-tol", prm.has_tail_tol ? Json(prm.tail_tol) : Json(nullptr)}};
  r.table.columns = {"p", "value", "kmax", "last_term"};
  for (double p : prm.p) {
    const auto v = spectral2::mean_absorption_time(p, prm.kmax);
    if (prm.has_tail_tol && std::abs(v.last_term) > prm.tail_tol) {
      throw TruncationError("absorption series at p = " + format_double(p) +
                                ": last term " + format_double(v.last_term) +
                                " exceeds --tail-tol",
                            v.last_term);
    }
    r.table.add({p, v.value, std::int64_t{v.kmax}, v.last_term});
  }
  return r;
}

// ----------------------------------------------------------------- master

struct MasterParams {
  std::string scheme = "a";
  int two_n = 8;
  int K = 2;
  std::vector<std::string> i0;
  std::vector<std::string> times{"1"};
  std::string emit = "moments";
  std::string arithmetic = "auto";
  int max_order = -1;
};

master::RateMatrix build_rates(master::Scheme scheme, int two_n, int K,
                               master::Arithmetic arithmetic) {
  switch (scheme) {
    case master::Scheme::implicit_a: return master::build_rate_implicit(two_n, arithmetic);
    case master::Scheme::wright_fisher_b: return master::build_rate_wf(two_n);
    case master::Scheme::implicit_k: return master::build_rate_implicit_k(K, two_n, arithmetic);
  }
  throw InvalidArgument("unknown scheme");
}

Json rate_metadata(const master::RateMatrix& rates) {
  return {{"scheme", std::string(master::to_string(rates.scheme))},
          {"twoN", rates.two_n},
          {"K", rates.dimension()},
          {"time_unit", std::string(rates.time_unit())},
          {"exact", rates.exact},
          {"residual", rates.residual},
          {"warnings", rates.warnings}};
}

Report run_master(const MasterParams& prm) {
  Report r;
  r.config = {{"scheme", prm.scheme}, {"twoN", prm.two_n},
              {"K", prm.K},           {"i0", prm.i0},
              {"times", prm.times},   {"emit", prm.emit},
              {"arithmetic", prm.arithmetic}, {"max-order", prm.max_order}};
  const auto scheme = master::parse_scheme(prm.scheme);
  const auto rates =
      build_rates(scheme, prm.two_n, prm.K, master::parse_arithmetic(prm.arithmetic));
  const auto& grid = rates.grid;
  const int dim = grid.dimension();
  r.extra["rates"] = rate_metadata(rates);

  std::vector<std::string> labels;
  for (const auto& s : grid.states()) labels.push_back(format_multi_index(s));

  if (prm.emit == "rates") {
    r.table.columns = {"from"};
    r.table.columns.insert(r.table.columns.end(), labels.begin(), labels.end());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<Cell> row{labels[i]};
      for (std::size_t j = 0; j < grid.size(); ++j) {
        row.emplace_back(rates.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
      r.table.add(std::move(row));
    }
    return r;
  }

  const auto times = parse_times(prm.times);
  std::vector<std::size_t> starts;
  if (prm.i0.empty()) {
    if (dim != 1) throw InvalidArgument("--i0 is required for the multi-allele scheme");
    starts.push_back(static_cast<std::size_t>(prm.two_n / 2));
  }
  for (const auto& s : prm.i0) starts.push_back(grid.position(parse_multi_index(s, dim)));

  std::vector<MultiIndex> orders;
  if (prm.emit == "moments") {
    const int max_order = prm.max_order >= 0 ? prm.max_order : (dim == 1 ? prm.two_n : 3);
    orders = graded_enumerate(dim, max_order);
  } else if (prm.emit != "matrix" && prm.emit != "distribution") {
    throw InvalidArgument("--emit must be one of matrix, distribution, moments, rates");
  }

  if (prm.emit == "matrix") {
    r.table.columns = {"t", "from"};
    r.table.columns.insert(r.table.columns.end(), labels.begin(), labels.end());
  } else if (prm.emit == "distribution") {
    r.table.columns = {"t", "i0", "state", "probability"};
  } else {
    r.table.columns = {"t", "i0", "order", "value"};
  }

  Json checks = Json::array();
  for (double t : times) {
    const auto tr = master::transition_matrix(rates, t);
    checks.push_back({{"t", t},
                      {"min_entry", tr.min_entry},
                      {"semigroup_defect", tr.semigroup_defect},
                      {"commutator_defect", tr.commutator_defect}});
    if (prm.emit == "matrix") {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<Cell> row{t, labels[i]};
        for (double v : tr.row(i)) row.emplace_back(v);
        r.table.add(std::move(row));
      }
      continue;
    }
    for (std::size_t start : starts) {
      const auto row = tr.row(start);
      if (prm.emit == "distribution") {
        for (std::size_t j = 0; j < row.size(); ++j) {
          r.table.add({t, labels[start], labels[j], row[j]});
        }
      } else {
        for (const auto& alpha : orders) {
          r.table.add({t, labels[start], format_multi_index(alpha),
                       master::distribution_moment(row, alpha, grid)});
        }
      }
    }
  }
  r.extra["self_checks"] = std::move(checks);
  return r;
}

// ---------------------------------------------------------------- compare

struct CompareParams {
  std::string against = "master";
  std::string scheme = "a";
  std::vector<int> two_n;
  std::vector<std::string> times;
  int max_order = -1;
  double tol = 1e-7;
  double ratio_min = 1.7;
  double ratio_max = 2.3;
  double p = 0.5;
  int replicates = 20000;
  std::uint64_t seed = 1;
  int threads = 0;
  double sigmas = 4;
  double model_budget = 0.01;
};

Report compare_master(const CompareParams& prm) {
  Report r;
  const auto scheme = master::parse_scheme(prm.scheme);
  if (scheme == master::Scheme::implicit_k) {
    throw InvalidArgument("compare against master supports schemes a and b");
  }
  const bool wf = scheme == master::Scheme::wright_fisher_b;
  std::vector<int> sizes = prm.two_n;
  if (sizes.empty()) sizes = wf ? std::vector<int>{64, 128} : std::vector<int>{16};
  if (wf && sizes.size() < 2) throw InvalidArgument("scheme b needs at least two --twoN values");
  const auto times = parse_times(prm.times.empty() ? std::vector<std::string>{"0.1", "0.5", "1", "2"}
                                                   : prm.times);
  r.config = {{"against", prm.against}, {"scheme", prm.scheme}, {"twoN", sizes},
              {"times", prm.times.empty() ? std::vector<std::string>{"0.1", "0.5", "1", "2"}
                                          : prm.times},
              {"max-order", prm.max_order}, {"tol", prm.tol},
              {"ratio-min", prm.ratio_min}, {"ratio-max", prm.ratio_max}};
  r.table.columns = {"quantity", "twoN", "max_abs_error", "ratio", "criterion", "status"};

  const int max_order_limit = *std::min_element(sizes.begin(), sizes.end());
  const int max_order = prm.max_order >= 0 ? prm.max_order : (wf ? 4 : max_order_limit);
  if (!wf && max_order > max_order_limit) {
    throw InvalidArgument("--max-order exceeds 2N; the implicit scheme only matches moments up to 2N");
  }
  const auto table = spectral2::build_eigen_table<double>(std::max(max_order, 2));

  // errors[size][quantity]; quantity max_order + 1 is heterozygosity
  const int quantities = max_order + 2;
  std::vector<std::vector<double>> errors(sizes.size(), std::vector<double>(quantities, 0.0));
  Json checks = Json::array();
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const int two_n = sizes[s];
    const auto rates = build_rates(scheme, two_n, 1, master::Arithmetic::automatic);
    for (double t : times) {
      const double chain_t = wf ? master::generation_time(t, two_n) : t;
      const auto tr = master::transition_matrix(rates, chain_t);
      checks.push_back({{"twoN", two_n}, {"t", t}, {"semigroup_defect", tr.semigroup_defect}});
      for (int i0 = 1; i0 < two_n; ++i0) {
        const double p = static_cast<double>(i0) / two_n;
        const auto sol = spectral2::solve_coefficients(p, table);
        const auto row = tr.row(static_cast<std::size_t>(i0));
        for (int n = 0; n <= max_order; ++n) {
          const double e = std::abs(master::distribution_moment(row, n, two_n) -
                                    spectral2::moment(sol, n, t));
          errors[s][n] = std::max(errors[s][n], e);
        }
        const double het = 2 * (master::distribution_moment(row, 1, two_n) -
                                master::distribution_moment(row, 2, two_n));
        errors[s][quantities - 1] = std::max(
            errors[s][quantities - 1], std::abs(het - spectral2::heterozygosity(sol, t)));
      }
    }
  }
  r.extra["self_checks"] = std::move(checks);

  for (int q = 0; q < quantities; ++q) {
    const std::string name = q + 1 == quantities ? "heterozygosity" : "m_" + std::to_string(q);
    bool exact = true;
    for (std::size_t s = 0; s < sizes.size(); ++s) exact = exact && errors[s][q] < 1e-12;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      std::string status;
      std::string criterion;
      Cell ratio = std::string();
      if (!wf) {
        criterion = "error < " + format_double(prm.tol);
        status = errors[s][q] < prm.tol ? "PASS" : "FAIL";
      } else {
        criterion = "ratio in [" + format_double(prm.ratio_min) + ", " +
                    format_double(prm.ratio_max) + "] or error < 1e-12";
        if (s > 0 && errors[s][q] > 0) ratio = errors[s - 1][q] / errors[s][q];
        if (exact) {
          status = "PASS";
        } else if (s == 0) {
          status = "baseline";
        } else {
          const double v = errors[s - 1][q] / errors[s][q];
          status = v >= prm.ratio_min && v <= prm.ratio_max ? "PASS" : "FAIL";
        }
      }
      r.comparison_failed = r.comparison_failed || status == "FAIL";
      r.table.add({name, std::int64_t{sizes[s]}, errors[s][q], ratio, criterion, status});
    }
  }
  return r;
}

Report compare_mc(const CompareParams& prm) {
  Report r;
  const int two_n = prm.two_n.empty() ? 200 : prm.two_n.front();
  const std::vector<std::string> time_tokens =
      prm.times.empty() ? std::vector<std::string>{"0.25", "0.5", "1"} : prm.times;
  r.config = {{"against", prm.against}, {"twoN", two_n}, {"p", prm.p},
              {"times", time_tokens}, {"replicates", prm.replicates},
              {"seed", prm.seed}, {"threads", prm.threads},
              {"sigmas", prm.sigmas}, {"model-budget", prm.model_budget}};
  r.table.columns = {"quantity", "t", "spectral", "empirical", "std_error", "tolerance",
                     "status"};

  montecarlo::McConfig cfg;
  cfg.two_n = two_n;
  cfg.initial_counts = {static_cast<int>(std::lround(prm.p * two_n))};
  cfg.replicates = prm.replicates;
  cfg.seed = prm.seed;
  cfg.threads = prm.threads;
  std::vector<int> generations;
  for (double t : parse_times(time_tokens)) {
    generations.push_back(static_cast<int>(std::lround(master::generation_time(t, two_n))));
  }
  cfg.generations = generations.empty() ? 0 : *std::max_element(generations.begin(), generations.end());
  const auto paths = montecarlo::simulate(cfg, generations);
  const auto moments = montecarlo::empirical_moments(paths, {MultiIndex{2}});
  const auto het = montecarlo::empirical_heterozygosity(paths);
  const auto fix = montecarlo::empirical_fixation(paths);

  // Spectral values at the exact starting frequency and sampled time.
  const double p0 = static_cast<double>(cfg.initial_counts[0]) / two_n;
  const auto table = spectral2::build_eigen_table<double>(spectral2::kDefaultOrder);
  const auto sol = spectral2::solve_coefficients(p0, table);
  r.extra["rng"] = std::string(montecarlo::kRngName);
  r.extra["initial_frequency"] = p0;

  auto add = [&](const std::string& name, double t, double exact, double observed, double se) {
    const double tol = prm.sigmas * se + prm.model_budget;
    const bool pass = std::abs(observed - exact) <= tol;
    r.comparison_failed = r.comparison_failed || !pass;
    r.table.add({name, t, exact, observed, se, tol, std::string(pass ? "PASS" : "FAIL")});
  };
  for (std::size_t g = 0; g < generations.size(); ++g) {
    const double t = moments[g].time;
    add("m_2", t, spectral2::moment(sol, 2, t), moments[g].mean, moments[g].std_error);
    add("heterozygosity", t, spectral2::heterozygosity(sol, t), het[g].mean, het[g].std_error);
    add("fixation", t,
        spectral2::fixation_probability(sol, t, spectral2::kDefaultOrder).value,
        fix[g].fixed_fraction, fix[g].fixed_std_error);
  }
  return r;
}

Report run_compare(const CompareParams& prm) {
  if (prm.against == "master") return compare_master(prm);
  if (prm.against == "mc") return compare_mc(prm);
  throw InvalidArgument("--against must be master or mc");
}

// --------------------------------------------------------------------- mc

struct McParams {
  int two_n = 200;
  std::vector<std::string> i0{"100"};
  std::vector<std::string> generations{"0:200:50"};
  int replicates = 10000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::vector<std::string> orders;
};

Report run_mc(const McParams& prm) {
  Report r;
  r.config = {{"twoN", prm.two_n},        {"i0", prm.i0},
              {"generations", prm.generations}, {"replicates", prm.replicates},
              {"seed", prm.seed},         {"threads", prm.threads},
              {"orders", prm.orders}};
  if (prm.i0.size() != 1) throw InvalidArgument("--i0 takes one (possibly '/'-joined) count vector");
  const auto counts = parse_multi_index(prm.i0.front(), -1);
  montecarlo::McConfig cfg;
  cfg.two_n = prm.two_n;
  cfg.initial_counts.assign(counts.components().begin(), counts.components().end());
  cfg.replicates = prm.replicates;
  cfg.seed = prm.seed;
  cfg.threads = prm.threads;
  const auto generations = parse_generations(prm.generations);
  cfg.generations = generations.empty() ? 0 : *std::max_element(generations.begin(), generations.end());
  const int dim = cfg.dimension();

  std::vector<MultiIndex> orders;
  for (const auto& o : prm.orders) orders.push_back(parse_multi_index(o, dim));
  if (orders.empty()) {
    for (const auto& alpha : graded_enumerate(dim, 2)) {
      if (degree(alpha) > 0) orders.push_back(alpha);
    }
  }

  const auto paths = montecarlo::simulate(cfg, generations);
  const auto moments = montecarlo::empirical_moments(paths, orders);
  const auto het = montecarlo::empirical_heterozygosity(paths);
  const auto fix = montecarlo::empirical_fixation(paths);
  r.extra["rng"] = std::string(montecarlo::kRngName);
  r.extra["seed"] = prm.seed;

  r.table.columns = {"generation", "t", "quantity", "order", "mean", "std_error"};
  std::size_t m = 0;
  for (std::size_t g = 0; g < generations.size(); ++g) {
    const std::int64_t gen = generations[g];
    const double t = static_cast<double>(generations[g]) / prm.two_n;
    for (std::size_t o = 0; o < orders.size(); ++o, ++m) {
      r.table.add({gen, t, std::string("moment"), format_multi_index(orders[o]), moments[m].mean,
                   moments[m].std_error});
    }
    r.table.add({gen, t, std::string("heterozygosity"), std::string(), het[g].mean,
                 het[g].std_error});
    r.table.add({gen, t, std::string("fixed"), std::string(), fix[g].fixed_fraction,
                 fix[g].fixed_std_error});
    r.table.add({gen, t, std::string("lost"), std::string(), fix[g].lost_fraction,
                 fix[g].lost_std_error});
  }
  return r;
}

// ------------------------------------------------------------------ wiring

int emit(const std::string& command, const Common& common, const Report& report,
         std::ostream& out, std::ostream& err) {
  Json meta;
  meta["tool"] = "wfmgf";
  meta["version"] = kVersion;
  meta["command"] = command;
  meta["config"] = report.config;
  meta["config"]["format"] = common.format;
  for (const auto& [key, value] : report.extra.items()) meta[key] = value;
  if (!common.no_timestamp) meta["timestamp"] = utc_timestamp();

  std::ostringstream buffer;
  write_table(buffer, report.table, meta, parse_format(common.format));
  if (common.out.empty() || common.out == "-") {
    out << buffer.str();
    out.flush();
    if (!out) {
      err << "error: could not write output\n";
      return kExitError;
    }
  } else {
    std::ofstream file(common.out, std::ios::binary);
    file << buffer.str();
    file.close();
    if (!file) {
      err << "error: could not write " << common.out << '\n';
      return kExitError;
    }
  }
  if (report.comparison_failed) {
    err << "comparison FAILED; see the status column\n";
    return kExitComparisonFailed;
  }
  return kExitOk;
}

void add_times(CLI::App* sub, std::vector<std::string>& times, const std::string& what) {
  sub->add_option("--times", times, what + "; values or start:stop:step ranges")
      ->capture_default_str();
}

}  // namespace

std::vector<double> parse_times(const std::vector<std::string>& tokens) {
  std::vector<double> out;
  for (const auto& token : tokens) {
    if (token.find(':') == std::string::npos) {
      out.push_back(parse_double(token));
    } else {
      const auto parts = split(token, ':');
      if (parts.size() != 3) throw InvalidArgument("range '" + token + "' must be start:stop:step");
      const double start = parse_double(parts[0]);
      const double stop = parse_double(parts[1]);
      const double step = parse_double(parts[2]);
      if (!(step > 0) || stop < start) {
        throw InvalidArgument("range '" + token + "' needs step > 0 and stop >= start");
      }
      const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
      if (count > 1000000) throw InvalidArgument("range '" + token + "' is too long");
      for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    }
  }
  for (double t : out) {
    if (!(t >= 0) || !std::isfinite(t)) throw InvalidArgument("times must be finite and >= 0");
  }
  return out;
}

std::vector<int> parse_generations(const std::vector<std::string>& tokens) {
  std::vector<int> out;
  for (const auto& token : tokens) {
    if (token.find(':') == std::string::npos) {
      out.push_back(parse_int(token));
      continue;
    }
    const auto parts = split(token, ':');
    if (parts.size() != 3) throw InvalidArgument("range '" + token + "' must be start:stop:step");
    const int start = parse_int(parts[0]);
    const int stop = parse_int(parts[1]);
    const int step = parse_int(parts[2]);
    if (step <= 0 || stop < start) {
      throw InvalidArgument("range '" + token + "' needs step > 0 and stop >= start");
    }
    for (int g = start; g <= stop; g += step) out.push_back(g);
  }
  for (int g : out) {
    if (g < 0) throw InvalidArgument("generations must be >= 0");
  }
  return out;
}

MultiIndex parse_multi_index(std::string_view text, int dimension) {
  std::string cleaned;
  for (char c : text) {
    if (c == '(' || c == ')' || c == ' ') continue;
    cleaned += c == ',' ? '/' : c;
  }
  std::vector<int> components;
  for (auto part : split(cleaned, '/')) components.push_back(parse_int(part));
  if (dimension >= 0 && static_cast<int>(components.size()) != dimension) {
    throw InvalidArgument("'" + std::string(text) + "' must have " + std::to_string(dimension) +
                          " components");
  }
  return MultiIndex(std::move(components));
}

std::string format_multi_index(const MultiIndex& alpha) {
  std::string s;
  for (std::size_t u = 0; u < alpha.size(); ++u) {
    if (u) s += '/';
    s += std::to_string(alpha[u]);
  }
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moments, fixation and absorption of the neutral Wright-Fisher diffusion", "wfmgf"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  Common common;
  app.add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", common.out, "Output file (stdout when absent or '-')");
  app.add_flag("--no-timestamp", common.no_timestamp, "Omit the timestamp from the metadata");
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON file of option values (flags on the command line win)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::string command;
  std::function<Report()> action;

  MomentsParams moments;
  auto* sub = app.add_subcommand("moments", "Moments m_n(t) or m_beta(t) from the spectral series");
  sub->add_option("--alleles", moments.alleles, "Number of alleles (K + 1)");
  sub->add_option("--p", moments.p,
                  "Initial frequency; several values for 2 alleles, the K frequencies otherwise");
  sub->add_option("--orders", moments.orders, "Moment orders: n, or beta as 1/0/2");
  add_times(sub, moments.times, "Diffusion times");
  sub->add_option("--nmax", moments.nmax, "Series truncation order (2 alleles)");
  sub->add_option("--degmax", moments.degmax, "Truncation degree (more than 2 alleles)");
  sub->callback([&] {
    command = "moments";
    action = [&] { return run_moments(moments); };
  });

  SeriesParams fixation;
  SeriesParams extinction;
  SeriesParams het;
  auto series_command = [&](const char* name, const char* what, SeriesParams* prm,
                            SeriesKind kind) {
    auto* s = app.add_subcommand(name, what);
    s->add_option("--p", prm->p, "Initial frequencies");
    add_times(s, prm->times, "Diffusion times");
    if (kind != SeriesKind::heterozygosity) {
      s->add_option("--kmax", prm->kmax, "Number of series terms");
      s->add_option("--tail-tol", prm->tail_tol,
                    "Fail when the last term exceeds this magnitude (default: no check)")
          ->each([prm](const std::string&) { prm->has_tail_tol = true; });
    }
    s->callback([&command, &action, prm, name, kind] {
      command = name;
      action = [prm, kind] { return run_series(*prm, kind); };
    });
  };
  series_command("fixation", "P(X_t = 1)", &fixation, SeriesKind::fixation);
  series_command("extinction", "P(X_t = 0)", &extinction, SeriesKind::extinction);
  series_command("het", "Heterozygosity 2 E[X_t (1 - X_t)]", &het, SeriesKind::heterozygosity);

  AbsorptionParams absorption;
  sub = app.add_subcommand("absorption", "Mean time to absorption (500-digit arithmetic)");
  sub->add_option("--p", absorption.p, "Initial frequencies");
  sub->add_option("--kmax", absorption.kmax, "Number of series terms (at most 600)");
  sub->add_option("--tail-tol", absorption.tail_tol,
                  "Fail when the last term exceeds this magnitude (default: no check)")
      ->each([&](const std::string&) { absorption.has_tail_tol = true; });
  sub->callback([&] {
    command = "absorption";
    action = [&] { return run_absorption(absorption); };
  });

  MasterParams mst;
  sub = app.add_subcommand("master", "Finite-population master equation P(t) = exp(Bt)");
  sub->add_option("--scheme", mst.scheme, "a (implicit), b (Wright-Fisher) or aK (implicit, K alleles)")
      ->check(CLI::IsMember({"a", "b", "aK", "implicit-a", "wright-fisher-b", "implicit-K"}));
  sub->add_option("--twoN", mst.two_n, "Population size 2N (even)");
  sub->add_option("--K", mst.K, "Dimension for scheme aK (number of alleles minus one)");
  sub->add_option("--i0", mst.i0, "Starting states: a count, or 1/2 for scheme aK (default 2N/2)");
  add_times(sub, mst.times, "Times in the scheme's unit (diffusion for a, generations for b)");
  sub->add_option("--emit", mst.emit, "What to write")
      ->check(CLI::IsMember({"matrix", "distribution", "moments", "rates"}));
  sub->add_option("--arithmetic", mst.arithmetic, "Implicit builds: auto, float or exact")
      ->check(CLI::IsMember({"auto", "float", "exact"}));
  sub->add_option("--max-order", mst.max_order,
                  "Highest moment degree for --emit moments (-1: 2N, or 3 for aK)");
  sub->callback([&] {
    command = "master";
    action = [&] { return run_master(mst); };
  });

  CompareParams cmp;
  sub = app.add_subcommand("compare", "Cross-check the spectral values against master or mc");
  sub->add_option("--against", cmp.against, "master or mc")
      ->check(CLI::IsMember({"master", "mc"}));
  sub->add_option("--scheme", cmp.scheme, "Master scheme: a or b")
      ->check(CLI::IsMember({"a", "b"}));
  sub->add_option("--twoN", cmp.two_n,
                  "Population sizes (default: 16 for a, 64 128 for b, 200 for mc)");
  sub->add_option("--times", cmp.times,
                  "Diffusion times (default: 0.1 0.5 1 2 for master, 0.25 0.5 1 for mc)");
  sub->add_option("--max-order", cmp.max_order, "Highest moment order (-1: 2N for a, 4 for b)");
  sub->add_option("--tol", cmp.tol, "Scheme a: absolute tolerance");
  sub->add_option("--ratio-min", cmp.ratio_min, "Scheme b: lowest accepted error ratio");
  sub->add_option("--ratio-max", cmp.ratio_max, "Scheme b: highest accepted error ratio");
  sub->add_option("--p", cmp.p, "mc: initial frequency");
  sub->add_option("--replicates", cmp.replicates, "mc: number of paths");
  sub->add_option("--seed", cmp.seed, "mc: random seed");
  sub->add_option("--threads", cmp.threads, "mc: worker threads (0: hardware)");
  sub->add_option("--sigmas", cmp.sigmas, "mc: standard errors allowed");
  sub->add_option("--model-budget", cmp.model_budget, "mc: extra allowance for the O(1/N) bias");
  sub->callback([&] {
    command = "compare";
    action = [&] { return run_compare(cmp); };
  });

  McParams mc;
  sub = app.add_subcommand("mc", "Wright-Fisher Monte Carlo");
  sub->add_option("--twoN", mc.two_n, "Population size 2N");
  sub->add_option("--i0", mc.i0, "Initial counts, e.g. 100 or 50/60 for three alleles");
  sub->add_option("--generations", mc.generations, "Sampled generations; values or start:stop:step");
  sub->add_option("--replicates", mc.replicates, "Number of paths");
  sub->add_option("--seed", mc.seed, "Random seed");
  sub->add_option("--threads", mc.threads, "Worker threads (0: hardware)");
  sub->add_option("--orders", mc.orders, "Moment orders (default: all of degree 1 and 2)");
  sub->callback([&] {
    command = "mc";
    action = [&] { return run_mc(mc); };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    return emit(command, common, action(), out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace wfmgf::cli
