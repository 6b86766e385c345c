#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "supnc/csv.hpp"
#include "supnc/errors.hpp"
#include "supnc/moment_provider.hpp"
#include "supnc/oracle.hpp"
#include "supnc/states.hpp"
#include "supnc/witnesses.hpp"

// Command implementations behind the executable: flag structs in, CSV tables
// out.  Everything here is deterministic; identical inputs produce identical
// bytes.
namespace supnc::cli {

enum class Backend { closed, oracle, both };

inline const char* backend_name(Backend b) {
  switch (b) {
    case Backend::closed: return "closed";
    case Backend::oracle: return "oracle";
    case Backend::both: return "both";
  }
  return "?";
}

inline std::optional<Backend> parse_backend(const std::string& name) {
  if (name == "closed") return Backend::closed;
  if (name == "oracle") return Backend::oracle;
  if (name == "both") return Backend::both;
  return std::nullopt;
}

struct StateArgs {
  states::Family family = states::Family::socs;
  double s = 0.0;
  std::optional<double> t;  // defaults to the positive root
  double gamma = 0.0;
  double phase = 0.0;
  double eta = 0.0;
};

inline states::StateSpec make_spec(const StateArgs& a) {
  if (!(a.gamma >= 0.0) || !std::isfinite(a.gamma)) {
    throw invalid_argument("gamma must be a finite non-negative number");
  }
  const double t = a.t ? *a.t : std::sqrt(std::max(0.0, 1.0 - a.s * a.s));
  const states::SupParams p(a.s, t);
  if (a.family == states::Family::socs) {
    return states::StateSpec::socs(p, std::polar(a.gamma, a.phase), a.eta);
  }
  return states::StateSpec::sots(p, a.gamma, a.eta);
}

// Order lists come in as "4", "2,3,5", "0..6", or any comma mix of the two.
inline std::vector<int> parse_order_list(const std::string& text) {
  std::vector<int> orders;
  size_t start = 0;
  auto parse_int = [](const std::string& tok) {
    if (tok.empty()) throw invalid_argument("order list: empty entry");
    size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw invalid_argument("order list: '" + tok + "' is not an integer");
    }
    if (used != tok.size()) throw invalid_argument("order list: '" + tok + "' is not an integer");
    return v;
  };
  while (start <= text.size()) {
    const size_t comma = text.find(',', start);
    const std::string tok =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const size_t dots = tok.find("..");
    if (dots == std::string::npos) {
      orders.push_back(parse_int(tok));
    } else {
      const int lo = parse_int(tok.substr(0, dots));
      const int hi = parse_int(tok.substr(dots + 2));
      if (hi < lo) throw invalid_argument("order list: descending range '" + tok + "'");
      for (int v = lo; v <= hi; ++v) orders.push_back(v);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (orders.empty()) throw invalid_argument("order list: no orders given");
  return orders;
}

inline void check_order(witnesses::Criterion crit, int order) {
  using witnesses::Criterion;
  auto fail = [&](const char* what) {
    throw invalid_argument(std::string(witnesses::criterion_name(crit)) + ": order " +
                           std::to_string(order) + " unsupported (" + what + ")");
  };
  switch (crit) {
    case Criterion::q:
    case Criterion::hoa:
      if (order < 2 || order > 16) fail("expected 2..16");
      break;
    case Criterion::hosps:
      if (order < 2 || order > 12) fail("expected 2..12");
      break;
    case Criterion::hos:
      if (order < 2 || order > 12 || order % 2 != 0) fail("expected even 2..12");
      break;
    case Criterion::klyshko:
      if (order < 0 || order > 4094) fail("expected 0..4094");
      break;
    case Criterion::a3:
    case Criterion::husimi:
      if (order < 0 || order > 16) fail("expected 0..16");
      break;
  }
}

struct CellResult {
  std::optional<double> value;
  bool nonclassical = false;
  std::string note;
};

namespace detail {

inline int oracle_order_for(witnesses::Criterion crit, int order) {
  using witnesses::Criterion;
  switch (crit) {
    case Criterion::a3: return 4;
    case Criterion::klyshko: return order + 2;
    case Criterion::husimi: return 4;
    default: return order;
  }
}

// Phase-space criterion: reported value is the Husimi minimum over the search
// disk; the verdict is whether the function actually reaches zero inside it.
inline CellResult husimi_cell(const states::StateSpec& spec, Backend backend) {
  const states::StateSpec eff = states::effective_state(spec);
  const double radius = witnesses::search_radius(eff);
  char buf[96];
  if (backend == Backend::closed) {
    const auto zero = witnesses::husimi_zero_locus(eff, radius);
    const double m = witnesses::function_minimum(
        [&](std::complex<double> b) { return witnesses::husimi(eff, b); }, radius, zero);
    CellResult r{m, zero.has_value(), ""};
    if (zero) {
      std::snprintf(buf, sizeof(buf), "zero near %.6g%+.6gi", zero->real(), zero->imag());
      r.note = buf;
    }
    return r;
  }
  OracleProvider op(eff, detail::oracle_order_for(witnesses::Criterion::husimi, 0));
  auto f = [&](std::complex<double> b) {
    return std::visit([&](const auto& st) { return oracle::oracle_husimi(st, b); }, op.state());
  };
  const auto seed = witnesses::husimi_zero_locus(eff, radius);
  const witnesses::detail::DiskPoint best = witnesses::detail::disk_argmin(f, radius, seed);
  const double top = witnesses::detail::disk_max(f, radius);
  const bool zero_found = best.value <= 1e-12 * top && std::abs(best.at) <= 0.98 * radius;
  CellResult r{best.value, zero_found, ""};
  if (zero_found) {
    std::snprintf(buf, sizeof(buf), "zero near %.6g%+.6gi", best.at.real(), best.at.imag());
    r.note = buf;
  }
  return r;
}

}  // namespace detail

// One criterion at one order against one backend.
inline CellResult eval_cell(const states::StateSpec& spec, Backend backend,
                            witnesses::Criterion crit, int order) {
  if (backend == Backend::both) throw invalid_argument("eval_cell: pick one backend");
  if (crit == witnesses::Criterion::husimi) return detail::husimi_cell(spec, backend);
  CellResult r;
  auto run = [&](const MomentProvider& mp) {
    const witnesses::WitnessResult w = witnesses::evaluate(mp, crit, order);
    r.value = w.value;
    r.nonclassical = w.nonclassical;
    r.note = w.note;
  };
  if (backend == Backend::closed) {
    run(ClosedFormProvider(spec));
  } else {
    run(OracleProvider(spec, detail::oracle_order_for(crit, order)));
  }
  return r;
}

// ---------------------------------------------------------------------------
// witness: one row per order (and per backend when both are requested).

inline csv::Table witness_table(const StateArgs& args, witnesses::Criterion crit,
                                const std::vector<int>& orders, Backend backend,
                                std::vector<std::string>* notes = nullptr) {
  for (int order : orders) check_order(crit, order);
  const states::StateSpec spec = make_spec(args);
  csv::Table t;
  t.header = {"criterion", "order", "value", "nonclassical", "backend"};
  std::vector<Backend> backends;
  if (backend == Backend::both) {
    backends = {Backend::closed, Backend::oracle};
  } else {
    backends = {backend};
  }
  for (int order : orders) {
    for (Backend b : backends) {
      const CellResult cell = eval_cell(spec, b, crit, order);
      t.rows.push_back({witnesses::criterion_name(crit), csv::format_int(order),
                        cell.value ? csv::format_double(*cell.value) : std::string{},
                        cell.nonclassical ? "true" : "false", backend_name(b)});
      if (notes && !cell.note.empty()) {
        notes->push_back(std::string(witnesses::criterion_name(crit)) + " order " +
                         std::to_string(order) + " (" + backend_name(b) + "): " + cell.note);
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// sweep: gamma column plus one column per (order, backend).

struct SweepJob {
  StateArgs base;   // gamma field ignored; the range below drives it
  double start = 0.0;
  double stop = 4.0;
  int count = 81;
  witnesses::Criterion crit = witnesses::Criterion::q;
  std::vector<int> orders;
  Backend backend = Backend::closed;
};

inline csv::Table sweep_table(const SweepJob& job, int* undefined_cells = nullptr) {
  if (job.count < 2) throw invalid_argument("sweep: count must be at least 2");
  if (!std::isfinite(job.start) || !std::isfinite(job.stop)) {
    throw invalid_argument("sweep: range must be finite");
  }
  for (int order : job.orders) check_order(job.crit, order);
  std::vector<Backend> backends;
  if (job.backend == Backend::both) {
    backends = {Backend::closed, Backend::oracle};
  } else {
    backends = {job.backend};
  }
  csv::Table t;
  t.header = {"gamma"};
  for (int order : job.orders) {
    for (Backend b : backends) {
      t.header.push_back(std::string(witnesses::criterion_name(job.crit)) + "_l" +
                         std::to_string(order) + "_" + backend_name(b));
    }
  }
  int undefined = 0;
  for (int i = 0; i < job.count; ++i) {
    StateArgs point = job.base;
    point.gamma = job.start + (job.stop - job.start) * i / (job.count - 1);
    const states::StateSpec spec = make_spec(point);
    std::vector<std::string> row{csv::format_double(point.gamma)};
    for (int order : job.orders) {
      for (Backend b : backends) {
        std::string cell;
        try {
          const CellResult c = eval_cell(spec, b, job.crit, order);
          if (c.value) {
            cell = csv::format_double(*c.value);
          } else {
            ++undefined;  // annotated absence (e.g. a pole), reported empty
          }
        } catch (const undefined_witness&) {
          ++undefined;
        } catch (const degenerate_state&) {
          ++undefined;
        }
        row.push_back(std::move(cell));
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (undefined_cells) *undefined_cells = undefined;
  return t;
}

// ---------------------------------------------------------------------------
// presets: the comparison grids behind the standard plots.

struct PresetFile {
  std::string name;
  csv::Table table;
};

namespace detail {

inline std::string cell_or_empty(const states::StateSpec& spec, witnesses::Criterion crit,
                                 int order) {
  try {
    const CellResult c = eval_cell(spec, Backend::closed, crit, order);
    if (c.value) return csv::format_double(*c.value);
  } catch (const undefined_witness&) {
  } catch (const degenerate_state&) {
  }
  return {};
}

// gamma on the x axis, both families side by side.
inline csv::Table family_gamma_panel(witnesses::Criterion crit, int order, double s,
                                     double eta = 0.0, double start = 0.0, double stop = 4.0,
                                     int count = 81) {
  csv::Table t;
  t.header = {"gamma", "socs", "sots"};
  for (int i = 0; i < count; ++i) {
    const double gamma = start + (stop - start) * i / (count - 1);
    StateArgs a;
    a.s = s;
    a.gamma = gamma;
    a.eta = eta;
    a.family = states::Family::socs;
    const std::string socs = cell_or_empty(make_spec(a), crit, order);
    a.family = states::Family::sots;
    const std::string sots = cell_or_empty(make_spec(a), crit, order);
    t.rows.push_back({csv::format_double(gamma), socs, sots});
  }
  return t;
}

// s on the x axis at fixed gamma.
inline csv::Table family_s_panel(witnesses::Criterion crit, int order, double gamma,
                                 int count = 101) {
  csv::Table t;
  t.header = {"s", "socs", "sots"};
  for (int i = 0; i < count; ++i) {
    const double s = static_cast<double>(i) / (count - 1);
    StateArgs a;
    a.s = s;
    a.gamma = gamma;
    a.family = states::Family::socs;
    const std::string socs = cell_or_empty(make_spec(a), crit, order);
    a.family = states::Family::sots;
    const std::string sots = cell_or_empty(make_spec(a), crit, order);
    t.rows.push_back({csv::format_double(s), socs, sots});
  }
  return t;
}

inline csv::Table husimi_radial_panel(double gamma, double s, double radius, int count) {
  StateArgs a;
  a.s = s;
  a.gamma = gamma;
  a.family = states::Family::socs;
  const states::StateSpec socs = make_spec(a);
  a.family = states::Family::sots;
  const states::StateSpec sots = make_spec(a);
  csv::Table t;
  t.header = {"beta", "socs", "sots"};
  for (int i = 0; i < count; ++i) {
    const double b = -radius + 2.0 * radius * i / (count - 1);
    t.rows.push_back({csv::format_double(b),
                      csv::format_double(witnesses::husimi(socs, {b, 0.0})),
                      csv::format_double(witnesses::husimi(sots, {b, 0.0}))});
  }
  return t;
}

inline csv::Table husimi_plane_panel(double gamma, double s, double radius, int count) {
  StateArgs a;
  a.s = s;
  a.gamma = gamma;
  a.family = states::Family::socs;
  const states::StateSpec socs = make_spec(a);
  a.family = states::Family::sots;
  const states::StateSpec sots = make_spec(a);
  csv::Table t;
  t.header = {"beta_re", "beta_im", "socs", "sots"};
  for (int i = 0; i < count; ++i) {
    const double re = -radius + 2.0 * radius * i / (count - 1);
    for (int j = 0; j < count; ++j) {
      const double im = -radius + 2.0 * radius * j / (count - 1);
      const std::complex<double> b(re, im);
      t.rows.push_back({csv::format_double(re), csv::format_double(im),
                        csv::format_double(witnesses::husimi(socs, b)),
                        csv::format_double(witnesses::husimi(sots, b))});
    }
  }
  return t;
}

inline csv::Table klyshko_panel(double gamma, double s, int m_max) {
  StateArgs a;
  a.s = s;
  a.gamma = gamma;
  a.family = states::Family::socs;
  const states::StateSpec socs = make_spec(a);
  a.family = states::Family::sots;
  const states::StateSpec sots = make_spec(a);
  ClosedFormProvider socs_mp(socs), sots_mp(sots);
  csv::Table t;
  t.header = {"m", "socs", "sots", "socs_printed", "sots_printed"};
  for (int m = 0; m <= m_max; ++m) {
    t.rows.push_back({csv::format_int(m), csv::format_double(witnesses::klyshko(socs_mp, m)),
                      csv::format_double(witnesses::klyshko(sots_mp, m)),
                      csv::format_double(witnesses::klyshko_printed(socs, m)),
                      csv::format_double(witnesses::klyshko_printed(sots, m))});
  }
  return t;
}

// Every criterion on one sweep; q, hoa, hosps, hos at the given order,
// klyshko at the given index, husimi as the disk minimum.
inline csv::Table all_criteria_panel(states::Family family, double s, int order, int m_index) {
  csv::Table t;
  t.header = {"gamma", "q", "hoa", "hosps", "hos", "a3", "klyshko", "husimi"};
  for (int i = 0; i < 81; ++i) {
    const double gamma = 4.0 * i / 80.0;
    StateArgs a;
    a.family = family;
    a.s = s;
    a.gamma = gamma;
    const states::StateSpec spec = make_spec(a);
    using witnesses::Criterion;
    t.rows.push_back({csv::format_double(gamma), cell_or_empty(spec, Criterion::q, order),
                      cell_or_empty(spec, Criterion::hoa, order),
                      cell_or_empty(spec, Criterion::hosps, order),
                      cell_or_empty(spec, Criterion::hos, order),
                      cell_or_empty(spec, Criterion::a3, 3),
                      cell_or_empty(spec, Criterion::klyshko, m_index),
                      cell_or_empty(spec, Criterion::husimi, 0)});
  }
  return t;
}

inline csv::Table eta_report_table() {
  csv::Table t;
  t.header = {"family", "s",       "t",
              "gamma",  "eta",     "m",
              "n",      "formula_value", "definition_value",
              "abs_diff", "note"};
  for (const char* family : {"socs", "sots"}) {
    const bool is_socs = std::string(family) == "socs";
    for (double s : {0.2, 0.5, 0.8}) {
      const double tv = std::sqrt(1.0 - s * s);
      const states::SupParams p(s, tv);
      for (double gamma : {0.5, 1.0, 2.0}) {
        for (double eta : {0.0, 0.25, 0.5}) {
          const states::DetectorSpec det(eta);
          const std::vector<std::pair<int, int>> orders =
              is_socs ? std::vector<std::pair<int, int>>{{1, 1}, {2, 1}}
                      : std::vector<std::pair<int, int>>{{1, 1}, {2, 2}};
          for (const auto& [m, n] : orders) {
            std::string formula, diff, note;
            std::complex<double> definition;
            if (is_socs) {
              const states::CoherentSpec c{std::complex<double>(gamma, 0.0)};
              const states::StateSpec spec = states::StateSpec::socs(p, c.alpha, eta);
              definition = states::moment(spec, m, n);
              try {
                const std::complex<double> v = states::eta_formula_moment_socs(m, n, p, c, det);
                formula = csv::format_double(v.real());
                diff = csv::format_double(std::abs(v - definition));
              } catch (const degenerate_denominator&) {
                note = "degenerate-denominator";
              }
            } else {
              const states::ThermalSpec th{gamma};
              const states::StateSpec spec = states::StateSpec::sots(p, gamma, eta);
              definition = states::moment(spec, m, n);
              try {
                const double v = states::eta_formula_moment_sots(n, p, th, det);
                formula = csv::format_double(v);
                diff = csv::format_double(std::abs(v - definition.real()));
              } catch (const degenerate_denominator&) {
                note = "degenerate-denominator";
              }
            }
            t.rows.push_back({family, csv::format_double(s), csv::format_double(tv),
                              csv::format_double(gamma), csv::format_double(eta),
                              csv::format_int(m), csv::format_int(n), formula,
                              csv::format_double(definition.real()), diff, note});
          }
        }
      }
    }
  }
  return t;
}

}  // namespace detail

inline std::vector<PresetFile> preset_tables(const std::string& name) {
  using witnesses::Criterion;
  std::vector<PresetFile> files;
  auto nine_gamma_panels = [&](const std::string& fig, Criterion crit,
                               const std::array<int, 3>& orders) {
    const std::array<double, 3> svals{0.2, 0.5, 0.8};
    const char* tags = "abcdefghi";
    int k = 0;
    for (double s : svals) {
      for (int l : orders) {
        files.push_back({fig + tags[k] + ".csv", detail::family_gamma_panel(crit, l, s)});
        ++k;
      }
    }
  };
  if (name == "fig1") {
    nine_gamma_panels("fig1", Criterion::q, {2, 5, 7});
  } else if (name == "fig2") {
    files.push_back({"fig2a.csv", detail::family_s_panel(Criterion::q, 2, 3.0)});
    files.push_back({"fig2b.csv", detail::family_s_panel(Criterion::q, 5, 3.37)});
    files.push_back({"fig2c.csv", detail::family_s_panel(Criterion::q, 7, 3.69)});
  } else if (name == "fig3") {
    nine_gamma_panels("fig3", Criterion::hoa, {2, 3, 4});
  } else if (name == "fig4") {
    files.push_back({"fig4a.csv", detail::family_s_panel(Criterion::hoa, 2, 0.1)});
    files.push_back({"fig4b.csv", detail::family_s_panel(Criterion::hoa, 3, 0.2)});
    files.push_back({"fig4c.csv", detail::family_s_panel(Criterion::hoa, 4, 0.3)});
  } else if (name == "fig5") {
    nine_gamma_panels("fig5", Criterion::hosps, {2, 3, 4});
  } else if (name == "fig6") {
    files.push_back({"fig6a.csv", detail::family_s_panel(Criterion::hosps, 2, 0.2)});
    files.push_back({"fig6b.csv", detail::family_s_panel(Criterion::hosps, 3, 0.2)});
    files.push_back({"fig6c.csv", detail::family_s_panel(Criterion::hosps, 4, 0.2)});
  } else if (name == "fig7") {
    nine_gamma_panels("fig7", Criterion::hos, {2, 4, 6});
  } else if (name == "fig8") {
    files.push_back({"fig8a.csv", detail::family_s_panel(Criterion::hos, 2, 0.01)});
    files.push_back({"fig8b.csv", detail::family_s_panel(Criterion::hos, 4, 0.01)});
    files.push_back({"fig8c.csv", detail::family_s_panel(Criterion::hos, 6, 0.01)});
  } else if (name == "fig9") {
    const std::array<std::pair<double, double>, 3> panels{{{1.0, 0.2}, {0.1, 0.5}, {0.01, 0.8}}};
    const char* tags = "abc";
    for (int k = 0; k < 3; ++k) {
      const auto [gamma, s] = panels[static_cast<size_t>(k)];
      files.push_back({std::string("fig9") + tags[k] + "_radial.csv",
                       detail::husimi_radial_panel(gamma, s, 4.0, 161)});
      files.push_back({std::string("fig9") + tags[k] + "_plane.csv",
                       detail::husimi_plane_panel(gamma, s, 4.0, 61)});
    }
  } else if (name == "fig10") {
    files.push_back({"fig10a.csv", detail::family_gamma_panel(Criterion::a3, 3, 0.01)});
    files.push_back({"fig10b.csv", detail::family_gamma_panel(Criterion::a3, 3, 0.1)});
    files.push_back({"fig10c.csv", detail::family_gamma_panel(Criterion::a3, 3, 0.2)});
  } else if (name == "fig11") {
    files.push_back({"fig11a.csv", detail::family_s_panel(Criterion::a3, 3, 0.1)});
    files.push_back({"fig11b.csv", detail::family_s_panel(Criterion::a3, 3, 0.5)});
    files.push_back({"fig11c.csv", detail::family_s_panel(Criterion::a3, 3, 0.7)});
  } else if (name == "fig12") {
    files.push_back({"fig12a.csv", detail::klyshko_panel(2.0, 0.2, 10)});
    files.push_back({"fig12b.csv", detail::klyshko_panel(1.5, 0.5, 10)});
    files.push_back({"fig12c.csv", detail::klyshko_panel(1.0, 0.8, 10)});
  } else if (name == "fig13") {
    files.push_back({"fig13a.csv", detail::all_criteria_panel(states::Family::socs, 0.5, 4, 4)});
    files.push_back({"fig13b.csv", detail::all_criteria_panel(states::Family::sots, 0.5, 4, 4)});
  } else if (name == "eta-report") {
    files.push_back({"eta_report.csv", detail::eta_report_table()});
  } else {
    throw invalid_argument("unknown preset '" + name + "'");
  }
  return files;
}

// ---------------------------------------------------------------------------
// validate: closed forms against the truncated construction over the
// standard grid.

struct ValidateReport {
  bool pass = true;
  std::vector<std::string> summary;   // per-check maxima
  std::vector<std::string> failures;  // offending tuples
};

namespace detail {

inline std::string spec_label(const states::StateSpec& spec) {
  char buf[128];
  if (spec.family == states::Family::socs) {
    std::snprintf(buf, sizeof(buf), "socs s=%g alpha=%g%+gi", spec.sup.s,
                  spec.coherent.alpha.real(), spec.coherent.alpha.imag());
  } else {
    std::snprintf(buf, sizeof(buf), "sots s=%g nbar=%g", spec.sup.s, spec.thermal.nbar);
  }
  std::string s = buf;
  if (spec.detector.eta != 0.0) {
    std::snprintf(buf, sizeof(buf), " eta=%g", spec.detector.eta);
    s += buf;
  }
  return s;
}

}  // namespace detail

inline ValidateReport run_validation(bool inject_perturbation = false) {
  ValidateReport report;
  std::vector<states::StateSpec> grid;
  for (double s : {0.2, 0.5, 0.8}) {
    const states::SupParams p(s, std::sqrt(1.0 - s * s));
    for (double eta : {0.0, 0.25, 0.5}) {
      for (double g : {0.5, 1.0, 2.0}) {
        grid.push_back(states::StateSpec::socs(p, std::polar(g, 0.0), eta));
        grid.push_back(states::StateSpec::socs(p, std::polar(g, M_PI / 4), eta));
        grid.push_back(states::StateSpec::sots(p, g, eta));
      }
    }
  }
  double max_moment_err = 0.0, max_norm_err = 0.0, max_herm_err = 0.0;
  double max_prob_gap = 0.0, max_prob_sum_err = 0.0;
  auto record_failure = [&](const states::StateSpec& spec, int m, int n, double err) {
    report.pass = false;
    char buf[64];
    std::snprintf(buf, sizeof(buf), " m=%d n=%d err=%.3e", m, n, err);
    report.failures.push_back(detail::spec_label(spec) + buf);
  };
  for (const states::StateSpec& spec : grid) {
    ClosedFormProvider cf(spec);
    OracleProvider op(spec, 6);
    const bool poison = inject_perturbation && spec.family == states::Family::socs &&
                        spec.sup.s == 0.5 && spec.detector.eta == 0.0 &&
                        spec.coherent.alpha == std::complex<double>(1.0, 0.0);
    for (int m = 0; m <= 6; ++m) {
      for (int n = 0; n <= 6; ++n) {
        const std::complex<double> c = cf.moment(m, n);
        std::complex<double> o = op.moment(m, n);
        if (poison && m == 3 && n == 2) o = -o;  // harness sensitivity check
        const double scale = std::max({std::abs(c), std::abs(o), 1e-3});
        const double err = std::abs(c - o) / scale;
        max_moment_err = std::max(max_moment_err, err);
        if (!(std::abs(c - o) <= std::max(1e-9 * std::max(std::abs(c), std::abs(o)), 1e-12))) {
          record_failure(spec, m, n, err);
        }
        const double herm =
            std::abs(c - std::conj(cf.moment(n, m))) + std::abs(o - std::conj(op.moment(n, m)));
        max_herm_err = std::max(max_herm_err, herm);
        if (!(herm <= 1e-10 * std::max(1.0, std::abs(c)))) record_failure(spec, m, n, herm);
      }
    }
    const double norm_err = std::abs(cf.moment(0, 0) - 1.0) + std::abs(op.moment(0, 0) - 1.0);
    max_norm_err = std::max(max_norm_err, norm_err);
    if (!(norm_err <= 1e-12)) record_failure(spec, 0, 0, norm_err);

    const int prob_span = op.order_bound() + 3;
    long double closed_sum = 0.0L;
    for (int m = 0; m <= prob_span; ++m) {
      const double pc = cf.photon_prob(m);
      const double po = op.photon_prob(m);
      closed_sum += pc;
      const double gap = std::abs(pc - po);
      max_prob_gap = std::max(max_prob_gap, gap);
      if (!(gap <= 1e-10)) record_failure(spec, m, -1, gap);
    }
    const double sum_err = std::abs(static_cast<double>(closed_sum) - 1.0);
    max_prob_sum_err = std::max(max_prob_sum_err, sum_err);
    if (!(sum_err <= 1e-10)) record_failure(spec, -1, -1, sum_err);
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "moment backend agreement: max rel err %.3e", max_moment_err);
  report.summary.push_back(buf);
  std::snprintf(buf, sizeof(buf), "normalization: max |moment(0,0)-1| %.3e", max_norm_err);
  report.summary.push_back(buf);
  std::snprintf(buf, sizeof(buf), "hermiticity: max residual %.3e", max_herm_err);
  report.summary.push_back(buf);
  std::snprintf(buf, sizeof(buf), "photon probabilities: max backend gap %.3e", max_prob_gap);
  report.summary.push_back(buf);
  std::snprintf(buf, sizeof(buf), "photon probabilities: max |sum-1| %.3e", max_prob_sum_err);
  report.summary.push_back(buf);
  return report;
}

// ---------------------------------------------------------------------------
// dump: the truncated state as a plain-text table.

inline std::string dump_text(const StateArgs& args, int max_order) {
  if (max_order < 0) throw invalid_argument("dump: negative max order");
  OracleProvider op(make_spec(args), max_order);
  std::ostringstream os;
  std::visit([&](const auto& st) { oracle::dump_state(st, os); }, op.state());
  return os.str();
}

}  // namespace supnc::cli
