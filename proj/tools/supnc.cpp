// Command line front end for the SUP-operated state toolkit.  All domain
// logic lives in supnc/cli.hpp; this file only parses flags, routes output,
// and maps failures onto exit codes:
//   0 success, 1 validation failure, 2 usage error, 3 degenerate or
//   undefined request, 4 internal numeric failure, 5 I/O failure.
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "supnc/cli.hpp"

namespace {

bool color_allowed() { return ::isatty(2) != 0 && std::getenv("NO_COLOR") == nullptr; }

void diag(const std::string& msg) {
  if (color_allowed()) {
    std::cerr << "\x1b[31merror:\x1b[0m " << msg << '\n';
  } else {
    std::cerr << "error: " << msg << '\n';
  }
}

// Flags shared by every subcommand that names a single state.
struct StateOpts {
  std::string family;
  double s = 0.0, t = 0.0, gamma = 0.0, phase = 0.0, eta = 0.0;
  CLI::Option* t_opt = nullptr;
  CLI::Option* phase_opt = nullptr;

  void attach(CLI::App* sub, bool with_gamma = true) {
    sub->add_option("--state", family, "state family")
        ->required()
        ->check(CLI::IsMember({"socs", "sots"}));
    sub->add_option("--s", s, "SUP coefficient s")->required();
    t_opt = sub->add_option("--t", t, "SUP coefficient t (default +sqrt(1-s^2))");
    if (with_gamma) {
      sub->add_option("--gamma", gamma, "|alpha| for socs, mean photon number for sots")
          ->required();
    }
    phase_opt = sub->add_option("--phase", phase, "phase of alpha in radians (socs only)");
    sub->add_option("--eta", eta, "detector efficiency in [0, 1]")->check(CLI::Range(0.0, 1.0));
  }

  supnc::cli::StateArgs to_args() const {
    supnc::cli::StateArgs a;
    a.family = family == "socs" ? supnc::states::Family::socs : supnc::states::Family::sots;
    a.s = s;
    if (t_opt != nullptr && t_opt->count() > 0) a.t = t;
    a.gamma = gamma;
    if (phase_opt != nullptr && phase_opt->count() > 0) {
      if (a.family == supnc::states::Family::sots) {
        throw supnc::invalid_argument("--phase applies to the coherent family only");
      }
      a.phase = phase;
    }
    a.eta = eta;
    return a;
  }
};

supnc::witnesses::Criterion criterion_from(const std::string& name) {
  const auto crit = supnc::witnesses::parse_criterion(name);
  if (!crit) throw supnc::invalid_argument("unknown criterion '" + name + "'");
  return *crit;
}

supnc::cli::Backend backend_from(const std::string& name) {
  const auto b = supnc::cli::parse_backend(name);
  if (!b) throw supnc::invalid_argument("unknown backend '" + name + "'");
  return *b;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw supnc::io_error("cannot open '" + path + "' for writing");
  return os;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"witness calculator for SUP-operated coherent and thermal states"};
  app.require_subcommand(1);
  int rc = 0;

  // witness: evaluate one criterion at the requested orders.
  auto* witness = app.add_subcommand("witness", "evaluate one criterion for one state");
  auto w_state = std::make_shared<StateOpts>();
  auto w_crit = std::make_shared<std::string>();
  auto w_orders = std::make_shared<std::string>();
  auto w_backend = std::make_shared<std::string>("closed");
  w_state->attach(witness);
  witness->add_option("--criterion", *w_crit, "q|hoa|hosps|hos|a3|klyshko|husimi")->required();
  witness->add_option("--order", *w_orders, "order list: '4', '2,3,5', or '0..6'")->required();
  witness->add_option("--backend", *w_backend, "closed|oracle|both")
      ->check(CLI::IsMember({"closed", "oracle", "both"}));
  witness->callback([w_state, w_crit, w_orders, w_backend]() {
    std::vector<std::string> notes;
    const supnc::csv::Table table =
        supnc::cli::witness_table(w_state->to_args(), criterion_from(*w_crit),
                                  supnc::cli::parse_order_list(*w_orders),
                                  backend_from(*w_backend), &notes);
    supnc::csv::write(std::cout, table);
    for (const std::string& n : notes) std::cerr << "# note: " << n << '\n';
  });

  // sweep: one criterion across a gamma range, written to a file.
  auto* sweep = app.add_subcommand("sweep", "sweep gamma and tabulate one criterion");
  auto s_state = std::make_shared<StateOpts>();
  auto s_crit = std::make_shared<std::string>();
  auto s_orders = std::make_shared<std::string>();
  auto s_backend = std::make_shared<std::string>("closed");
  auto s_range = std::make_shared<std::array<double, 2>>(std::array<double, 2>{0.0, 4.0});
  auto s_count = std::make_shared<int>(81);
  auto s_output = std::make_shared<std::string>();
  s_state->attach(sweep, /*with_gamma=*/false);
  sweep->add_option("--criterion", *s_crit, "q|hoa|hosps|hos|a3|klyshko|husimi")->required();
  sweep->add_option("--order", *s_orders, "order list: '4', '2,3,5', or '0..6'")->required();
  sweep->add_option("--backend", *s_backend, "closed|oracle|both")
      ->check(CLI::IsMember({"closed", "oracle", "both"}));
  sweep->add_option("--gamma-start", (*s_range)[0], "first gamma value");
  sweep->add_option("--gamma-stop", (*s_range)[1], "last gamma value");
  sweep->add_option("--gamma-count", *s_count, "number of grid points (>= 2)");
  sweep->add_option("--output", *s_output, "destination CSV file")->required();
  sweep->callback([s_state, s_crit, s_orders, s_backend, s_range, s_count, s_output]() {
    supnc::cli::SweepJob job;
    job.base = s_state->to_args();
    job.start = (*s_range)[0];
    job.stop = (*s_range)[1];
    job.count = *s_count;
    job.crit = criterion_from(*s_crit);
    job.orders = supnc::cli::parse_order_list(*s_orders);
    job.backend = backend_from(*s_backend);
    int undefined = 0;
    const supnc::csv::Table table = supnc::cli::sweep_table(job, &undefined);
    std::ofstream os = open_output(*s_output);
    supnc::csv::write(os, table);
    if (!os) throw supnc::io_error("short write to '" + *s_output + "'");
    if (undefined > 0) std::cerr << "# undefined cells: " << undefined << '\n';
  });

  // preset: canned comparison tables.
  auto* preset = app.add_subcommand("preset", "write a canned comparison grid");
  auto p_name = std::make_shared<std::string>();
  auto p_dir = std::make_shared<std::string>(".");
  preset->add_option("name", *p_name, "fig1..fig13 or eta-report")->required();
  preset->add_option("--output", *p_dir, "destination directory");
  preset->callback([p_name, p_dir]() {
    for (const supnc::cli::PresetFile& f : supnc::cli::preset_tables(*p_name)) {
      const std::string path = *p_dir + "/" + f.name;
      std::ofstream os = open_output(path);
      supnc::csv::write(os, f.table);
      if (!os) throw supnc::io_error("short write to '" + path + "'");
      std::cerr << "# wrote " << path << '\n';
    }
  });

  // validate: closed forms against the truncated construction.
  auto* validate = app.add_subcommand("validate", "cross-check the two backends");
  auto v_inject = std::make_shared<bool>(false);
  validate->add_flag("--inject-perturbation", *v_inject)->group("");  // harness self-test
  validate->callback([v_inject, &rc]() {
    const supnc::cli::ValidateReport report = supnc::cli::run_validation(*v_inject);
    for (const std::string& line : report.summary) std::cout << line << '\n';
    const size_t shown = std::min<size_t>(report.failures.size(), 20);
    for (size_t i = 0; i < shown; ++i) std::cout << "FAIL " << report.failures[i] << '\n';
    if (report.failures.size() > shown) {
      std::cout << "... " << report.failures.size() - shown << " more failures\n";
    }
    std::cout << (report.pass ? "validation passed" : "validation FAILED") << '\n';
    rc = report.pass ? 0 : 1;
  });

  // dump: the truncated state itself.
  auto* dump = app.add_subcommand("dump", "print the truncated state");
  auto d_state = std::make_shared<StateOpts>();
  auto d_order = std::make_shared<int>(6);
  auto d_output = std::make_shared<std::string>();
  d_state->attach(dump);
  dump->add_option("--max-order", *d_order, "largest moment order the truncation must support");
  auto* d_out_opt = dump->add_option("--output", *d_output, "destination file (default stdout)");
  dump->callback([d_state, d_order, d_output, d_out_opt]() {
    const std::string text = supnc::cli::dump_text(d_state->to_args(), *d_order);
    if (d_out_opt->count() > 0) {
      std::ofstream os = open_output(*d_output);
      os << text;
      if (!os) throw supnc::io_error("short write to '" + *d_output + "'");
    } else {
      std::cout << text;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diag(e.what());
    return 2;
  } catch (const supnc::degenerate_state& e) {
    diag(e.what());
    return 3;
  } catch (const supnc::undefined_witness& e) {
    diag(e.what());
    return 3;
  } catch (const supnc::invalid_argument& e) {
    diag(e.what());
    return 2;
  } catch (const supnc::io_error& e) {
    diag(e.what());
    return 5;
  } catch (const std::exception& e) {
    diag(e.what());
    return 4;
  }
  return rc;
}
