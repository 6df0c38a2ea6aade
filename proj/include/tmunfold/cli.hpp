#pragma once

// Command driver shared by the tmunfold executable and the tests.
// Exit codes: 0 all checks pass (proxies included), 1 a check failed,
// 2 the configuration or the command line is invalid.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tmunfold/config.hpp"

namespace tmunfold {

enum class Format { text, json };

/// Command-line overrides; unset fields fall back to [params].
struct Flags {
  std::optional<std::size_t> samples;
  std::optional<double> tol;
  std::optional<double> fd_step;
  std::optional<std::uint64_t> seed;
  Format format = Format::text;
  std::string out;  // report path, or CSV path for export
  std::string id;   // restrict to one space / morphism / candidate / collar
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"validate", "unfold", "check-unfolding", "lift",
                                          "tube-from-unfolding", "uniqueness", "export"};
  return c;
}

inline void emit_report(const Report& r, Format f, std::ostream& os) {
  if (f == Format::json)
    write_json(r, os);
  else
    write_text(r, os);
}

inline void emit_report(const Report& r, Format f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  emit_report(r, f, os);
  if (!os) throw IoError("write to '" + path + "' failed");
}

namespace cli_detail {

inline Check failure(const std::string& name, const std::string& anchor, const std::string& note) {
  Check c;
  c.name = name;
  c.anchor = anchor;
  c.status = Status::fail;
  c.residual = std::numeric_limits<double>::infinity();
  c.note = note;
  return c;
}

inline std::optional<UnfoldingModel> build(const SpaceSpec& s, const Sampler& sampler, double tol, Report& rep) {
  try {
    return build_primary_unfolding(s, sampler, tol);
  } catch (const ValidationError& e) {
    rep.add(failure(s.id + ".build", "unfolding.build", e.what()));
    return std::nullopt;
  }
}

template <class T>
bool selected(const T& obj, const Flags& f) {
  return f.id.empty() || obj.id == f.id;
}

}  // namespace cli_detail

/// Runs one command. Reports go to `out` (or to flags.out); diagnostics to `err`.
inline int run(const std::string& command, Config cfg, const Flags& flags, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  if (flags.samples) cfg.params.samples = *flags.samples;
  if (flags.tol) cfg.params.tol = *flags.tol;
  if (flags.fd_step) cfg.params.fd_step = *flags.fd_step;
  if (flags.seed) cfg.params.seed = *flags.seed;
  try {
    cfg.params.check();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
    err << "error: unknown command '" << command << "'\n";
    return kExitConfig;
  }
  const Params& P = cfg.params;
  const Sampler sampler(P.samples, P.seed);
  Report rep;
  bool matched = false;

  auto model_of = [&](const std::string& space_id) -> std::optional<UnfoldingModel> {
    const SpaceSpec* s = cfg.space(space_id);
    return build(*s, sampler, P.tol, rep);
  };

  try {
    if (command == "export") {
      const SpaceSpec* s = nullptr;
      for (const auto& sp : cfg.spaces)
        if (selected(sp, flags)) {
          s = &sp;
          break;
        }
      if (!s) {
        err << "error: no space to export" << (flags.id.empty() ? "" : " with id '" + flags.id + "'") << '\n';
        return kExitConfig;
      }
      auto m = build(*s, sampler, P.tol, rep);
      if (!m) {
        emit_report(rep, flags.format, err);
        return kExitFail;
      }
      if (flags.out.empty())
        export_pointcloud(*m, sampler, out);
      else
        export_pointcloud(*m, sampler, flags.out);
      return kExitPass;
    }

    if (command == "validate") {
      for (const auto& s : cfg.spaces) {
        if (!selected(s, flags)) continue;
        matched = true;
        Report r = validate_cocycles(s, sampler, P.tol);
        r.merge(validate_transitions(s, sampler, P.tol));
        if (s.singular) r.merge(validate_radium(s, sampler, P.tol));
        rep.merge(r.prefix(s.id + "."));
      }
    } else if (command == "unfold") {
      for (const auto& s : cfg.spaces) {
        if (!selected(s, flags)) continue;
        matched = true;
        if (auto m = build(s, sampler, P.tol, rep)) {
          Report r = verify_unfolding_axioms(*m, sampler, P.tol);
          rep.merge(r.prefix(s.id + "."));
        }
      }
    } else if (command == "check-unfolding") {
      for (const auto& c : cfg.candidates) {
        if (!selected(c, flags)) continue;
        matched = true;
        Report r = verify_candidate(c, *cfg.space(c.target), sampler, P.tol);
        rep.merge(r.prefix(c.id + "."));
      }
    } else if (command == "lift") {
      for (const auto& m : cfg.morphisms) {
        if (!selected(m, flags)) continue;
        matched = true;
        Report parity;
        check_pieces(m, *cfg.space(m.source), sampler, P.fd_tol, P.fd_step, parity);
        if (!parity.passed()) {
          rep.merge(parity.prefix(m.id + "."));
          continue;
        }
        auto src = model_of(m.source);
        auto tgt = model_of(m.target);
        if (!src || !tgt) continue;
        try {
          LiftResult res = lift_tm_morphism(m, *src, *tgt, Perm::identity, sampler, P.tol, P.fd_tol, P.fd_step);
          rep.merge(res.report.prefix(m.id + "."));
          if (!m.inverse.empty()) {
            LiftResult inv = lift_tm_morphism(*cfg.morphism(m.inverse), *tgt, *src, Perm::identity, sampler, P.tol,
                                              P.fd_tol, P.fd_step);
            Report d = verify_diffeomorphism(*res.lifted, *inv.lifted, sampler, P.tol, P.fd_step);
            rep.merge(d.prefix(m.id + "."));
          }
        } catch (const NotLiftable& e) {
          rep.add(failure(m.id + ".lift", "lifting.global", std::string(e.what()) + " [" + e.where() + "]"));
        } catch (const InconsistentLift& e) {
          rep.add(failure(m.id + ".lift.well_defined", "lifting.global", e.what()));
        }
      }
    } else if (command == "tube-from-unfolding") {
      for (const auto& c : cfg.collars) {
        if (!selected(c, flags)) continue;
        matched = true;
        auto m = model_of(c.space);
        if (!m) continue;
        try {
          Report r = tube_from_unfolding(*m, c, sampler, P.tol);
          rep.merge(r.prefix(c.id + "."));
        } catch (const CollarError& e) {
          rep.add(failure(c.id + ".collar", "collar.section", e.what()));
        }
      }
    } else if (command == "uniqueness") {
      for (const auto& m : cfg.morphisms) {
        if (m.inverse.empty()) continue;
        if (flags.id.empty() ? !(m.id <= m.inverse) : m.id != flags.id) continue;
        matched = true;
        auto a = model_of(m.source);
        auto b = model_of(m.target);
        if (!a || !b) continue;
        try {
          UniquenessResult u =
              uniqueness_check(*a, *b, m, *cfg.morphism(m.inverse), sampler, P.tol, P.fd_tol, P.fd_step);
          rep.merge(u.report.prefix(m.id + "."));
        } catch (const NotLiftable& e) {
          rep.add(failure(m.id + ".uniqueness", "lifting.uniqueness", std::string(e.what()) + " [" + e.where() + "]"));
        } catch (const InconsistentLift& e) {
          rep.add(failure(m.id + ".uniqueness", "lifting.uniqueness", e.what()));
        }
      }
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    rep.add(failure(command + ".error", "cli.run", e.what()));
  }

  if (!matched && !flags.id.empty()) {
    err << "error: no object with id '" << flags.id << "' for command '" << command << "'\n";
    return kExitConfig;
  }
  try {
    if (flags.out.empty())
      emit_report(rep, flags.format, out);
    else
      emit_report(rep, flags.format, flags.out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return rep.passed() ? kExitPass : kExitFail;
}

/// Loads `path` and runs `command`; configuration failures exit 2.
inline int run_file(const std::string& command, const std::string& path, const Flags& flags, std::ostream& out,
                    std::ostream& err) {
  Config cfg;
  try {
    cfg = load_config(path);
  } catch (const Error& e) {
    err << "error: " << path << ": " << e.what() << '\n';
    return kExitConfig;
  }
  return run(command, std::move(cfg), flags, out, err);
}

}  // namespace tmunfold
