// Batch CLI for the squarefree-plus-prime workbench. Subcommands map onto
// the library modules; every command writes JSON-lines records to stdout
// (or CSV with --csv), diagnostics to stderr, and a manifest next to any
// --out file. Exit code is nonzero iff an asserted invariant fails or an
// error occurs.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfprime/digest.hpp"
#include "sfprime/dioph.hpp"
#include "sfprime/expsum.hpp"
#include "sfprime/gamma.hpp"
#include "sfprime/smoothing.hpp"
#include "sfprime/table_io.hpp"
#include "sfprime/tables.hpp"
#include "sfprime/version.hpp"

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Record emission: JSON lines or CSV, streamed, with a running digest.
// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_cell(const ordered_json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find(',') != std::string::npos || s.find('"') != std::string::npos) {
      std::string quoted = "\"";
      for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      quoted += '"';
      return quoted;
    }
    return s;
  }
  return v.dump();
}

class Emitter {
 public:
  Emitter(bool csv, const std::string& out_path) : csv_(csv) {
    if (!out_path.empty()) {
      file_.open(out_path, std::ios::binary | std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot open output: " + out_path);
      sink_ = &file_;
    } else {
      sink_ = &std::cout;
    }
  }

  void emit(const ordered_json& rec) {
    std::string line;
    if (csv_) {
      if (first_) {
        bool sep = false;
        for (auto& [k, v] : rec.items()) {
          (void)v;
          if (sep) line += ',';
          line += k;
          sep = true;
        }
        line += '\n';
      }
      bool sep = false;
      for (auto& [k, v] : rec.items()) {
        (void)k;
        if (sep) line += ',';
        line += csv_cell(v);
        sep = true;
      }
      line += '\n';
    } else {
      line = rec.dump() + "\n";
    }
    first_ = false;
    (*sink_) << line;
    digest_.update(line);
  }

  void flush() { sink_->flush(); }
  std::string digest_hex() const { return digest_.hex(); }

 private:
  bool csv_;
  bool first_ = true;
  std::ofstream file_;
  std::ostream* sink_ = nullptr;
  sfprime::Fnv1a64 digest_;
};

// ---------------------------------------------------------------------------
// Table cache: build or reuse serialized tables, tracking checksums for the
// experiment manifest. Cache directory comes from SFPRIME_CACHE_DIR.
// ---------------------------------------------------------------------------

class TableProvider {
 public:
  TableProvider() {
    if (const char* env = std::getenv("SFPRIME_CACHE_DIR")) cache_dir_ = env;
  }

  const sfprime::PrimeTable& primes(uint64_t limit) {
    if (!primes_ || primes_->limit < limit) {
      primes_ = acquire<sfprime::PrimeTable>(
          "prime", limit, [&] { return sfprime::sieve_primes(limit); },
          sfprime::load_prime_table);
    }
    return *primes_;
  }

  const sfprime::MobiusTable& mobius(uint64_t limit) {
    if (!mobius_ || mobius_->limit < limit) {
      mobius_ = acquire<sfprime::MobiusTable>(
          "mobius", limit, [&] { return sfprime::sieve_mobius(limit); },
          sfprime::load_mobius_table);
    }
    return *mobius_;
  }

  const sfprime::MangoldtTable& mangoldt(uint64_t limit) {
    if (!mangoldt_ || mangoldt_->limit < limit) {
      mangoldt_ = acquire<sfprime::MangoldtTable>(
          "mangoldt", limit, [&] { return sfprime::sieve_mangoldt(limit); },
          sfprime::load_mangoldt_table);
    }
    return *mangoldt_;
  }

  const std::vector<ordered_json>& used_tables() const { return used_; }

 private:
  template <class Table, class Build, class Load>
  std::unique_ptr<Table> acquire(const char* kind, uint64_t limit, Build build,
                                 Load load) {
    if (!cache_dir_.empty()) {
      fs::create_directories(cache_dir_);
      fs::path path = fs::path(cache_dir_) /
                      (std::string(kind) + "-" + std::to_string(limit) + ".sfpt");
      if (!fs::exists(path)) {
        Table t = build();
        sfprime::save_table(t, path.string());
        record(kind, limit, sfprime::table_file_checksum(path.string()));
        return std::make_unique<Table>(std::move(t));
      }
      Table t = load(path.string());
      record(kind, limit, sfprime::table_file_checksum(path.string()));
      return std::make_unique<Table>(std::move(t));
    }
    Table t = build();
    record(kind, limit, memory_checksum(t));
    return std::make_unique<Table>(std::move(t));
  }

  static std::string memory_checksum(const sfprime::PrimeTable& t) {
    sfprime::Fnv1a64 h;
    h.update(t.bits.data(), t.bits.size() * 8);
    return h.hex();
  }
  static std::string memory_checksum(const sfprime::MobiusTable& t) {
    sfprime::Fnv1a64 h;
    h.update(t.mu.data(), t.mu.size());
    return h.hex();
  }
  static std::string memory_checksum(const sfprime::MangoldtTable& t) {
    sfprime::Fnv1a64 h;
    h.update(t.lam.data(), t.lam.size() * 8);
    return h.hex();
  }

  void record(const char* kind, uint64_t limit, const std::string& sum) {
    used_.push_back({{"kind", kind}, {"limit", limit}, {"checksum", sum}});
  }

  std::string cache_dir_;
  std::vector<ordered_json> used_;
  std::unique_ptr<sfprime::PrimeTable> primes_;
  std::unique_ptr<sfprime::MobiusTable> mobius_;
  std::unique_ptr<sfprime::MangoldtTable> mangoldt_;
};

struct GlobalOpts {
  bool csv = false;
  std::string out_path;
  int threads = 1;
};

void write_manifest(const std::string& command, const ordered_json& params,
                    const std::string& alpha_id, const TableProvider& tables,
                    const std::string& out_path, const std::string& digest) {
  if (out_path.empty()) return;
  ordered_json m;
  m["command"] = command;
  m["params"] = params;
  if (!alpha_id.empty()) m["alpha"] = alpha_id;
  m["tables"] = tables.used_tables();
  m["version"] = sfprime::version;
  m["output_digest"] = digest;
  std::ofstream f(out_path + ".manifest.json", std::ios::trunc);
  f << m.dump(2) << "\n";
}

// Deterministic low-discrepancy sample points in [0,1).
double golden_point(uint64_t i) {
  return std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"squarefree + special-prime workbench"};
  app.set_config("--config", "", "plain-text key = value config file");
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_flag("--csv", g.csv, "emit CSV instead of JSON lines");
  app.add_option("--out", g.out_path,
                 "write records to this file (a manifest is written alongside)");
  app.add_option("--threads", g.threads, "worker threads")->default_val(1);

  // --- primes ---------------------------------------------------------------
  auto* sc_primes = app.add_subcommand("primes", "list primes up to a limit");
  uint64_t primes_limit = 100;
  sc_primes->add_option("--limit", primes_limit)->required();

  // --- mobius ---------------------------------------------------------------
  auto* sc_mobius = app.add_subcommand("mobius", "Mobius function table dump");
  uint64_t mobius_limit = 100, mobius_from = 1;
  sc_mobius->add_option("--limit", mobius_limit)->required();
  sc_mobius->add_option("--from", mobius_from);

  // --- convergents ----------------------------------------------------------
  auto* sc_conv = app.add_subcommand("convergents",
                                     "continued-fraction convergents of alpha");
  std::string conv_alpha = "sqrt2";
  uint64_t conv_qmax = 1000;
  sc_conv->add_option("--alpha", conv_alpha);
  sc_conv->add_option("--q-max", conv_qmax);

  // --- special-primes ---------------------------------------------------------
  auto* sc_sp = app.add_subcommand(
      "special-primes", "primes with ||alpha p + beta|| < p^-theta");
  std::string sp_alpha = "sqrt2";
  double sp_beta = 0.0, sp_theta = 0.1;
  uint64_t sp_limit = 10'000;
  bool sp_theta_zero = false;
  sc_sp->add_option("--alpha", sp_alpha);
  sc_sp->add_option("--beta", sp_beta);
  sc_sp->add_option("--theta", sp_theta);
  sc_sp->add_option("--limit", sp_limit);
  sc_sp->add_flag("--allow-theta-zero", sp_theta_zero,
                  "test mode: theta = 0 accepts every prime");

  // --- chi --------------------------------------------------------------------
  auto* sc_chi = app.add_subcommand("chi", "smoothing function construction");
  uint64_t chi_N = 10'000;
  double chi_theta = 0.09;
  uint64_t chi_kmax = 0;
  bool chi_verify = false;
  sc_chi->add_option("--N", chi_N)->required();
  sc_chi->add_option("--theta", chi_theta);
  sc_chi->add_option("--k-max", chi_kmax, "dump coefficients up to this k");
  sc_chi->add_flag("--verify", chi_verify, "check the coefficient bounds");

  // --- expsum -----------------------------------------------------------------
  auto* sc_exp = app.add_subcommand("expsum", "exponential-sum lemma evaluators");
  int exp_lemma = 1;
  std::string exp_alpha = "sqrt2";
  uint64_t exp_q = 5, exp_a = 0, exp_d = 1, exp_M = 16, exp_J = 64;
  uint32_t exp_mu_order = 2, exp_zeta_order = 2;
  double exp_X = 1000.0, exp_Y = 100.0, exp_x = 1e5;
  sc_exp->add_option("--lemma", exp_lemma)->check(CLI::Range(1, 4))->required();
  sc_exp->add_option("--alpha", exp_alpha);
  sc_exp->add_option("--q", exp_q);
  sc_exp->add_option("--X", exp_X);
  sc_exp->add_option("--Y", exp_Y);
  sc_exp->add_option("--a", exp_a);
  sc_exp->add_option("--d", exp_d);
  sc_exp->add_option("--x", exp_x);
  sc_exp->add_option("--M", exp_M);
  sc_exp->add_option("--J", exp_J);
  sc_exp->add_option("--mu-order", exp_mu_order);
  sc_exp->add_option("--zeta-order", exp_zeta_order);

  // --- estermann ---------------------------------------------------------------
  auto* sc_est = app.add_subcommand("estermann",
                                    "T(n): prime + squarefree representations");
  uint64_t est_n = 0;
  std::vector<uint64_t> est_range;
  bool est_ratio = false;
  sc_est->add_option("--n", est_n);
  sc_est->add_option("--range", est_range)->expected(2);
  sc_est->add_flag("--ratio", est_ratio, "include the asymptotic ratio");

  // --- gamma --------------------------------------------------------------------
  auto* sc_gamma = app.add_subcommand("gamma", "Gamma decomposition report");
  uint64_t gamma_N = 10'000;
  double gamma_theta = 0.12, gamma_beta = 0.0;
  std::string gamma_alpha = "sqrt2";
  sc_gamma->add_option("--N", gamma_N)->required();
  sc_gamma->add_option("--theta", gamma_theta);
  sc_gamma->add_option("--alpha", gamma_alpha);
  sc_gamma->add_option("--beta", gamma_beta);

  // --- gamma-blocks ---------------------------------------------------------------
  auto* sc_blocks = app.add_subcommand("gamma-blocks",
                                       "dyadic Gamma3 block decomposition");
  uint64_t blk_N = 2'000;
  double blk_theta = 0.13, blk_beta = 0.0;
  std::string blk_alpha = "sqrt2";
  sc_blocks->add_option("--N", blk_N)->required();
  sc_blocks->add_option("--theta", blk_theta);
  sc_blocks->add_option("--alpha", blk_alpha);
  sc_blocks->add_option("--beta", blk_beta);

  // --- hb-verify -------------------------------------------------------------------
  auto* sc_hb = app.add_subcommand("hb-verify", "Heath-Brown identity check");
  int hb_k = 3;
  uint64_t hb_P = 1024, hb_P1 = 2048;
  sc_hb->add_option("--k", hb_k)->check(CLI::Range(2, 3));
  sc_hb->add_option("--P", hb_P);
  sc_hb->add_option("--P1", hb_P1);

  // --- scale ----------------------------------------------------------------------
  auto* sc_scale = app.add_subcommand("scale", "N = floor(q^{20/7})");
  uint64_t scale_q = 2;
  sc_scale->add_option("--q", scale_q)->required();

  // --- final-report ------------------------------------------------------------------
  auto* sc_final = app.add_subcommand(
      "final-report", "Gamma2 against the aggregate block bound");
  std::vector<uint64_t> final_qs;
  uint64_t final_N = 0;
  double final_theta = 0.12, final_beta = 0.0;
  std::string final_alpha = "sqrt2";
  sc_final->add_option("--q", final_qs, "one or more q values")->required();
  sc_final->add_option("--N", final_N, "override N (default floor(q^{20/7}))");
  sc_final->add_option("--theta", final_theta);
  sc_final->add_option("--alpha", final_alpha);
  sc_final->add_option("--beta", final_beta);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    ordered_json err{{"error", "cli"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }

  int exit_code = 0;
  try {
    Emitter emit(g.csv, g.out_path);
    TableProvider tables;
    ordered_json params;
    std::string alpha_id;
    std::string command;

    if (*sc_primes) {
      command = "primes";
      params = {{"limit", primes_limit}};
      const auto& t = tables.primes(primes_limit);
      for (uint64_t p : t.primes)
        if (p <= primes_limit) emit.emit({{"p", p}});
      std::cerr << "count=" << t.primes.size() << "\n";
    } else if (*sc_mobius) {
      command = "mobius";
      params = {{"limit", mobius_limit}, {"from", mobius_from}};
      const auto& t = tables.mobius(mobius_limit);
      for (uint64_t n = std::max<uint64_t>(1, mobius_from); n <= mobius_limit; ++n)
        emit.emit({{"n", n}, {"mu", int(t.mu[n])}});
    } else if (*sc_conv) {
      command = "convergents";
      params = {{"alpha", conv_alpha}, {"q_max", conv_qmax}};
      auto alpha = sfprime::AlphaSpec::parse(conv_alpha);
      alpha_id = alpha.id();
      auto cs = sfprime::convergents(alpha, conv_qmax);
      for (size_t i = 0; i < cs.size(); ++i)
        emit.emit({{"i", i}, {"a", cs[i].a}, {"q", cs[i].q}});
    } else if (*sc_sp) {
      command = "special-primes";
      params = {{"alpha", sp_alpha},
                {"beta", sp_beta},
                {"theta", sp_theta},
                {"limit", sp_limit}};
      auto alpha = sfprime::AlphaSpec::parse(sp_alpha);
      alpha_id = alpha.id();
      sfprime::SpecialPrimeOptions opt;
      opt.allow_theta_zero = sp_theta_zero;
      opt.threads = g.threads;
      auto hits = sfprime::find_special_primes(alpha, sp_beta, sp_theta,
                                               sp_limit, tables.primes(sp_limit),
                                               opt);
      for (const auto& h : hits)
        emit.emit({{"p", h.p}, {"dist", h.dist}, {"bound", h.bound}});
      std::cerr << "hits=" << hits.size() << "\n";
    } else if (*sc_chi) {
      command = "chi";
      params = {{"N", chi_N},
                {"theta", chi_theta},
                {"k_max", chi_kmax},
                {"verify", chi_verify}};
      auto config = sfprime::RunConfig::make(chi_N, chi_theta);
      auto chi = sfprime::build_chi(config);
      emit.emit({{"record", "construction"},
                 {"N", config.N},
                 {"theta", config.theta},
                 {"delta", config.delta},
                 {"K", config.K},
                 {"r", chi.order()},
                 {"inner_halfwidth", chi.inner_halfwidth()},
                 {"box_width", chi.box_width()},
                 {"support_halfwidth", chi.support_halfwidth()}});
      if (chi_kmax > 0) {
        auto coeffs = sfprime::fourier_coeffs(
            chi, std::max<uint64_t>(chi_kmax, config.K));
        for (uint64_t k = 0; k <= chi_kmax && k < coeffs.size(); ++k)
          emit.emit({{"record", "coeff"},
                     {"k", k},
                     {"c_hat", coeffs[k]},
                     {"c", k == 0 ? config.delta : coeffs[k] / config.delta}});
      }
      if (chi_verify) {
        bool c0_exact = chi.coeff(0) == config.delta;
        bool range_ok = true, dead_ok = true, contain_ok = true;
        for (uint64_t i = 0; i < 10'000; ++i) {
          double t = golden_point(i);
          double v = chi.eval(t);
          if (v < 0.0 || v > 1.0) range_ok = false;
          if (t >= config.delta && t <= 1.0 - config.delta && v != 0.0)
            dead_ok = false;
          if (v > 0.0 && std::min(t, 1.0 - t) >= config.delta)
            contain_ok = false;
        }
        double tail = chi.tail_abs_normalized(config.K);
        bool tail_ok = tail <= 1.0 / static_cast<double>(config.N);
        bool pass = c0_exact && range_ok && dead_ok && contain_ok && tail_ok;
        emit.emit({{"record", "verify"},
                   {"c0_exact", c0_exact},
                   {"range_ok", range_ok},
                   {"dead_zone_ok", dead_ok},
                   {"containment_ok", contain_ok},
                   {"tail", tail},
                   {"tail_bound", 1.0 / static_cast<double>(config.N)},
                   {"tail_ok", tail_ok},
                   {"pass", pass}});
        if (!pass) exit_code = 1;
      }
    } else if (*sc_exp) {
      command = "expsum";
      params = {{"lemma", exp_lemma}, {"alpha", exp_alpha}, {"q", exp_q}};
      auto alpha = sfprime::AlphaSpec::parse(exp_alpha);
      alpha_id = alpha.id();
      if (exp_lemma == 1) {
        params.update(ordered_json{{"X", exp_X}, {"a", exp_a}, {"d", exp_d}});
        auto r = sfprime::progression_expsum(exp_X, exp_a, exp_d, alpha);
        emit.emit({{"lemma", 1},
                   {"X", exp_X},
                   {"a", exp_a},
                   {"d", exp_d},
                   {"alpha", alpha.id()},
                   {"re", r.value.real()},
                   {"im", r.value.imag()},
                   {"magnitude", r.magnitude},
                   {"terms", r.terms},
                   {"degenerate", r.degenerate},
                   {"classical_cap", r.classical_cap}});
      } else if (exp_lemma == 2) {
        params.update(ordered_json{{"X", exp_X}, {"Y", exp_Y}});
        auto rep = sfprime::lemma2_min_sum(exp_X, exp_Y, alpha, exp_q);
        ordered_json rec{{"lemma", 2}};
        for (auto& [k, v] : rep.params) rec[k] = v;
        rec["alpha"] = rep.alpha_id;
        rec["lhs"] = rep.lhs;
        rec["rhs"] = rep.rhs;
        rec["ratio"] = rep.ratio;
        emit.emit(rec);
      } else {
        int power = exp_lemma == 3 ? 2 : 4;
        params.update(ordered_json{{"x", exp_x},
                                   {"M", exp_M},
                                   {"J", exp_J},
                                   {"mu_order", exp_mu_order},
                                   {"zeta_order", exp_zeta_order}});
        auto tau_mu = sfprime::sieve_tau(exp_mu_order, 2 * exp_M);
        auto tau_zeta = sfprime::sieve_tau(exp_zeta_order, 2 * exp_J);
        auto rep = sfprime::bilinear_min_sum(exp_x, exp_M, exp_J, tau_mu,
                                             tau_zeta, power, alpha, exp_q);
        ordered_json rec{{"lemma", exp_lemma}};
        for (auto& [k, v] : rep.params) rec[k] = v;
        rec["alpha"] = rep.alpha_id;
        rec["lhs"] = rep.lhs;
        rec["rhs"] = rep.rhs;
        rec["ratio"] = rep.ratio;
        emit.emit(rec);
      }
    } else if (*sc_est) {
      command = "estermann";
      uint64_t lo = est_n, hi = est_n;
      if (!est_range.empty()) {
        lo = est_range[0];
        hi = est_range[1];
      }
      if (lo < 3 || hi < lo)
        throw std::domain_error("estermann: need --n >= 3 or --range lo hi");
      params = {{"lo", lo}, {"hi", hi}, {"ratio", est_ratio}};
      const auto& primes = tables.primes(hi);
      const auto& mob = tables.mobius(hi);
      double artin = est_ratio ? sfprime::artin_constant(primes, hi) : 0.0;
      for (uint64_t n = lo; n <= hi; ++n) {
        uint64_t c = sfprime::estermann_count(n, primes, mob);
        ordered_json rec{{"n", n}, {"count", c}};
        if (est_ratio) {
          double s = sfprime::singular_series(n, primes);
          rec["singular"] = s;
          rec["ratio"] = double(c) * std::log(double(n)) / (artin * s * double(n));
        }
        emit.emit(rec);
      }
    } else if (*sc_gamma) {
      command = "gamma";
      params = {{"N", gamma_N},
                {"theta", gamma_theta},
                {"alpha", gamma_alpha},
                {"beta", gamma_beta},
                {"threads", g.threads}};
      auto alpha = sfprime::AlphaSpec::parse(gamma_alpha);
      alpha_id = alpha.id();
      auto config = sfprime::RunConfig::make(gamma_N, gamma_theta);
      auto rep = sfprime::gamma_report(config, alpha, gamma_beta,
                                       tables.primes(gamma_N),
                                       tables.mobius(gamma_N), g.threads);
      bool ok = rep.residual_within_budget();
      emit.emit({{"N", rep.N},
                 {"theta", config.theta},
                 {"delta", config.delta},
                 {"K", config.K},
                 {"alpha", alpha.id()},
                 {"beta", gamma_beta},
                 {"gamma", rep.gamma},
                 {"gamma1", rep.gamma1},
                 {"gamma2", rep.gamma2},
                 {"gamma2_imag", rep.gamma2_imag},
                 {"residual", rep.residual},
                 {"tail", rep.tail},
                 {"sum_log_primes", rep.sum_log_primes},
                 {"tail_budget", rep.tail_budget},
                 {"residual_ok", ok}});
      if (!ok) exit_code = 1;
    } else if (*sc_blocks) {
      command = "gamma-blocks";
      params = {{"N", blk_N},
                {"theta", blk_theta},
                {"alpha", blk_alpha},
                {"beta", blk_beta}};
      auto alpha = sfprime::AlphaSpec::parse(blk_alpha);
      alpha_id = alpha.id();
      auto config = sfprime::RunConfig::make(blk_N, blk_theta);
      auto dec = sfprime::decompose_gamma2(config, alpha, blk_beta,
                                           tables.primes(blk_N),
                                           tables.mobius(blk_N),
                                           tables.mangoldt(blk_N), g.threads);
      for (const auto& e : dec.entries)
        emit.emit({{"record", "block"},
                   {"K0", e.block.K0},
                   {"A0", e.block.A0},
                   {"N0", e.block.N0},
                   {"k_lo", e.block.k_cell.lo},
                   {"k_hi", e.block.k_cell.hi},
                   {"a_lo", e.block.a_cell.lo},
                   {"a_hi", e.block.a_cell.hi},
                   {"n_lo", e.block.n_cell.lo},
                   {"n_hi", e.block.n_cell.hi},
                   {"re", e.value.real()},
                   {"im", e.value.imag()}});
      emit.emit({{"record", "summary"},
                 {"blocks", dec.entries.size()},
                 {"gamma2_direct", dec.gamma2_direct},
                 {"gamma3_total", dec.gamma3_total},
                 {"difference", dec.difference},
                 {"slack_budget", dec.slack_budget}});
    } else if (*sc_hb) {
      command = "hb-verify";
      params = {{"k", hb_k}, {"P", hb_P}, {"P1", hb_P1}};
      const auto& mob = tables.mobius(hb_P1);
      const auto& man = tables.mangoldt(hb_P1);
      double disc = sfprime::heath_brown_verify(hb_k, hb_P, hb_P1, mob, man);
      bool pass = disc <= 1e-9;
      emit.emit({{"k", hb_k},
                 {"P", hb_P},
                 {"P1", hb_P1},
                 {"max_discrepancy", disc},
                 {"pass", pass}});
      if (!pass) exit_code = 1;
    } else if (*sc_scale) {
      command = "scale";
      params = {{"q", scale_q}};
      emit.emit({{"q", scale_q}, {"N", sfprime::choose_scale(scale_q)}});
    } else if (*sc_final) {
      command = "final-report";
      params = {{"q", final_qs},
                {"N", final_N},
                {"theta", final_theta},
                {"alpha", final_alpha},
                {"beta", final_beta}};
      auto alpha = sfprime::AlphaSpec::parse(final_alpha);
      alpha_id = alpha.id();
      for (uint64_t q : final_qs) {
        uint64_t N = final_N != 0 ? final_N : sfprime::choose_scale(q);
        auto config = sfprime::RunConfig::make(N, final_theta);
        auto rep = sfprime::final_bound_report(q, config, alpha, final_beta,
                                               tables.primes(N),
                                               tables.mobius(N), g.threads);
        ordered_json rec;
        for (auto& [k, v] : rep.params) rec[k] = v;
        rec["alpha"] = rep.alpha_id;
        rec["lhs"] = rep.lhs;
        rec["rhs"] = rep.rhs;
        rec["ratio"] = rep.ratio;
        emit.emit(rec);
      }
    }

    emit.flush();
    write_manifest(command, params, alpha_id, tables, g.out_path,
                   emit.digest_hex());
  } catch (const std::exception& e) {
    ordered_json err{{"error", "runtime"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return exit_code;
}
