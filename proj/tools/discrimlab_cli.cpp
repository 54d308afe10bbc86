// discrimlab_cli.cpp
// Command-line front end: ensemble generation and IO, single-instance
// evaluation, bound sweeps, randomized property verification, and the
// polynomial inequality certifier. Deterministic outputs for fixed flags.
//
// Exit codes: 0 success, 1 property violation, 2 input error, 3 I/O error.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "discrimlab/bounds.hpp"
#include "discrimlab/ensemble.hpp"
#include "discrimlab/io.hpp"
#include "discrimlab/pgm.hpp"
#include "discrimlab/sma.hpp"
#include "discrimlab/verify.hpp"

namespace {

using namespace discrimlab;

const char* yes_no(bool b) { return b ? "yes" : "no"; }

void write_eval_csv(const BoundReport& r, int d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "m,d,overlap,fidelity,pgm,sm,linear,refined,union_term,seq_bound,"
           "refined_ge_linear,pgm_ge_linear,pgm_ge_refined,sm_ge_seq_bound\n";
    out << r.m << ',' << d << ',' << format_real(r.overlap) << ','
        << format_real(r.fidelity) << ',' << format_real(r.pgm_exact.value()) << ','
        << format_real(r.sm_exact.value()) << ',' << format_real(r.linear) << ','
        << format_real(r.refined) << ',' << format_real(r.union_term) << ','
        << format_real(r.seq_bound.value()) << ',' << (r.refined_ge_linear ? 1 : 0) << ','
        << (r.pgm_ge_linear.value() ? 1 : 0) << ',' << (r.pgm_ge_refined.value() ? 1 : 0)
        << ',' << (r.sm_ge_seq_bound.value() ? 1 : 0) << '\n';
    if (!out.good()) throw IoError("write failed: " + path);
}

void cmd_eval(const std::string& input, const std::string& out_csv) {
    const StateEnsemble e = load_ensemble(input);
    const BoundReport r = make_bound_report(e);
    std::cout << "ensemble            : " << input << "\n";
    std::cout << "d                   : " << e.d << "\n";
    std::cout << "m                   : " << r.m << "\n";
    std::cout << "max overlap         : " << format_real(r.overlap) << "\n";
    std::cout << "max fidelity        : " << format_real(r.fidelity) << "\n";
    std::cout << "pgm worst case      : " << format_real(r.pgm_exact.value()) << "\n";
    std::cout << "sm worst case       : " << format_real(r.sm_exact.value()) << "\n";
    std::cout << "linear bound        : " << format_real(r.linear) << "\n";
    std::cout << "refined bound       : " << format_real(r.refined) << "\n";
    std::cout << "union term          : " << format_real(r.union_term) << "\n";
    std::cout << "seq lower bound     : " << format_real(r.seq_bound.value()) << "\n";
    std::cout << "refined >= linear   : " << yes_no(r.refined_ge_linear) << "\n";
    std::cout << "pgm >= linear       : " << yes_no(r.pgm_ge_linear.value()) << "\n";
    std::cout << "pgm >= refined      : " << yes_no(r.pgm_ge_refined.value()) << "\n";
    std::cout << "sm >= seq bound     : " << yes_no(r.sm_ge_seq_bound.value()) << "\n";
    if (!out_csv.empty()) {
        write_eval_csv(r, e.d, out_csv);
    }
}

void cmd_sweep(std::vector<int> m_values, int steps, double f_max,
               const std::string& out_path) {
    if (m_values.empty()) throw std::invalid_argument("sweep: need at least one m");
    for (int m : m_values) {
        if (m < 2) throw std::invalid_argument("sweep: every m must be >= 2");
    }
    if (steps < 2) throw std::invalid_argument("sweep: steps must be >= 2");
    if (!(f_max > 0.0 && f_max <= 1.0)) {
        throw std::invalid_argument("sweep: f-max must lie in (0, 1]");
    }
    std::sort(m_values.begin(), m_values.end());
    m_values.erase(std::unique(m_values.begin(), m_values.end()), m_values.end());
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open for writing: " + out_path);
    out << "m,F,linear,refined,dominance\n";
    for (int m : m_values) {
        for (int k = 1; k <= steps; ++k) {
            const double f = f_max * static_cast<double>(k) / steps;
            const double lin = linear_bound(m, f);
            const double ref = refined_bound(m, f);
            out << m << ',' << format_real(f) << ',' << format_real(lin) << ','
                << format_real(ref) << ',' << (ref > lin ? 1 : 0) << '\n';
        }
    }
    if (!out.good()) throw IoError("write failed: " + out_path);
}

int cmd_verify(const VerifySpec& spec, const std::string& counterexample_path) {
    const VerifyReport report = run_verification(spec);
    std::cout << format_verify_report(report);
    if (report.passed) return 0;
    if (report.failure && report.failure->ensemble) {
        save_ensemble(*report.failure->ensemble, counterexample_path);
        std::cout << "counterexample written to: " << counterexample_path << "\n";
    }
    return 1;
}

int cmd_appendix(double grid_step, int m_max) {
    const VerificationSummary s = certify_polynomials(grid_step, m_max);
    std::cout << "polynomial inequality verification\n";
    std::cout << "  grid step               : " << format_real(s.grid_step) << "\n";
    std::cout << "  m max                   : " << s.m_max << "\n";
    std::cout << "  cells checked           : " << s.cells_checked << "\n";
    std::cout << "  violations              : " << s.violations << "\n";
    std::cout << "  min h on grid           : " << format_real(s.min_h_value)
              << " at F=" << format_real(s.min_h_location_f)
              << ", m=" << s.min_h_location_m << "\n";
    std::cout << "  min dominance margin    : " << format_real(s.min_dominance_margin)
              << "\n";
    std::cout << "  max g=F*h rel error     : " << format_real(s.max_identity_rel_err)
              << "\n";
    std::cout << "  min dh/dm (m>4)         : " << format_real(s.min_dh_dm_value)
              << "\n";
    std::cout << "  min h(m+1)-h(m) gap     : " << format_real(s.min_monotonicity_gap)
              << "\n";
    std::cout << "  h critical point (m=4)  : F+ = " << format_real(s.h_minimum.location)
              << ", h(F+) = " << format_real(s.h_minimum.value)
              << " (local minimum)\n";
    std::cout << "  p critical point        : F+ = " << format_real(s.p_minimum.location)
              << ", p(F+) = " << format_real(s.p_minimum.value)
              << " (local minimum)\n";
    std::cout << "  m=2 dominance failures  : " << s.m2_dominance_failures
              << " (negative control, not asserted)\n";
    std::cout << "  m=3 dominance failures  : " << s.m3_dominance_failures
              << " (negative control, not asserted)\n";
    std::cout << "  result                  : " << (s.passed ? "PASS" : "FAIL") << "\n";
    if (!s.passed) {
        std::cout << "  first violation         : " << s.first_violation << "\n";
    }
    return s.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"worst-case pure-state discrimination workbench"};
    app.require_subcommand(1);
    int exit_code = 0;

    // ---- gen ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate an ensemble file");
    gen->require_subcommand(1);

    int haar_d = 4, haar_m = 4;
    std::uint64_t haar_seed = 1;
    std::string haar_out;
    auto* gen_haar = gen->add_subcommand("haar", "independent Haar-random states");
    gen_haar->add_option("--d", haar_d, "dimension")->required();
    gen_haar->add_option("--m", haar_m, "number of states")->required();
    gen_haar->add_option("--seed", haar_seed, "RNG seed (default 1)");
    gen_haar->add_option("--out", haar_out, "output ensemble file")->required();
    gen_haar->callback([&] { save_ensemble(haar_random(haar_d, haar_m, haar_seed), haar_out); });

    int eq_m = 3;
    double eq_c = 0.0;
    std::string eq_out;
    auto* gen_eq = gen->add_subcommand("equal-overlap",
                                       "all pairwise overlaps equal to c");
    gen_eq->add_option("--m", eq_m, "number of states")->required();
    gen_eq->add_option("--c", eq_c, "common overlap, in [0, 1)")->required();
    gen_eq->add_option("--out", eq_out, "output ensemble file")->required();
    gen_eq->callback([&] { save_ensemble(equal_overlap_ensemble(eq_m, eq_c), eq_out); });

    std::string gram_path, gram_out;
    int gram_target_dim = -1;
    auto* gen_gram = gen->add_subcommand("from-gram",
                                         "factorize a PSD unit-diagonal Gram matrix");
    gen_gram->add_option("--gram", gram_path, "JSON file with the Gram matrix")->required();
    gen_gram->add_option("--target-dim", gram_target_dim,
                         "embed in this dimension (default: rank)");
    gen_gram->add_option("--out", gram_out, "output ensemble file")->required();
    gen_gram->callback([&] {
        std::optional<int> target;
        if (gram_target_dim >= 0) target = gram_target_dim;
        save_ensemble(from_gram(load_gram(gram_path), target), gram_out);
    });

    // ---- eval --------------------------------------------------------------
    std::string eval_in, eval_out;
    auto* eval = app.add_subcommand("eval",
                                    "exact success probabilities and bounds for one ensemble");
    eval->add_option("input", eval_in, "ensemble file")->required();
    eval->add_option("--out", eval_out, "also write a one-row CSV here");
    eval->callback([&] { cmd_eval(eval_in, eval_out); });

    // ---- sweep -------------------------------------------------------------
    std::vector<int> sweep_m{2, 4, 8, 16};
    int sweep_steps = 100;
    double sweep_fmax = 1.0;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep",
                                     "linear vs refined bound on an F grid, as CSV");
    sweep->add_option("--m", sweep_m, "state counts, comma separated (default 2,4,8,16)")
        ->delimiter(',');
    sweep->add_option("--steps", sweep_steps, "grid points per m (default 100)");
    sweep->add_option("--f-max", sweep_fmax, "largest overlap on the grid (default 1)");
    sweep->add_option("--out", sweep_out, "output CSV")->required();
    sweep->callback([&] { cmd_sweep(sweep_m, sweep_steps, sweep_fmax, sweep_out); });

    // ---- verify ------------------------------------------------------------
    VerifySpec vspec;
    std::string verify_out = "counterexample.json";
    auto* verify = app.add_subcommand("verify",
                                      "randomized property suite over Haar ensembles");
    verify->add_option("--trials", vspec.trials, "number of random ensembles (default 1000)");
    verify->add_option("--seed", vspec.seed, "RNG seed (default 1)");
    verify->add_option("--tol", vspec.tolerance, "tolerance for every check (default 1e-9)");
    verify->add_option("--d-min", vspec.d_min, "smallest dimension (default 2)");
    verify->add_option("--d-max", vspec.d_max, "largest dimension (default 16)");
    verify->add_option("--m-min", vspec.m_min, "smallest state count (default 2)");
    verify->add_option("--m-max", vspec.m_max, "largest state count (default 8)");
    verify->add_option("--low-overlap-min", vspec.low_overlap_min_accepted,
                       "minimum low-fidelity ensembles for the sequential bound (default 0)");
    verify->add_option("--out", verify_out,
                       "counterexample file on failure (default counterexample.json)");
    verify->callback([&] { exit_code = cmd_verify(vspec, verify_out); });

    // ---- appendix ----------------------------------------------------------
    double grid_step = 1e-3;
    int appendix_m_max = 64;
    auto* appendix = app.add_subcommand("appendix",
                                        "certify the polynomial inequality family");
    appendix->add_option("--grid-step", grid_step, "F grid step, in (0, 0.01] (default 1e-3)");
    appendix->add_option("--m-max", appendix_m_max, "largest m on the grid (default 64)");
    appendix->callback([&] { exit_code = cmd_appendix(grid_step, appendix_m_max); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the parser diagnostic
        return 2;
    } catch (const IoError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    } catch (const FormatError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::out_of_range& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return exit_code;
}
