#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jsdd/channel.hpp"
#include "jsdd/opt_sum.hpp"
#include "jsdd/ostbc.hpp"

namespace jsdd {

enum class PrecoderSource {
  Sca,
  Sdr,
  HighSnr,
  LowSnr,
  NoCsi,
  SumAverage,
  SumMinMax,
  JsdmBaseline,
};

enum class PowerSplit { Uniform, Optimized };
enum class BasisKind { Dft, Evd };
enum class SweepAxis { Power, Users, Antennas, Corr };

/// Declarative description of one Monte-Carlo experiment. Power is in dBm
/// against the noise variance given in linear (mW) units, so noise_var = 1
/// places the noise floor at 0 dBm.
struct Scenario {
  int num_antennas = 64;
  std::vector<UserGeometry> users;
  std::vector<double> corr;        // one per user
  std::string constellation = "qpsk";
  std::vector<std::string> codes;  // one entry, or one per user (equal T)
  PrecoderSource precoder_source = PrecoderSource::Sca;
  double power_dbm = 0.0;
  double noise_var = 1.0;
  PowerSplit power_split = PowerSplit::Uniform;
  BasisKind basis = BasisKind::Dft;
  int trials = 100;            // codeword frames per coherence block
  int coherence_blocks = 50;   // independent channel draws
  std::uint64_t seed = 1;
  int quad_nodes = 0;          // 0 = auto
  double eigen_rel_tol = 1e-3;
  int jsdm_group_size = 1;     // only for the JSDM baseline
};

struct BerResult {
  std::vector<double> per_user_ber;
  double aggregate_ber = 0.0;
  std::uint64_t bits_sent = 0;
  std::uint64_t bit_errors = 0;
  std::vector<std::uint64_t> per_user_bits;
  std::vector<std::uint64_t> per_user_errors;
};

double dbm_to_mw(double dbm);

/// Mean azimuths evenly spaced within [-60, 60] degrees.
std::vector<UserGeometry> evenly_spaced_users(int count, double spread_deg);

/// Full transmit/receive chain Monte Carlo. Deterministic in the scenario
/// (including seed) regardless of thread count.
BerResult run_ber(const Scenario& scn, int threads = 1);

/// Simplified JSDM comparison baseline: per group, group_size users served
/// by linear precoding from the channel estimates (matched filter for 1,
/// regularized zero-forcing for 2), uncoded symbols, true channels at the
/// receivers.
BerResult run_jsdm_baseline(const Scenario& scn, int group_size, int threads = 1);

struct SweepPoint {
  double value = 0.0;
  BerResult result;
  bool ok = false;
  std::string error;
};

/// Runs run_ber per axis value with per-value derived seeds; failures are
/// recorded and the sweep continues.
std::vector<SweepPoint> sweep(const Scenario& scn, SweepAxis axis,
                              const std::vector<double>& values, int threads = 1);

// ---- lower-level engine (also used to inject synthetic statistics) --------

struct LinkUser {
  Eigen::VectorXd lam;  // effective-channel eigenvalues, non-increasing
  double corr = 0.0;
  OstbcCode code;
  Constellation constel;
  double alpha = 0.0;  // individual power cap
};

struct LinkSetup {
  std::vector<LinkUser> users;
  // Cross-Gram matrices U_k^H U_m (row-scanned k*K + m); empty when the
  // pre-beamformers are exactly orthogonal and interference vanishes.
  std::vector<Eigen::MatrixXcd> gram;
  double noise_var = 1.0;
  double rho = 0.0;
  PrecoderSource source = PrecoderSource::NoCsi;
  double total_power = 0.0;
  std::vector<double> weights;  // L_k / T
  int n_slots = 0;              // shared T
  int trials = 100;
  int coherence_blocks = 50;
  std::uint64_t seed = 1;
};

LinkSetup build_setup(const Scenario& scn);
BerResult run_link(const LinkSetup& setup, int threads = 1);

}  // namespace jsdd
