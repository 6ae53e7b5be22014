#include "jsdd/simlink.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "jsdd/kern.hpp"
#include "jsdd/opt_individual.hpp"

namespace jsdd {

namespace {

constexpr std::uint64_t kBlockTag = 0xb10cull;
constexpr std::uint64_t kJsdmTag = 0x15d3ull;

struct Counts {
  std::vector<std::uint64_t> bits, errors;
};

int pick_symbol(RngStream& rng, int n_points) {
  const int idx = static_cast<int>(rng.u01() * n_points);
  return std::min(idx, n_points - 1);
}

void validate_scenario(const Scenario& scn) {
  if (scn.users.empty()) throw std::invalid_argument("scenario needs at least one user");
  if (scn.corr.size() != scn.users.size()) {
    throw std::invalid_argument("scenario needs one correlation per user");
  }
  for (double xi : scn.corr) {
    if (!(xi >= 0.0 && xi < 1.0)) {
      throw std::invalid_argument("correlation must lie in [0, 1)");
    }
  }
  if (scn.codes.empty()) throw std::invalid_argument("scenario needs a code choice");
  if (scn.codes.size() != 1 && scn.codes.size() != scn.users.size()) {
    throw std::invalid_argument("code list must have one entry or one per user");
  }
  if (scn.trials < 1 || scn.coherence_blocks < 1) {
    throw std::invalid_argument("trials and coherence blocks must be >= 1");
  }
  if (!(scn.noise_var > 0.0)) throw std::invalid_argument("noise variance must be positive");
  const bool sum_source = scn.precoder_source == PrecoderSource::SumAverage ||
                          scn.precoder_source == PrecoderSource::SumMinMax;
  if (sum_source != (scn.power_split == PowerSplit::Optimized)) {
    throw std::invalid_argument(
        "power_split=optimized requires a sum-power precoder source and vice versa");
  }
}

// Per-block worker state: draws channels, solves precoders, runs frames.
void run_block(const LinkSetup& setup, std::uint64_t block, Counts& acc) {
  const int k_users = static_cast<int>(setup.users.size());
  RngStream rng = RngStream::derive(setup.seed, kBlockTag, block);

  std::vector<EffectiveChannelPair> pairs(k_users);
  for (int k = 0; k < k_users; ++k) {
    pairs[k] = draw_effective_pair(setup.users[k].lam, setup.users[k].corr, rng);
  }

  std::vector<PepProblem> problems(k_users);
  for (int k = 0; k < k_users; ++k) {
    const LinkUser& u = setup.users[k];
    if (u.code.n_streams > u.lam.size()) {
      throw std::invalid_argument("code order exceeds effective channel rank");
    }
    if (setup.source == PrecoderSource::NoCsi) {
      EffectiveChannelPair blind = pairs[k];
      blind.corr = 0.0;
      blind.est_ch.setZero();
      problems[k] = build_problem(u.lam, blind, setup.rho, u.alpha, u.code.n_streams);
    } else {
      problems[k] = build_problem(u.lam, pairs[k], setup.rho, u.alpha, u.code.n_streams);
    }
  }

  std::vector<Eigen::MatrixXcd> precoders(k_users);
  switch (setup.source) {
    case PrecoderSource::NoCsi:
      for (int k = 0; k < k_users; ++k) precoders[k] = waterfill_no_csi(problems[k]).m;
      break;
    case PrecoderSource::HighSnr:
      for (int k = 0; k < k_users; ++k) precoders[k] = waterfill_high_snr(problems[k]).m;
      break;
    case PrecoderSource::LowSnr:
      for (int k = 0; k < k_users; ++k) {
        precoders[k] = solve_low_snr(problems[k], pairs[k].est_ch, pairs[k].corr,
                                     setup.users[k].lam)
                           .m;
      }
      break;
    case PrecoderSource::Sca:
      for (int k = 0; k < k_users; ++k) {
        const std::uint64_t init =
            RngStream::split_mix(setup.seed + 0x1000ull * block + static_cast<std::uint64_t>(k));
        precoders[k] = solve_sca(problems[k], init).precoder.m;
      }
      break;
    case PrecoderSource::Sdr:
      for (int k = 0; k < k_users; ++k) {
        const SdrResult sdr = solve_sdr(problems[k]);
        precoders[k] = extract_or_randomize(problems[k], sdr.omega, SolverOptions{}, rng).m;
      }
      break;
    case PrecoderSource::SumAverage:
    case PrecoderSource::SumMinMax: {
      SumProblem sp;
      sp.users = problems;
      sp.weights = setup.weights;
      sp.total_power = setup.total_power;
      sp.criterion = (setup.source == PrecoderSource::SumAverage) ? SumCriterion::Average
                                                                  : SumCriterion::MinMax;
      const SumSolution sol = solve_sum(sp);
      for (int k = 0; k < k_users; ++k) precoders[k] = sol.precoders[k].m;
      break;
    }
    case PrecoderSource::JsdmBaseline:
      throw std::invalid_argument("JSDM baseline runs through run_jsdm_baseline");
  }

  // Effective rows and per-symbol matched-filter rows are fixed per block.
  const bool interference = !setup.gram.empty();
  std::vector<Eigen::RowVectorXcd> eff(k_users);
  std::vector<double> gain(k_users);
  std::vector<std::vector<Eigen::RowVectorXcd>> mf_phi(k_users), mf_psi(k_users);
  std::vector<std::vector<Eigen::VectorXcd>> itf(k_users);  // conj rows vs other users
  std::vector<Eigen::VectorXcd> eff_conj(k_users);
  for (int k = 0; k < k_users; ++k) {
    const LinkUser& u = setup.users[k];
    eff[k] = pairs[k].true_ch.adjoint() * precoders[k];
    gain[k] = kern::norm_sq(eff[k].data(), eff[k].size());
    eff_conj[k] = eff[k].conjugate().transpose();
    mf_phi[k].resize(u.code.n_symbols);
    mf_psi[k].resize(u.code.n_symbols);
    for (int i = 0; i < u.code.n_symbols; ++i) {
      mf_phi[k][i] = eff[k] * u.code.phi[i].cast<double>().cast<cd>();
      mf_psi[k][i] = eff[k] * u.code.psi[i].cast<double>().cast<cd>();
    }
    if (interference) {
      itf[k].resize(k_users);
      for (int m = 0; m < k_users; ++m) {
        if (m == k) continue;
        const Eigen::RowVectorXcd row =
            pairs[k].true_ch.adjoint() * setup.gram[k * k_users + m] * precoders[m];
        itf[k][m] = row.conjugate().transpose();
      }
    }
  }

  const double noise_sd = std::sqrt(setup.noise_var);
  std::vector<Eigen::VectorXcd> symbols(k_users);
  std::vector<std::vector<int>> tx_idx(k_users);
  std::vector<Eigen::MatrixXcd> codewords(k_users);
  Eigen::RowVectorXcd received(setup.n_slots);

  for (int frame = 0; frame < setup.trials; ++frame) {
    for (int k = 0; k < k_users; ++k) {
      const LinkUser& u = setup.users[k];
      const int n_points = static_cast<int>(u.constel.points.size());
      tx_idx[k].resize(u.code.n_symbols);
      symbols[k].resize(u.code.n_symbols);
      for (int i = 0; i < u.code.n_symbols; ++i) {
        tx_idx[k][i] = pick_symbol(rng, n_points);
        symbols[k](i) = u.constel.points[tx_idx[k][i]];
      }
      codewords[k] = encode(u.code, symbols[k]);
    }

    for (int k = 0; k < k_users; ++k) {
      const LinkUser& u = setup.users[k];
      for (int t = 0; t < setup.n_slots; ++t) {
        cd y = kern::cdot(eff_conj[k].data(), codewords[k].col(t).data(),
                          codewords[k].rows());
        if (interference) {
          for (int m = 0; m < k_users; ++m) {
            if (m == k) continue;
            y += kern::cdot(itf[k][m].data(), codewords[m].col(t).data(),
                            codewords[m].rows());
          }
        }
        received(t) = y + noise_sd * rng.cgauss();
      }

      // Symbol-by-symbol matched filter, same statistic as ml_decode but with
      // the per-block rows precomputed.
      for (int i = 0; i < u.code.n_symbols; ++i) {
        int decision = 0;
        if (gain[k] > 0.0) {
          const cd zr = kern::cdot(mf_phi[k][i].data(), received.data(), setup.n_slots);
          const cd zi = kern::cdot(mf_psi[k][i].data(), received.data(), setup.n_slots);
          decision = u.constel.nearest(cd{zr.real() / gain[k], zi.imag() / gain[k]});
        }
        acc.bits[k] += u.constel.bits_per_symbol;
        acc.errors[k] +=
            hamming_distance(u.constel.labels[tx_idx[k][i]], u.constel.labels[decision]);
      }
    }
  }
}

BerResult reduce_counts(const std::vector<Counts>& parts, int k_users) {
  BerResult out;
  out.per_user_bits.assign(k_users, 0);
  out.per_user_errors.assign(k_users, 0);
  for (const Counts& c : parts) {
    for (int k = 0; k < k_users; ++k) {
      out.per_user_bits[k] += c.bits[k];
      out.per_user_errors[k] += c.errors[k];
    }
  }
  out.per_user_ber.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    out.bits_sent += out.per_user_bits[k];
    out.bit_errors += out.per_user_errors[k];
    out.per_user_ber[k] =
        out.per_user_bits[k] ? static_cast<double>(out.per_user_errors[k]) /
                                   static_cast<double>(out.per_user_bits[k])
                             : 0.0;
  }
  out.aggregate_ber =
      out.bits_sent ? static_cast<double>(out.bit_errors) / static_cast<double>(out.bits_sent)
                    : 0.0;
  return out;
}

template <typename BlockFn>
BerResult run_blocks(int n_blocks, int k_users, int threads, BlockFn&& fn) {
  threads = std::max(1, std::min(threads, n_blocks));
  std::vector<Counts> parts(threads);
  for (Counts& c : parts) {
    c.bits.assign(k_users, 0);
    c.errors.assign(k_users, 0);
  }
  if (threads == 1) {
    for (int b = 0; b < n_blocks; ++b) fn(b, parts[0]);
    return reduce_counts(parts, k_users);
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int b = w; b < n_blocks; b += threads) fn(b, parts[w]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return reduce_counts(parts, k_users);
}

}  // namespace

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

std::vector<UserGeometry> evenly_spaced_users(int count, double spread_deg) {
  if (count < 1) throw std::invalid_argument("need at least one user");
  std::vector<UserGeometry> users(count);
  for (int k = 0; k < count; ++k) {
    const double angle =
        (count == 1) ? 0.0 : -60.0 + 120.0 * static_cast<double>(k) / (count - 1);
    users[k] = UserGeometry{angle, spread_deg};
  }
  return users;
}

LinkSetup build_setup(const Scenario& scn) {
  validate_scenario(scn);
  const int k_users = static_cast<int>(scn.users.size());
  const Constellation constel = constellation_by_name(scn.constellation);

  LinkSetup setup;
  setup.noise_var = scn.noise_var;
  setup.rho = rho_min(constel, scn.noise_var);
  setup.source = scn.precoder_source;
  setup.total_power = dbm_to_mw(scn.power_dbm);
  setup.seed = scn.seed;
  setup.trials = scn.trials;
  setup.coherence_blocks = scn.coherence_blocks;

  std::vector<OstbcCode> codes(k_users);
  for (int k = 0; k < k_users; ++k) {
    codes[k] = code_by_name(scn.codes.size() == 1 ? scn.codes[0] : scn.codes[k]);
  }
  setup.n_slots = codes[0].n_slots;
  for (const auto& c : codes) {
    if (c.n_slots != setup.n_slots) {
      throw std::invalid_argument("all users must share the same codeword length T");
    }
  }

  std::vector<Eigen::MatrixXcd> bases(k_users);
  std::vector<DftSelection> selections;
  for (int k = 0; k < k_users; ++k) {
    const Eigen::MatrixXcd cov =
        toeplitz_covariance(scn.users[k], scn.num_antennas, scn.quad_nodes);
    LinkUser user;
    user.corr = scn.corr[k];
    user.code = codes[k];
    user.constel = constel;
    if (scn.basis == BasisKind::Evd) {
      const ChannelStats stats = eigen_truncate(cov, scn.eigen_rel_tol);
      user.lam = stats.eigvals;
      bases[k] = stats.eigvecs;
    } else {
      DftSelection sel = dft_select(scn.users[k], scn.num_antennas);
      // Project the covariance onto the selected columns and keep the
      // diagonal as the effective eigenvalues, sorted with the basis.
      const Eigen::VectorXd diag = (sel.basis.adjoint() * cov * sel.basis).diagonal().real();
      std::vector<int> order(diag.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return diag(a) > diag(b); });
      user.lam.resize(diag.size());
      Eigen::MatrixXcd sorted_basis(sel.basis.rows(), sel.basis.cols());
      std::vector<int> sorted_idx(sel.indices.size());
      for (std::size_t i = 0; i < order.size(); ++i) {
        user.lam(static_cast<int>(i)) = diag(order[i]);
        sorted_basis.col(static_cast<int>(i)) = sel.basis.col(order[i]);
        sorted_idx[i] = sel.indices[order[i]];
      }
      sel.basis = sorted_basis;
      sel.indices = sorted_idx;
      bases[k] = sel.basis;
      selections.push_back(sel);
    }
    const double per_user_power = setup.total_power / k_users;
    user.alpha = codes[k].n_slots * per_user_power / codes[k].n_symbols;
    setup.users.push_back(std::move(user));
    setup.weights.push_back(static_cast<double>(codes[k].n_symbols) / codes[k].n_slots);
  }

  if (scn.basis == BasisKind::Dft) {
    ensure_disjoint(selections);  // interference vanishes by construction
  } else if (k_users > 1) {
    setup.gram.resize(k_users * k_users);
    for (int k = 0; k < k_users; ++k) {
      for (int m = 0; m < k_users; ++m) {
        if (m != k) setup.gram[k * k_users + m] = bases[k].adjoint() * bases[m];
      }
    }
  }
  return setup;
}

BerResult run_link(const LinkSetup& setup, int threads) {
  const int k_users = static_cast<int>(setup.users.size());
  return run_blocks(setup.coherence_blocks, k_users, threads,
                    [&](int block, Counts& acc) {
                      run_block(setup, static_cast<std::uint64_t>(block), acc);
                    });
}

BerResult run_ber(const Scenario& scn, int threads) {
  if (scn.precoder_source == PrecoderSource::JsdmBaseline) {
    return run_jsdm_baseline(scn, scn.jsdm_group_size, threads);
  }
  return run_link(build_setup(scn), threads);
}

BerResult run_jsdm_baseline(const Scenario& scn, int group_size, int threads) {
  if (group_size != 1 && group_size != 2) {
    throw std::invalid_argument("JSDM baseline supports group sizes 1 and 2");
  }
  if (scn.basis != BasisKind::Dft) {
    throw std::invalid_argument("JSDM baseline assumes the DFT pre-beamformer");
  }
  Scenario scn_jsdm = scn;
  scn_jsdm.precoder_source = PrecoderSource::NoCsi;  // setup only; no OSTBC solver used
  scn_jsdm.power_split = PowerSplit::Uniform;
  const LinkSetup setup = build_setup(scn_jsdm);
  const int k_groups = static_cast<int>(setup.users.size());
  const int j = group_size;
  const Constellation constel = constellation_by_name(scn.constellation);
  const double noise_sd = std::sqrt(scn.noise_var);
  const double group_power = setup.total_power / k_groups;
  const int n_points = static_cast<int>(constel.points.size());

  return run_blocks(
      scn.coherence_blocks, k_groups, threads, [&](int block, Counts& acc) {
        RngStream rng = RngStream::derive(scn.seed, kJsdmTag, block);
        for (int g = 0; g < k_groups; ++g) {
          const Eigen::VectorXd& lam = setup.users[g].lam;
          const int r = static_cast<int>(lam.size());
          Eigen::MatrixXcd est(r, j), truth(r, j);
          for (int u = 0; u < j; ++u) {
            const EffectiveChannelPair pair =
                draw_effective_pair(lam, scn.corr[g], rng);
            est.col(u) = pair.est_ch;
            truth.col(u) = pair.true_ch;
          }

          Eigen::MatrixXcd w(r, j);
          if (j == 1) {
            const double nrm = est.col(0).norm();
            if (nrm > 0.0) {
              w.col(0) = est.col(0) / nrm;
            } else {
              w.col(0).setZero();
              w(0, 0) = 1.0;
            }
          } else {
            // Zero-forcing on the stacked estimates, regularized against
            // singular stacks.
            const Eigen::MatrixXcd gram =
                est.adjoint() * est + 1e-6 * Eigen::MatrixXcd::Identity(j, j);
            w = est * gram.inverse();
            for (int u = 0; u < j; ++u) {
              const double nrm = w.col(u).norm();
              if (nrm > 0.0) w.col(u) /= nrm;
            }
          }
          w *= std::sqrt(group_power / j);

          const Eigen::MatrixXcd gains = truth.adjoint() * w;  // (user, stream)
          for (int trial = 0; trial < scn.trials; ++trial) {
            std::vector<int> tx(j);
            Eigen::VectorXcd s(j);
            for (int u = 0; u < j; ++u) {
              tx[u] = pick_symbol(rng, n_points);
              s(u) = constel.points[tx[u]];
            }
            for (int u = 0; u < j; ++u) {
              const cd y = (gains.row(u) * s)(0) + noise_sd * rng.cgauss();
              int decision = 0;
              if (std::abs(gains(u, u)) > 0.0) {
                decision = constel.nearest(y / gains(u, u));
              }
              acc.bits[g] += constel.bits_per_symbol;
              acc.errors[g] += hamming_distance(constel.labels[tx[u]],
                                                constel.labels[decision]);
            }
          }
        }
      });
}

std::vector<SweepPoint> sweep(const Scenario& scn, SweepAxis axis,
                              const std::vector<double>& values, int threads) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    SweepPoint point;
    point.value = values[i];
    Scenario s = scn;
    s.seed = scn.seed + static_cast<std::uint64_t>(i);
    try {
      switch (axis) {
        case SweepAxis::Power:
          s.power_dbm = values[i];
          break;
        case SweepAxis::Users: {
          const int k = static_cast<int>(values[i]);
          if (k < 1) throw std::invalid_argument("user count must be >= 1");
          const double spread = scn.users.empty() ? 5.0 : scn.users[0].spread_deg;
          s.users = evenly_spaced_users(k, spread);
          s.corr.assign(k, scn.corr.empty() ? 0.8 : scn.corr[0]);
          if (scn.codes.size() > 1) s.codes.assign(k, scn.codes[0]);
          break;
        }
        case SweepAxis::Antennas:
          s.num_antennas = static_cast<int>(values[i]);
          break;
        case SweepAxis::Corr:
          s.corr.assign(scn.users.size(), values[i]);
          break;
      }
      point.result = run_ber(s, threads);
      point.ok = true;
    } catch (const std::exception& e) {
      point.ok = false;
      point.error = e.what();
    }
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace jsdd
