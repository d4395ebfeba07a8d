#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "clockdil/harness/config.hpp"
#include "clockdil/harness/report.hpp"
#include "clockdil/schrodingerisation.hpp"

namespace clockdil::harness {

ExperimentReport run_experiment(const ExperimentConfig& config);

// Building blocks shared with the acceptance runner.
Matrix two_level_h();  // sigma_x/2 + sigma_y/3 + sigma_z/4
Vector plus_state();
Matrix pauli_z();

struct OpenOdeModel {
  Matrix m1, m2;
  Vector u0;
  OpenOdeModel();
  Generator generator(double a, const TimeFunction& g) const;
  // Commuting closed form with g_area = int_0^t g.
  Vector exact(double a, double g_area) const;
};

struct FpPreset {
  std::string g, beta;
};
FpPreset fp_preset(int fp_case);

std::vector<double> uniform_times(double t_final, std::size_t points);  // includes 0 and T
ClockSpec make_clock(const Numerics& n, double t_final, double omega);
ClockState make_clock_state(ClockKind kind, ProfileKind profile, double omega);
PipelineConfig make_pipeline(const Numerics& n, double t_final, double omega, bool with_eta);
std::size_t qubit_count(const std::vector<std::size_t>& dims);

// Runs f(0..count-1) on a bounded pool, results in index order; the first exception is rethrown.
template <class R>
std::vector<R> parallel_map(std::size_t count, std::size_t workers, const std::function<R(std::size_t)>& f);

}  // namespace clockdil::harness

#include <boost/asio/post.hpp>
#include <boost/asio/thread_pool.hpp>
#include <thread>

namespace clockdil::harness {

template <class R>
std::vector<R> parallel_map(std::size_t count, std::size_t workers, const std::function<R(std::size_t)>& f) {
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errors(count);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  boost::asio::thread_pool pool(workers);
  for (std::size_t i = 0; i < count; ++i)
    boost::asio::post(pool, [&, i] {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  pool.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace clockdil::harness
