#include "lirr/lirr.h"

#include "lirr/harness.hpp"

#include <cstring>
#include <new>

struct lirr_experiment {
  lirr::ExperimentConfig config;
  std::string summary;
};

struct lirr_cocycle {
  lirr::Cocycle cocycle;
};

namespace {

thread_local std::string last_error;

lirr_status status_of(lirr::ErrorCode code) {
  switch (code) {
    case lirr::ErrorCode::Config: return LIRR_ERR_CONFIG;
    case lirr::ErrorCode::Precondition: return LIRR_ERR_PRECONDITION;
    case lirr::ErrorCode::Range: return LIRR_ERR_RANGE;
    case lirr::ErrorCode::Overlap: return LIRR_ERR_OVERLAP;
    case lirr::ErrorCode::Numerical: return LIRR_ERR_NUMERICAL;
    case lirr::ErrorCode::Io: return LIRR_ERR_IO;
  }
  return LIRR_ERR_INTERNAL;
}

template <class F>
lirr_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return LIRR_OK;
  } catch (const lirr::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::overflow_error& e) {
    last_error = std::string("index overflow: ") + e.what();
    return LIRR_ERR_RANGE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return LIRR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LIRR_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return LIRR_ERR_INTERNAL;
  }
}

lirr_status null_arg(const char* name) {
  last_error = std::string("null argument: ") + name;
  return LIRR_ERR_PRECONDITION;
}

lirr::Word to_word(const int* word, size_t length, int alphabet_size) {
  if (length == 0) throw lirr::Error(lirr::ErrorCode::Precondition, "empty word");
  std::vector<lirr::Symbol> symbols;
  for (size_t i = 0; i < length; ++i) {
    if (word[i] < 0 || word[i] >= alphabet_size) throw lirr::Error(lirr::ErrorCode::Range, "symbol outside the alphabet");
    symbols.push_back(static_cast<lirr::Symbol>(word[i]));
  }
  return lirr::Word(std::move(symbols));
}

}  // namespace

extern "C" {

const char* lirr_version(void) { return "0.1.0"; }

const char* lirr_last_error(void) { return last_error.c_str(); }

const char* lirr_status_name(lirr_status status) {
  switch (status) {
    case LIRR_OK: return "ok";
    case LIRR_ERR_CONFIG: return "config";
    case LIRR_ERR_PRECONDITION: return "precondition";
    case LIRR_ERR_RANGE: return "range";
    case LIRR_ERR_OVERLAP: return "overlap";
    case LIRR_ERR_NUMERICAL: return "numerical";
    case LIRR_ERR_IO: return "io";
    case LIRR_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

lirr_status lirr_experiment_load(const char* path, lirr_experiment** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new lirr_experiment{lirr::load_config(path), {}}; });
}

lirr_status lirr_experiment_parse(const char* json_text, lirr_experiment** out) {
  if (!json_text) return null_arg("json_text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new lirr_experiment{lirr::parse_config(json_text), {}}; });
}

void lirr_experiment_free(lirr_experiment* e) { delete e; }

lirr_status lirr_experiment_set_output_dir(lirr_experiment* e, const char* dir) {
  if (!e) return null_arg("experiment");
  if (!dir || !*dir) return null_arg("dir");
  e->config.output_dir = dir;
  return LIRR_OK;
}

lirr_status lirr_experiment_set_stages(lirr_experiment* e, int stages) {
  if (!e) return null_arg("experiment");
  if (stages < 1) {
    last_error = "stages must be >= 1";
    return LIRR_ERR_CONFIG;
  }
  e->config.stages = stages;
  return LIRR_OK;
}

lirr_status lirr_experiment_set_seed(lirr_experiment* e, uint64_t seed) {
  if (!e) return null_arg("experiment");
  e->config.seed = seed;
  return LIRR_OK;
}

lirr_status lirr_experiment_set_parallel(lirr_experiment* e, int parallel) {
  if (!e) return null_arg("experiment");
  e->config.parallel = parallel != 0;
  return LIRR_OK;
}

lirr_status lirr_experiment_run(lirr_experiment* e, const char* command, int* exit_code) {
  if (!e) return null_arg("experiment");
  if (!command) return null_arg("command");
  if (exit_code) *exit_code = 1;
  return guarded([&] {
    const lirr::Command cmd = lirr::parse_command(command);
    const lirr::Experiment experiment(e->config);
    const lirr::RunResult r = experiment.run(cmd);
    e->summary = r.summary_json;
    if (exit_code) *exit_code = r.exit_code;
  });
}

lirr_status lirr_experiment_summary(const lirr_experiment* e, char* buf, size_t size, size_t* needed) {
  if (!e) return null_arg("experiment");
  const size_t n = e->summary.size() + 1;
  if (needed) *needed = n;
  if (!buf) return LIRR_OK;
  if (size < n) {
    last_error = "summary buffer too small";
    return LIRR_ERR_RANGE;
  }
  std::memcpy(buf, e->summary.c_str(), n);
  return LIRR_OK;
}

lirr_status lirr_cocycle_create(int alphabet_size, int dimension, int window_radius, const double* matrices,
                                size_t count, lirr_cocycle** out) {
  if (!matrices) return null_arg("matrices");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    if (alphabet_size < 1 || dimension < 1 || window_radius < 0)
      throw lirr::Error(lirr::ErrorCode::Config, "alphabet, dimension and window radius must be positive");
    const size_t block = static_cast<size_t>(dimension) * dimension;
    if (count % block != 0) throw lirr::Error(lirr::ErrorCode::Config, "matrix data is not a whole number of blocks");
    std::vector<lirr::Matrix> table;
    for (size_t k = 0; k < count / block; ++k) {
      lirr::Matrix m(dimension, dimension);
      for (int r = 0; r < dimension; ++r)
        for (int c = 0; c < dimension; ++c) m(r, c) = matrices[k * block + r * dimension + c];
      table.push_back(m);
    }
    *out = new lirr_cocycle{lirr::Cocycle(alphabet_size, dimension, window_radius, std::move(table))};
  });
}

void lirr_cocycle_free(lirr_cocycle* c) { delete c; }

lirr_status lirr_cocycle_bound(const lirr_cocycle* c, double* out) {
  if (!c) return null_arg("cocycle");
  if (!out) return null_arg("out");
  *out = c->cocycle.bound_c();
  return LIRR_OK;
}

lirr_status lirr_cocycle_dimension(const lirr_cocycle* c, int* out) {
  if (!c) return null_arg("cocycle");
  if (!out) return null_arg("out");
  *out = c->cocycle.dimension();
  return LIRR_OK;
}

lirr_status lirr_periodic_spectrum(const lirr_cocycle* c, const int* word, size_t length, double* out) {
  if (!c) return null_arg("cocycle");
  if (!word) return null_arg("word");
  if (!out) return null_arg("out");
  return guarded([&] {
    const lirr::PeriodicMeasure mu(to_word(word, length, c->cocycle.alphabet_size()), true);
    const auto values = lirr::exact_spectrum(c->cocycle, mu).expanded_descending();
    std::copy(values.begin(), values.end(), out);
  });
}

lirr_status lirr_finite_time_mle(const lirr_cocycle* c, const int* word, size_t length, const char* n, double* out) {
  if (!c) return null_arg("cocycle");
  if (!word) return null_arg("word");
  if (!n) return null_arg("n");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto x = lirr::SymbolSequence::periodic(to_word(word, length, c->cocycle.alphabet_size()));
    *out = lirr::finite_time_mle(c->cocycle, x, lirr::parse_index(n));
  });
}

lirr_status lirr_exterior_power(const lirr_cocycle* c, int degree, lirr_cocycle** out) {
  if (!c) return null_arg("cocycle");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new lirr_cocycle{lirr::exterior_power(c->cocycle, degree)}; });
}

}  // extern "C"
