#pragma once

#include "paravect/circuits.hpp"
#include "paravect/positional.hpp"
#include "paravect/report.hpp"
#include "paravect/rng.hpp"

#include <optional>
#include <string>

namespace paravect::lawcheck {

/// Seeded toy-model generator shared by the law suite, the CLI fixtures and
/// the tests, so committed fixtures are reproducible from their seed alone.
circuits::ToyModel randomToyModel(Index n_layers, Index heads, Index d_model, Index d_vocab,
                                  Index d_head, Index n, Rng& rng);

/// The full property suite over every module, at the config's dims, trials
/// and seed. Check names are stable; --tol overrides key off them.
Report runLawcheck(const RunConfig& config);

/// Free-monad depth sweep: monad laws, grade additivity and the
/// identity-monad factorization at every depth 0..config.depth.
Report runStack(const RunConfig& config);

/// Circuit analysis of a weight file: per-path norms, QK/OV rank statistics,
/// the path-sum residual and the parametric-composition residual.
Report runCircuitsFile(const RunConfig& config, const std::string& weights_path);

/// What the encode/factor commands build their source encodings from.
struct EncodingSpec {
    std::string kind; // "sinusoidal" | "additive" | "table"
    Index d = 0;
    double base_freq = 10000.0;
    Vector base;       // additive only
    std::string table; // table only: path to a JSON table
};

positional::Encoding buildEncoding(const EncodingSpec& spec);

/// Writes the N-row table for the requested encoding (when table_out is
/// nonempty) and reports its injectivity statistic plus, for sinusoidal
/// kinds, the additivity defect witness.
Report runEncode(const RunConfig& config, const EncodingSpec& spec, Index N,
                 const std::string& table_out);

/// Least-squares factorization of a target table through a source encoding.
Report runFactor(const RunConfig& config, const EncodingSpec& source,
                 const std::string& target_table, Index N);

} // namespace paravect::lawcheck
