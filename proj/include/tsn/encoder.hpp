#pragma once

// Translation of an Instance into a ConstraintIR.
//
// Decision variables per egress port: open/close of every window k in
// [1, wmax] and one assignment flag eps_k(f) per frame instance f on the port.
// Flags are Bool in linearized mode and 0/1 Int in nonlinear mode, where the
// constraints keep their flag-times-term product form. Linearized mode turns
// every product into a guarded implication or an if-then-else selector, which
// keeps the whole system in linear integer arithmetic.
//
// Repetition j of a stream on a link with n = hp_link / T instances is served
// by instance j mod n, shifted by (j - j mod n) * T. Hops with different port
// hyperperiods are related through this mapping.

#include <map>
#include <string>
#include <vector>

#include "tsn/config.hpp"
#include "tsn/ir.hpp"
#include "tsn/netmodel.hpp"
#include "tsn/schedule.hpp"

namespace tsn {

/// Declares window and assignment variables for every port.
ConstraintIR declare_schedule(const Instance& instance, const EncoderConfig& config);

void encode_well_defined(ConstraintIR& ir, const Instance& instance, const EncoderConfig& config);
void encode_ordering(ConstraintIR& ir, const Instance& instance, const EncoderConfig& config);
void encode_assignment(ConstraintIR& ir, const Instance& instance, const EncoderConfig& config);
void encode_window_size(ConstraintIR& ir, const Instance& instance, const EncoderConfig& config);
void encode_stream_precedence(ConstraintIR& ir, const Instance& instance, const EncoderConfig& config);
/// Streams entering a shared egress port from different ingress links.
void encode_isolation(ConstraintIR& ir, const Instance& instance, const EncoderConfig& config);
/// Streams entering a shared egress port from the same ingress link.
void encode_fifo_consistency(ConstraintIR& ir, const Instance& instance, const EncoderConfig& config);
void encode_e2e(ConstraintIR& ir, const Instance& instance, const EncoderConfig& config);
/// Receiver jitter; throws UnsupportedFeature in multi-period mode.
void encode_jitter(ConstraintIR& ir, const Instance& instance, const EncoderConfig& config);
/// Period-slot bounds of every repetition; throws UnsupportedFeature unless multi-period.
void encode_multi_period(ConstraintIR& ir, const Instance& instance, const EncoderConfig& config);
void encode_symmetry_breaking(ConstraintIR& ir, const Instance& instance, const EncoderConfig& config);
void encode_objective(ConstraintIR& ir, const Instance& instance, const EncoderConfig& config);

/// Full encoding: every family the configuration asks for.
ConstraintIR encode(const Instance& instance, const EncoderConfig& config);

/// Fixes every schedule variable to the given concrete value.
void pin_schedule(ConstraintIR& ir, const Schedule& schedule, const Instance& instance,
                  const EncoderConfig& config);

/// Cheap necessary conditions (link capacity, path latency) as human-readable warnings.
std::vector<std::string> preflight_warnings(const Instance& instance, const EncoderConfig& config);

/// Smallest value close_last - open_first can take for one repetition.
Time path_latency_floor(const Instance& instance, std::size_t stream, Time delta);

}  // namespace tsn
