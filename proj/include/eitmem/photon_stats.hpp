#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "eitmem/errors.hpp"
#include "eitmem/wavepacket.hpp"

namespace eitmem {

/// Detector channels: herald (Stokes), the two HBT outputs, and the undivided
/// anti-Stokes detector.
enum class Channel : std::uint8_t { G = 0, T = 1, R = 2, AS = 3 };

std::string_view channel_name(Channel c);

struct EventRecord {
    std::uint64_t timestamp = 0;  // ns
    Channel channel = Channel::G;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Time-ordered click records (ties broken by channel).
using EventStream = std::vector<EventRecord>;

void sort_events(EventStream& stream);
bool is_sorted_events(const EventStream& stream);

/// Monte Carlo model of the heralded source as seen by the detectors.
/// Pairs are created at the start of consecutive trial slots of length
/// 1 / trial_rate.
struct SourceStatModel {
    double trial_rate = 1e6;            // 1/s
    double pair_probability = 0.1;      // per trial
    double two_pair_probability = 0.0;  // per trial, counted within pair_probability
    /// |waveform|^2 is the anti-Stokes delay density after the herald.
    Wavepacket waveform;
    double noise_rate_as = 90.0;        // 1/s, uncorrelated photons in the anti-Stokes mode
    double dark_rate_g = 500.0;         // 1/s
    double dark_rate_as = 25.0;         // 1/s per anti-Stokes detector
    double channel_efficiency = 0.027;  // anti-Stokes photon detection probability
    double herald_efficiency = 1.0;     // Stokes photon detection probability
    std::uint64_t seed = 1;

    void validate() const;
};

/// Generate `duration` seconds of clicks. With split_as every anti-Stokes
/// photon goes to T or R with probability 1/2 and each of T and R has its own
/// dark counts; otherwise clicks land on AS. Reproducible from model.seed.
EventStream simulate_event_stream(const SourceStatModel& model, double duration, bool split_as);

struct Gc2Counts {
    std::uint64_t n_g = 0;
    std::uint64_t n_gt = 0;
    std::uint64_t n_gr = 0;
    std::uint64_t n_gtr = 0;
};

struct Gc2Result {
    double value = 0.0;
    double uncertainty = 0.0;
    double window = 0.0;  // ns
    Gc2Counts counts;
};

/// Carries the raw counts when g_c^2 cannot be formed.
class undefined_g2 : public numerical_error {
public:
    undefined_g2(const std::string& what, Gc2Counts counts) : numerical_error(what), counts_(counts) {}
    const Gc2Counts& counts() const { return counts_; }

private:
    Gc2Counts counts_;
};

/// Conditional autocorrelation N(G) N(GTR) / (N(GT) N(GR)). A herald counts
/// towards N(GT) (N(GR)) when a T (R) click falls inside the window of width
/// t_w centred waveform_peak after it; N(GTR) additionally needs a T and an R
/// click closer than t_w to each other. Times in ns.
Gc2Result conditional_g2(const EventStream& stream, double t_w, double waveform_peak);

struct CorrelationHistogram {
    std::vector<double> delay;      // bin centres, ns
    std::vector<std::uint64_t> coincidences;
    std::vector<double> g;          // normalised to the accidental level
    double accidental_per_bin = 0.0;
};

/// Cross-correlation between `start` and `stop` clicks over delays in
/// [-span, span): g(tau) = coincidences / (N_start N_stop bin / T) where T is the
/// stream duration. Bins are bin ns wide (bin >= 1).
CorrelationHistogram pair_cross_correlation(const EventStream& stream, double bin, double span,
                                            Channel start = Channel::G, Channel stop = Channel::AS);

/// Zero-delay autocorrelation of one channel from self-coincidences closer
/// than `bin` ns, normalised by singles.
double zero_delay_autocorrelation(const EventStream& stream, Channel channel, double bin);

/// g_sas^2 / (g_ss g_asas).
double cauchy_schwarz_ratio(double g_sas_peak, double g_ss, double g_asas);

/// First and last timestamps define the stream duration in ns.
double stream_duration_ns(const EventStream& stream);

}  // namespace eitmem
