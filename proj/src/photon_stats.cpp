#include "eitmem/photon_stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace eitmem {

std::string_view channel_name(Channel c) {
    switch (c) {
        case Channel::G: return "G";
        case Channel::T: return "T";
        case Channel::R: return "R";
        case Channel::AS: return "AS";
    }
    return "?";
}

namespace {

bool event_less(const EventRecord& a, const EventRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return static_cast<int>(a.channel) < static_cast<int>(b.channel);
}

bool is_rate(double r) { return std::isfinite(r) && r >= 0.0; }
bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

// Inverse-CDF sampler over piecewise-constant |psi|^2 cells centred on the
// grid samples.
class DelaySampler {
public:
    explicit DelaySampler(const Wavepacket& w) : grid_(w.grid()) {
        cdf_.resize(w.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            acc += w.intensity(k);
            cdf_[k] = acc;
        }
        total_ = acc;
    }

    bool empty() const { return !(total_ > 0.0); }

    template <class Rng>
    double draw(Rng& rng) const {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double x = u(rng) * total_;
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), x);
        std::size_t k = static_cast<std::size_t>(it - cdf_.begin());
        if (k >= cdf_.size()) k = cdf_.size() - 1;
        return grid_.at(k) + (u(rng) - 0.5) * grid_.dt;
    }

private:
    TimeGrid grid_;
    std::vector<double> cdf_;
    double total_ = 0.0;
};

struct ChannelTimes {
    std::array<std::vector<std::int64_t>, 4> t;
    const std::vector<std::int64_t>& operator[](Channel c) const { return t[static_cast<std::size_t>(c)]; }
};

ChannelTimes split_channels(const EventStream& stream) {
    ChannelTimes out;
    for (const auto& e : stream) out.t[static_cast<std::size_t>(e.channel)].push_back(static_cast<std::int64_t>(e.timestamp));
    for (auto& v : out.t) std::sort(v.begin(), v.end());
    return out;
}

// Indices [first, last) of times inside [lo, hi].
std::pair<std::size_t, std::size_t> in_range(const std::vector<std::int64_t>& v, double lo, double hi) {
    auto a = std::lower_bound(v.begin(), v.end(), lo, [](std::int64_t t, double x) { return static_cast<double>(t) < x; });
    auto b = std::upper_bound(a, v.end(), hi, [](double x, std::int64_t t) { return x < static_cast<double>(t); });
    return {static_cast<std::size_t>(a - v.begin()), static_cast<std::size_t>(b - v.begin())};
}

}  // namespace

void sort_events(EventStream& stream) { std::stable_sort(stream.begin(), stream.end(), event_less); }

bool is_sorted_events(const EventStream& stream) {
    return std::is_sorted(stream.begin(), stream.end(), event_less);
}

void SourceStatModel::validate() const {
    if (!(std::isfinite(trial_rate) && trial_rate > 0.0)) throw config_error("trial_rate must be positive");
    if (!is_probability(pair_probability)) throw config_error("pair_probability must lie in [0, 1]");
    if (!is_probability(two_pair_probability)) throw config_error("two_pair_probability must lie in [0, 1]");
    if (two_pair_probability > pair_probability) throw config_error("two_pair_probability exceeds pair_probability");
    if (two_pair_probability > 2.0 * pair_probability * pair_probability)
        throw config_error("two_pair_probability exceeds 2 * pair_probability^2");
    if (!is_rate(noise_rate_as) || !is_rate(dark_rate_g) || !is_rate(dark_rate_as))
        throw config_error("noise and dark rates must be non-negative");
    if (!is_probability(channel_efficiency)) throw config_error("channel_efficiency must lie in [0, 1]");
    if (!is_probability(herald_efficiency)) throw config_error("herald_efficiency must lie in [0, 1]");
    if (pair_probability > 0.0 && waveform.size() == 0) throw config_error("waveform is empty");
}

EventStream simulate_event_stream(const SourceStatModel& model, double duration, bool split_as) {
    model.validate();
    if (!(std::isfinite(duration) && duration > 0.0)) throw config_error("duration must be positive");

    std::mt19937_64 rng(model.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const double period_ns = 1e9 / model.trial_rate;
    const double duration_ns = duration * 1e9;
    const auto n_trials = static_cast<std::uint64_t>(std::floor(duration * model.trial_rate));
    const double lead = model.waveform.size() ? std::max(0.0, -model.waveform.grid().t_start) : 0.0;
    const double origin = std::ceil(lead) + 1.0;

    EventStream out;
    auto emit = [&](double t, Channel c) {
        const double r = std::round(t);
        if (r < 0.0) return;
        out.push_back({static_cast<std::uint64_t>(r), c});
    };
    auto route_as = [&]() {
        if (!split_as) return Channel::AS;
        return uniform(rng) < 0.5 ? Channel::T : Channel::R;
    };

    const double p = model.pair_probability;
    if (p > 0.0 && n_trials > 0) {
        const DelaySampler sampler(model.waveform);
        if (sampler.empty()) throw config_error("waveform has zero norm");
        const double q2 = model.two_pair_probability / p;
        std::geometric_distribution<std::uint64_t> skip(p);
        std::uint64_t trial = p < 1.0 ? skip(rng) : 0;
        while (trial < n_trials) {
            const double t0 = origin + static_cast<double>(trial) * period_ns;
            const int pairs = (q2 > 0.0 && uniform(rng) < q2) ? 2 : 1;
            const double p_herald = 1.0 - std::pow(1.0 - model.herald_efficiency, pairs);
            if (uniform(rng) < p_herald) emit(t0, Channel::G);
            for (int k = 0; k < pairs; ++k) {
                const double delay = sampler.draw(rng);
                if (uniform(rng) < model.channel_efficiency) emit(t0 + delay, route_as());
            }
            trial += 1 + (p < 1.0 ? skip(rng) : 0);
        }
    }

    auto poisson_events = [&](double rate_per_s, auto channel_fn) {
        if (rate_per_s <= 0.0) return;
        std::poisson_distribution<std::uint64_t> count(rate_per_s * duration);
        const std::uint64_t n = count(rng);
        for (std::uint64_t i = 0; i < n; ++i) emit(origin + uniform(rng) * duration_ns, channel_fn());
    };
    poisson_events(model.dark_rate_g, [] { return Channel::G; });
    poisson_events(model.noise_rate_as, route_as);
    if (split_as) {
        poisson_events(model.dark_rate_as, [] { return Channel::T; });
        poisson_events(model.dark_rate_as, [] { return Channel::R; });
    } else {
        poisson_events(model.dark_rate_as, [] { return Channel::AS; });
    }

    sort_events(out);
    return out;
}

Gc2Result conditional_g2(const EventStream& stream, double t_w, double waveform_peak) {
    if (!(std::isfinite(t_w) && t_w > 0.0)) throw config_error("t_w must be positive");
    if (!std::isfinite(waveform_peak)) throw config_error("waveform_peak must be finite");
    const ChannelTimes ch = split_channels(stream);
    const auto& g = ch[Channel::G];
    const auto& tt = ch[Channel::T];
    const auto& rr = ch[Channel::R];

    Gc2Counts n;
    n.n_g = g.size();
    for (const std::int64_t tg : g) {
        const double centre = static_cast<double>(tg) + waveform_peak;
        const double lo = centre - 0.5 * t_w;
        const double hi = centre + 0.5 * t_w;
        const auto [t0, t1] = in_range(tt, lo, hi);
        const auto [r0, r1] = in_range(rr, lo, hi);
        const bool has_t = t1 > t0;
        const bool has_r = r1 > r0;
        n.n_gt += has_t;
        n.n_gr += has_r;
        if (!has_t || !has_r) continue;
        bool triple = false;
        for (std::size_t i = t0; i < t1 && !triple; ++i) {
            for (std::size_t j = r0; j < r1; ++j) {
                if (std::abs(static_cast<double>(tt[i] - rr[j])) < t_w) {
                    triple = true;
                    break;
                }
            }
        }
        n.n_gtr += triple;
    }

    if (n.n_gt == 0 || n.n_gr == 0) throw undefined_g2("conditional g2 undefined: no herald-T or herald-R coincidences", n);

    const double ng = static_cast<double>(n.n_g);
    const double ngt = static_cast<double>(n.n_gt);
    const double ngr = static_cast<double>(n.n_gr);
    const double ngtr = static_cast<double>(n.n_gtr);
    Gc2Result res;
    res.window = t_w;
    res.counts = n;
    res.value = ng * ngtr / (ngt * ngr);
    if (n.n_gtr > 0) {
        res.uncertainty = res.value * std::sqrt(1.0 / ng + 1.0 / ngtr + 1.0 / ngt + 1.0 / ngr);
    } else {
        // One-count scale when no triple coincidence was seen.
        res.uncertainty = ng / (ngt * ngr);
    }
    return res;
}

double stream_duration_ns(const EventStream& stream) {
    if (stream.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(stream.begin(), stream.end(),
                                        [](const EventRecord& a, const EventRecord& b) { return a.timestamp < b.timestamp; });
    return static_cast<double>(hi->timestamp - lo->timestamp) + 1.0;
}

CorrelationHistogram pair_cross_correlation(const EventStream& stream, double bin, double span, Channel start,
                                            Channel stop) {
    if (!(std::isfinite(bin) && bin >= 1.0)) throw config_error("bin must be at least 1 ns");
    if (!(std::isfinite(span) && span >= bin)) throw config_error("span must be at least one bin");
    CorrelationHistogram h;
    if (stream.empty()) return h;

    const ChannelTimes ch = split_channels(stream);
    const auto& a = ch[start];
    const auto& b = ch[stop];
    const auto n_bins = static_cast<std::size_t>(std::ceil(2.0 * span / bin));
    h.delay.resize(n_bins);
    h.coincidences.assign(n_bins, 0);
    h.g.assign(n_bins, 0.0);
    for (std::size_t k = 0; k < n_bins; ++k) h.delay[k] = -span + (static_cast<double>(k) + 0.5) * bin;

    const double T = stream_duration_ns(stream);
    h.accidental_per_bin = static_cast<double>(a.size()) * static_cast<double>(b.size()) * bin / T;
    if (a.empty() || b.empty()) return h;

    std::size_t first = 0;
    for (const std::int64_t ta : a) {
        const double lo = static_cast<double>(ta) - span;
        while (first < b.size() && static_cast<double>(b[first]) < lo) ++first;
        for (std::size_t j = first; j < b.size(); ++j) {
            const double d = static_cast<double>(b[j] - ta);
            if (d >= span) break;
            const auto k = static_cast<std::size_t>(std::floor((d + span) / bin));
            if (k < n_bins) ++h.coincidences[k];
        }
    }
    for (std::size_t k = 0; k < n_bins; ++k)
        h.g[k] = static_cast<double>(h.coincidences[k]) / h.accidental_per_bin;
    return h;
}

double zero_delay_autocorrelation(const EventStream& stream, Channel channel, double bin) {
    if (!(std::isfinite(bin) && bin >= 1.0)) throw config_error("bin must be at least 1 ns");
    const ChannelTimes ch = split_channels(stream);
    const auto& v = ch[channel];
    const double T = stream_duration_ns(stream);
    const double n = static_cast<double>(v.size());
    const double width = 2.0 * std::floor(bin) - 1.0;
    const double expected = 0.5 * n * (n - 1.0) * width / T;
    if (!(expected > 0.0)) throw numerical_error("autocorrelation undefined: too few events");
    std::uint64_t pairs = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size() && static_cast<double>(v[j] - v[i]) < bin; ++j) ++pairs;
    return static_cast<double>(pairs) / expected;
}

double cauchy_schwarz_ratio(double g_sas_peak, double g_ss, double g_asas) {
    if (!(g_ss > 0.0) || !(g_asas > 0.0)) throw config_error("autocorrelations must be positive");
    return g_sas_peak * g_sas_peak / (g_ss * g_asas);
}

}  // namespace eitmem
