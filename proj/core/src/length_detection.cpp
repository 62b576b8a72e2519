#include "conff/length_detection.hpp"

#include <algorithm>

namespace conff {

LengthSignal length_signal(const ExecutionTrace& t) {
  LengthSignal s;
  s.occurrences = t.sites_hit.size();
  s.sites.reserve(t.sites_hit.size());
  for (const SiteHit& h : t.sites_hit) s.sites.push_back(h.site);
  std::sort(s.sites.begin(), s.sites.end());
  s.sites.erase(std::unique(s.sites.begin(), s.sites.end()), s.sites.end());
  return s;
}

Bytes detect_length(const Bytes& seed, size_t max_len, std::mt19937_64& rng, const RunFn& run) {
  Bytes cur = seed;
  if (cur.size() > max_len) cur.resize(max_len);
  LengthSignal sig = length_signal(run(cur, -1));

  while (cur.size() < max_len) {
    Bytes cand = cur;
    if (cur.empty()) {
      cand.push_back(0);
    } else {
      size_t n = cur.size();
      for (size_t i = 0; i < n && cand.size() < max_len; ++i)
        cand.push_back(cur[rng() % n]);
    }
    LengthSignal cs = length_signal(run(cand, -1));
    if (cs.occurrences > sig.occurrences || cs.sites.size() > sig.sites.size()) {
      cur = std::move(cand);
      sig = std::move(cs);
    } else {
      break;
    }
  }

  while (cur.size() > 1) {
    Bytes cand(cur.begin(), cur.end() - static_cast<long>(cur.size() / 2));
    LengthSignal cs = length_signal(run(cand, -1));
    if (cs == sig) {
      cur = std::move(cand);
    } else {
      break;
    }
  }
  return cur;
}

}  // namespace conff
