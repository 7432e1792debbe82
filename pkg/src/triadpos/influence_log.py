"""Link actions, link-influence events and the probabilities built on them.

A link action of ``u`` on ``w`` is an interaction between them; only the
first tick per (actor, target) is used to form events. ``u`` influences its
neighbor ``v`` through target ``w`` when

    first(u, v) < first(u, w) < first(v, w)  and  first(v, w) - first(u, w) < sigma(u, v)

where ``sigma(u, v)`` is the mean absolute gap between the two nodes' first
actions on their common targets.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .temporal_graph import Snapshot, TemporalGraph

PATTERNS = ("1XX", "0XX", "X1X", "X0X", "XX1", "XX0", "11X", "00X", "10X", "01X")


@dataclass(frozen=True)
class LinkAction:
    actor: str
    target: str
    time: int


@dataclass(frozen=True)
class LinkInfluenceEvent:
    influencer: str
    influenced: str
    target: str
    t: int
    t_prime: int
    sigma: float


@dataclass
class DyadInfluenceStats:
    """Event and action counts, and the ratios derived from them.

    ``undefined`` holds nodes with no link actions; their LIP is reported as 0.
    """

    action_count: dict[str, int]
    influencer_events: Counter
    dyad_events: Counter
    sigma: dict[tuple[str, str], float] = field(default_factory=dict)
    undefined: frozenset = frozenset()

    def lip(self, u) -> float:
        a = self.action_count.get(u, 0)
        return self.influencer_events[u] / a if a else 0.0

    def lip_dyad(self, u, v) -> float:
        a = self.action_count.get(u, 0)
        return self.dyad_events[(u, v)] / a if a else 0.0


def link_actions(g: TemporalGraph) -> list[LinkAction]:
    """First action per (actor, target), both directions of every pair."""
    out = []
    for (a, b), ts in g.edge_log.items():
        out.append(LinkAction(a, b, ts[0]))
        out.append(LinkAction(b, a, ts[0]))
    out.sort(key=lambda x: (x.time, x.actor, x.target))
    return out


def _dyad_gaps(g: TemporalGraph, u, v) -> list[tuple[str, int, int]]:
    inc = g.incident
    nu, nv = inc[u], inc[v]
    if len(nu) > len(nv):
        common = [w for w in nv if w in nu and w != u]
    else:
        common = [w for w in nu if w in nv and w != v]
    return [(w, nu[w][0], nv[w][0]) for w in sorted(common)]


def mine_link_influence(g: TemporalGraph, sigma: float | None = None
                        ) -> tuple[list[LinkInfluenceEvent], DyadInfluenceStats]:
    """All link-influence events in ``g`` plus per-node and per-dyad counts.

    ``sigma`` overrides the per-dyad mean action gap with a fixed window.
    """
    gaps = {pair: _dyad_gaps(g, *pair) for pair in g.edge_log}
    all_gaps = [abs(tu - tv) for rows in gaps.values() for _, tu, tv in rows]
    global_sigma = sum(all_gaps) / len(all_gaps) if all_gaps else 0.0

    events: list[LinkInfluenceEvent] = []
    sigmas = {}
    for (a, b), rows in gaps.items():
        if sigma is not None:
            sig = float(sigma)
        elif rows:
            sig = sum(abs(tu - tv) for _, tu, tv in rows) / len(rows)
        else:
            sig = global_sigma
        sigmas[(a, b)] = sig
        start = g.edge_log[(a, b)][0]
        for w, ta, tb in rows:
            if start < ta < tb and tb - ta < sig:
                events.append(LinkInfluenceEvent(a, b, w, ta, tb, sig))
            elif start < tb < ta and ta - tb < sig:
                events.append(LinkInfluenceEvent(b, a, w, tb, ta, sig))
    events.sort(key=lambda e: (e.t, e.influencer, e.influenced, e.target))

    actions = {v: len(nb) for v, nb in g.incident.items()}
    stats = DyadInfluenceStats(
        action_count=actions,
        influencer_events=Counter(e.influencer for e in events),
        dyad_events=Counter((e.influencer, e.influenced) for e in events),
        sigma=sigmas,
        undefined=frozenset(v for v, c in actions.items() if c == 0),
    )
    return events, stats


def is_link_influence(g: TemporalGraph, u, v, w, t: int, t_prime: int, sigma: float) -> bool:
    """Direct check of the three event conditions against the raw log."""
    inc = g.incident
    if w in (u, v) or v not in inc.get(u, {}):
        return False
    if t not in inc[u].get(w, ()) or t_prime not in inc[v].get(w, ()):
        return False
    return min(inc[u][v]) < t < t_prime and t_prime - t < sigma


def prominence_features(stats: DyadInfluenceStats, s: Snapshot, v) -> tuple[float, float]:
    """(prominence_prob, prominence_index) of ``v`` from its neighbors' LIP."""
    i = s.index[v]
    lips = [stats.lip(s.nodes[j]) for j in s.neighbors[i]]
    if not lips:
        return 0.0, 0.0
    return 1.0 - math.prod(1.0 - p for p in lips), float(sum(lips))


def pair_link_influence_prob(stats: DyadInfluenceStats, g: TemporalGraph, pair, t: int, window: int) -> float:
    """Chance that ``v`` and ``w`` link because of common neighbors' influence.

    For each common neighbor ``u`` (as of tick ``t``) the per-neighbor chance
    is the larger of ``1 - (1 - LIP(u, v)) ** k_w`` and
    ``1 - (1 - LIP(u, w)) ** k_v``, where ``k_x`` counts ``u``'s interactions
    with ``x`` inside ``(t - window, t]``.
    """
    if window <= 0:
        raise ValueError("window must be positive")
    v, w = pair
    inc = g.incident
    nv, nw = inc.get(v, {}), inc.get(w, {})
    if w in nv and nv[w][0] <= t:
        raise ValueError(f"pair {pair!r} is already linked at t={t}")
    keep = 1.0
    for u in sorted(set(nv) & set(nw)):
        if nv[u][0] > t or nw[u][0] > t:
            continue
        k_w = sum(1 for x in nw[u] if t - window < x <= t)
        k_v = sum(1 for x in nv[u] if t - window < x <= t)
        p_v = 1.0 - (1.0 - stats.lip_dyad(u, v)) ** k_w
        p_w = 1.0 - (1.0 - stats.lip_dyad(u, w)) ** k_v
        keep *= 1.0 - max(p_v, p_w)
    return 1.0 - keep


def event_pattern_census(events: Iterable[LinkInfluenceEvent], prominent: Mapping) -> dict[str, int]:
    """Count events by prominence digits of (influencer, influenced, target).

    ``prominent`` maps node -> truthy for prominent nodes. Each event adds to
    every wildcard pattern it matches.
    """
    counts = {p: 0 for p in PATTERNS}
    for e in events:
        try:
            digits = tuple("1" if prominent[x] else "0" for x in (e.influencer, e.influenced, e.target))
        except KeyError as exc:
            raise KeyError(f"node {exc.args[0]!r} has no prominence label") from None
        for p in PATTERNS:
            if all(c == "X" or c == d for c, d in zip(p, digits)):
                counts[p] += 1
    return counts


def write_events(events: Iterable[LinkInfluenceEvent], out, sep: str = ",") -> None:
    out.write(sep.join(("u", "v", "w", "t", "t_prime", "sigma")) + "\n")
    for e in events:
        out.write(sep.join((e.influencer, e.influenced, e.target, str(e.t), str(e.t_prime), repr(e.sigma))) + "\n")

