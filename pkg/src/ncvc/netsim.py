"""Seeded multicast simulation over layered DAGs.

Every edge carries exactly one packet per run.  Sources emit their native
packet, intermediate nodes send an independent random linear combination of
their inputs on each out-edge, and terminals decode the compressed headers,
stack the coding vectors into a transfer matrix and solve for the source
payloads.

Ground truth (the uncompressed coding vector, the OR of contributing source
IDs and the naive per-packet counter) travels with every packet so the
invariants can be checked on each hop; none of it is used for decoding.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from collections import Counter
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from . import linalg
from .errors import DecodeFailure, InfeasibleConfig
from .header import PacketHeader, Scheme, SchemeConfig, combine_headers, decode_header, encode_source_header, make_config, overhead_bytes


class Enforcement(enum.Enum):
    NONE = "none"
    COUNTER = "counter"
    ID_POPCOUNT = "id_popcount"

    @classmethod
    def parse(cls, value) -> "Enforcement":
        if isinstance(value, Enforcement):
            return value
        return cls(str(value).lower())


# --- topology --------------------------------------------------------------


def _node_key(name: str):
    return ("SIT".index(name[0]), int(name[1:]))


@dataclass
class Topology:
    sources: list[str]
    intermediates: list[str]
    terminals: list[str]
    edges: list[tuple[str, str]]

    def __post_init__(self):
        g = nx.DiGraph()
        g.add_nodes_from(self.sources + self.intermediates + self.terminals)
        for u, v in self.edges:
            if u not in g or v not in g:
                raise ValueError(f"edge {u}->{v} references an unknown node")
            if g.has_edge(u, v):
                raise ValueError(f"duplicate edge {u}->{v}")
            g.add_edge(u, v)
        if not nx.is_directed_acyclic_graph(g):
            raise ValueError("topology has a cycle")
        self.graph = g
        self.order = list(nx.lexicographical_topological_sort(g, key=_node_key))
        self._preds = {node: [] for node in g}
        self._succs = {node: [] for node in g}
        for u, v in self.edges:
            self._preds[v].append(u)
            self._succs[u].append(v)
        for t in self.terminals:
            if not self.reachable_sources(t):
                raise ValueError(f"terminal {t} is not reachable from any source")

    @staticmethod
    def source_index(name: str) -> int:
        return int(name[1:])

    def predecessors(self, node: str) -> list[str]:
        return self._preds[node]

    def successors(self, node: str) -> list[str]:
        return self._succs[node]

    def reachable_sources(self, node: str) -> list[int]:
        anc = nx.ancestors(self.graph, node)
        return sorted(self.source_index(a) for a in anc if a[0] == "S")

    def min_cut(self, terminal: str) -> int:
        """Max flow from the sources reaching ``terminal`` (each source rate 1)."""
        g = nx.DiGraph()
        for u, v in self.edges:
            g.add_edge(u, v, capacity=1)
        for i in self.reachable_sources(terminal):
            g.add_edge("__super__", f"S{i}", capacity=1)
        return int(nx.maximum_flow_value(g, "__super__", terminal))

    def to_edgelist(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.edges)

    @classmethod
    def from_edgelist(cls, text: str) -> "Topology":
        edges, nodes = [], set()
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            u, v = line.split()
            for x in (u, v):
                if x[0] not in "SIT" or not x[1:].isdigit():
                    raise ValueError(f"bad node id {x!r}")
            edges.append((u, v))
            nodes.update((u, v))
        by = lambda p: sorted((x for x in nodes if x[0] == p), key=_node_key)
        return cls(by("S"), by("I"), by("T"), edges)


@dataclass(frozen=True)
class TopologyParams:
    n_sources: int
    locality: int
    layers: int = 2
    extra_width: int = 2
    terminals_per_cluster: int = 1
    density: float = 0.3


def generate_topology(params: TopologyParams, seed: int) -> Topology:
    """Layered random DAG whose terminals each see at most ``locality`` sources.

    Sources are shuffled into clusters of ``locality``.  Each cluster gets
    ``layers`` layers of width (cluster size + extra_width); consecutive
    layers are joined by a matching, which guarantees cluster-size
    edge-disjoint paths, plus random extra edges with probability
    ``density``.  Terminals listen to every node of their cluster's last
    layer.
    """
    p = params
    if p.n_sources < 1 or p.locality < 1 or p.layers < 0 or p.terminals_per_cluster < 1:
        raise InfeasibleConfig(f"unsatisfiable topology parameters {p}")
    if not 0 <= p.density <= 1 or p.extra_width < 0:
        raise InfeasibleConfig("density must be in [0, 1] and extra_width >= 0")
    rng = np.random.default_rng(seed)
    perm = [int(x) for x in rng.permutation(p.n_sources)]
    sources = [f"S{i}" for i in range(p.n_sources)]
    inter, terms, edges = [], [], []
    for start in range(0, p.n_sources, p.locality):
        prev = [f"S{i}" for i in perm[start : start + p.locality]]
        width = len(prev) + p.extra_width
        for _ in range(p.layers):
            layer = [f"I{len(inter) + j}" for j in range(width)]
            inter.extend(layer)
            for idx, node in enumerate(layer):
                ins = {prev[idx]} if idx < len(prev) else set()
                for u, draw in zip(prev, rng.random(len(prev))):
                    if draw < p.density:
                        ins.add(u)
                if not ins:
                    ins.add(prev[int(rng.integers(len(prev)))])
                edges.extend((u, node) for u in sorted(ins, key=_node_key))
            prev = layer
        for _ in range(p.terminals_per_cluster):
            t = f"T{len(terms)}"
            terms.append(t)
            edges.extend((u, t) for u in prev)
    topo = Topology(sources, inter, terms, edges)
    for t in terms:
        reach = topo.reachable_sources(t)
        if len(reach) > p.locality:
            raise InfeasibleConfig(f"{t} reaches {len(reach)} sources, locality is {p.locality}")
        if topo.min_cut(t) < len(reach):
            raise InfeasibleConfig(f"{t} has min-cut below its reachable-source count")
    return topo


def line_topology() -> Topology:
    return Topology(["S0"], [], ["T0"], [("S0", "T0")])


def diamond_topology() -> Topology:
    """S0 reaches I2 along two paths, so I2's input counters double-count it."""
    edges = [("S0", "I0"), ("S0", "I1"), ("S1", "I1"), ("I0", "I2"), ("I1", "I2"), ("I2", "T0"), ("I1", "T0")]
    return Topology(["S0", "S1"], ["I0", "I1", "I2"], ["T0"], edges)


# --- simulation ------------------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    scheme_config: SchemeConfig
    seed: int = 0
    enforcement: Enforcement = Enforcement.ID_POPCOUNT
    payload_len: int = 4
    retry_cap: int = 8
    topology: TopologyParams | None = None


@dataclass
class _Pkt:
    header: PacketHeader
    payload: np.ndarray
    vector: np.ndarray
    counter: int
    ids: int


@dataclass
class TerminalReport:
    name: str
    received: int
    used: int
    ignored: int
    reachable: int
    min_cut: int
    rank: int
    success: bool
    failures: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "received": self.received,
            "used": self.used,
            "ignored": self.ignored,
            "reachable": self.reachable,
            "min_cut": self.min_cut,
            "rank": self.rank,
            "rank_deficiency": self.reachable - self.rank,
            "success": self.success,
            "failures": dict(sorted(self.failures.items())),
        }


@dataclass
class SimReport:
    """Per-run outcome.

    ``counter_overestimate_events`` counts combine operations whose summed
    input counters exceed the popcount of the OR of their input IDs;
    ``needless_drops`` counts enforcement events where the true source
    count was already within m (only possible under COUNTER).
    """

    seed: int
    scheme: str
    enforcement: str
    n: int
    m: int
    overhead_bytes: int
    terminals: list = field(default_factory=list)
    packets: int = 0
    counter_overestimate_events: int = 0
    enforcement_events: int = 0
    needless_drops: int = 0
    max_popcount: int = 0
    max_true_weight: int = 0
    max_counter: int = 0
    popcount_over_m: int = 0
    violations: dict = field(default_factory=dict)

    @property
    def all_recovered(self) -> bool:
        return all(t.success for t in self.terminals)

    @property
    def invariant_violations(self) -> int:
        return sum(self.violations.values())

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "scheme": self.scheme,
            "enforcement": self.enforcement,
            "n": self.n,
            "m": self.m,
            "overhead_bytes": self.overhead_bytes,
            "packets": self.packets,
            "counter_overestimate_events": self.counter_overestimate_events,
            "enforcement_events": self.enforcement_events,
            "needless_drops": self.needless_drops,
            "max_popcount": self.max_popcount,
            "max_true_weight": self.max_true_weight,
            "max_counter": self.max_counter,
            "popcount_over_m": self.popcount_over_m,
            "violations": dict(sorted(self.violations.items())),
            "all_recovered": self.all_recovered,
            "terminals": [t.to_dict() for t in self.terminals],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def csv_rows(self) -> list[dict]:
        return [
            {
                "seed": self.seed,
                "scheme": self.scheme,
                "enforcement": self.enforcement,
                "terminal": t.name,
                "reachable": t.reachable,
                "rank": t.rank,
                "success": int(t.success),
                "decode_failures": sum(t.failures.values()),
                "counter_overestimate_events": self.counter_overestimate_events,
                "max_popcount": self.max_popcount,
                "overhead_bytes": self.overhead_bytes,
            }
            for t in self.terminals
        ]


CSV_FIELDS = [
    "seed", "scheme", "enforcement", "terminal", "reachable", "rank", "success",
    "decode_failures", "counter_overestimate_events", "max_popcount", "overhead_bytes",
]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerows(rep.csv_rows())
    return buf.getvalue()


class _Run:
    def __init__(self, topology: Topology, cfg: SimConfig):
        self.topo = topology
        self.cfg = cfg
        self.scfg = cfg.scheme_config
        self.gf = self.scfg.code.field
        self.rng = np.random.default_rng(cfg.seed)
        n = self.scfg.n
        if any(self.topo.source_index(s) >= n for s in topology.sources):
            raise InfeasibleConfig(f"topology has more sources than n={n}")
        self.payloads = np.zeros((n, cfg.payload_len), dtype=np.int64)
        self.report = SimReport(
            seed=cfg.seed,
            scheme=self.scfg.scheme.name,
            enforcement=cfg.enforcement.value,
            n=n,
            m=self.scfg.m,
            overhead_bytes=overhead_bytes(self.scfg),
            violations={"counter_below_popcount": 0, "popcount_below_weight": 0, "support_outside_ids": 0, "conservation": 0},
        )

    @staticmethod
    def _popcount(pkts) -> int:
        ids = 0
        for p in pkts:
            ids |= p.ids
        return ids.bit_count()

    def _metric(self, pkts) -> int:
        if self.cfg.enforcement is Enforcement.COUNTER:
            return sum(p.counter for p in pkts)
        return self._popcount(pkts)

    def _record(self, pkt: _Pkt):
        rep = self.report
        pop = pkt.ids.bit_count()
        weight = int(np.count_nonzero(pkt.vector))
        rep.packets += 1
        rep.max_popcount = max(rep.max_popcount, pop)
        rep.max_true_weight = max(rep.max_true_weight, weight)
        rep.max_counter = max(rep.max_counter, pkt.counter)
        if pop > self.scfg.m:
            rep.popcount_over_m += 1
        if pkt.counter < pop:
            rep.violations["counter_below_popcount"] += 1
        if pop < weight:
            rep.violations["popcount_below_weight"] += 1
        support = 0
        for j in np.flatnonzero(pkt.vector):
            support |= 1 << int(j)
        if support & ~pkt.ids:
            rep.violations["support_outside_ids"] += 1

    def _combine(self, inputs: list[_Pkt]) -> _Pkt:
        sel = list(inputs)
        m = self.scfg.m
        counters = sum(p.counter for p in sel)
        union = self._popcount(sel)
        if counters > union:
            self.report.counter_overestimate_events += 1
        if self.cfg.enforcement is not Enforcement.NONE and self._metric(sel) > m:
            self.report.enforcement_events += 1
            if union <= m:
                self.report.needless_drops += 1
            retries = 0
            while len(sel) > 1 and retries < self.cfg.retry_cap and self._metric(sel) > m:
                sel.pop()
                retries += 1
            if self._metric(sel) > m:
                src = inputs[0]
                return _Pkt(src.header, src.payload.copy(), src.vector.copy(), src.counter, src.ids)
        gf = self.gf
        coeffs = self.gf.random(self.rng, len(sel))
        payload = np.bitwise_xor.reduce(gf.vmul(coeffs[:, None], np.stack([p.payload for p in sel])), axis=0)
        vector = np.bitwise_xor.reduce(gf.vmul(coeffs[:, None], np.stack([p.vector for p in sel])), axis=0)
        header = combine_headers(coeffs, [p.header for p in sel], self.scfg)
        ids = 0
        for p in sel:
            ids |= p.ids
        return _Pkt(header, payload, vector, sum(p.counter for p in sel), ids)

    def _terminal(self, name: str, pkts: list[_Pkt]) -> TerminalReport:
        n = self.scfg.n
        reach = self.topo.reachable_sources(name)
        used, ignored = pkts[:n], max(0, len(pkts) - n)
        failures: Counter = Counter()
        rows, ys = [], []
        for pkt in used:
            try:
                vec = decode_header(pkt.header, self.scfg)
            except DecodeFailure as exc:
                failures[exc.cause] += 1
                continue
            if not np.array_equal(vec, pkt.vector):
                failures["mis-decode"] += 1
            if not np.array_equal(self.gf.vecmat(vec, self.payloads), pkt.payload):
                self.report.violations["conservation"] += 1
            rows.append(vec)
            ys.append(pkt.payload)
        rank, success = 0, False
        if rows and reach:
            M = np.stack(rows)[:, reach]
            Y = np.stack(ys)
            R, piv = linalg.rref(self.gf, np.concatenate([M, Y], axis=1))
            rank = sum(1 for c in piv if c < len(reach))
            if rank == len(reach):
                solved = R[: len(reach), len(reach) :]
                success = bool(np.array_equal(solved, self.payloads[reach]))
        return TerminalReport(
            name=name,
            received=len(pkts),
            used=len(used),
            ignored=ignored,
            reachable=len(reach),
            min_cut=self.topo.min_cut(name),
            rank=rank,
            success=success,
            failures=dict(failures),
        )

    def run(self) -> SimReport:
        topo, scfg = self.topo, self.scfg
        inbox: dict[str, list[_Pkt]] = {node: [] for node in topo.order}
        for s in sorted(topo.sources, key=_node_key):
            i = topo.source_index(s)
            self.payloads[i] = self.gf.random(self.rng, self.cfg.payload_len)
        for node in topo.order:
            kind = node[0]
            if kind == "S":
                i = topo.source_index(node)
                vec = np.zeros(scfg.n, dtype=np.int64)
                vec[i] = 1
                pkt = _Pkt(encode_source_header(i, scfg), self.payloads[i].copy(), vec, 1, 1 << i)
                for dst in topo.successors(node):
                    inbox[dst].append(pkt)
            elif kind == "I":
                if not inbox[node]:
                    continue
                for dst in topo.successors(node):
                    out = self._combine(inbox[node])
                    self._record(out)
                    inbox[dst].append(out)
        self.report.terminals = [self._terminal(t, inbox[t]) for t in sorted(topo.terminals, key=_node_key)]
        return self.report


def run_multicast(topology: Topology, cfg: SimConfig) -> SimReport:
    """One deterministic run; failures are recorded in the report, never raised."""
    return _Run(topology, cfg).run()


def run_trials(cfg: SimConfig, trials: int, topology: Topology | None = None) -> list[SimReport]:
    """``trials`` runs with seeds ``cfg.seed + i``.

    With no fixed ``topology`` each trial draws a fresh one from
    ``cfg.topology`` using the trial seed.
    """
    if topology is None and cfg.topology is None:
        raise ValueError("need a topology or topology parameters")
    reports = []
    for i in range(trials):
        seed = cfg.seed + i
        topo = topology if topology is not None else generate_topology(cfg.topology, seed)
        trial_cfg = SimConfig(cfg.scheme_config, seed, cfg.enforcement, cfg.payload_len, cfg.retry_cap, cfg.topology)
        reports.append(run_multicast(topo, trial_cfg))
    return reports


def summarize(reports) -> dict:
    """Merge per-trial reports; every field is a sum or max, so merging is associative."""
    out = {
        "trials": 0,
        "trials_all_recovered": 0,
        "terminal_runs": 0,
        "terminal_successes": 0,
        "packets": 0,
        "counter_overestimate_events": 0,
        "enforcement_events": 0,
        "needless_drops": 0,
        "popcount_over_m": 0,
        "max_popcount": 0,
        "invariant_violations": 0,
        "decode_failures": {},
    }
    fails: Counter = Counter()
    for rep in reports:
        out["trials"] += 1
        out["trials_all_recovered"] += int(rep.all_recovered)
        out["terminal_runs"] += len(rep.terminals)
        out["terminal_successes"] += sum(t.success for t in rep.terminals)
        out["packets"] += rep.packets
        out["counter_overestimate_events"] += rep.counter_overestimate_events
        out["enforcement_events"] += rep.enforcement_events
        out["needless_drops"] += rep.needless_drops
        out["popcount_over_m"] += rep.popcount_over_m
        out["max_popcount"] = max(out["max_popcount"], rep.max_popcount)
        out["invariant_violations"] += rep.invariant_violations
        for t in rep.terminals:
            fails.update(t.failures)
    out["decode_failures"] = dict(sorted(fails.items()))
    return out


def measure_rank_loss(topology: Topology, cfg: SimConfig, trials: int, m_values, w: int | None = None) -> dict:
    """Rank deficiency at the terminals as a function of the combining limit m.

    The scheme is rebuilt for each m (same scheme, same n); trial ``i`` uses
    seed ``cfg.seed + i`` for every m so the sweep shares its seed set.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    base = cfg.scheme_config
    w = w or base.w
    out = {}
    for m in m_values:
        scfg = make_config(base.scheme, base.n, m, w=w, session_id=base.session_id)
        hist: Counter = Counter()
        successes = total = 0
        for i in range(trials):
            trial_cfg = SimConfig(scfg, cfg.seed + i, cfg.enforcement, cfg.payload_len, cfg.retry_cap)
            rep = run_multicast(topology, trial_cfg)
            for t in rep.terminals:
                hist[t.reachable - t.rank] += 1
                successes += int(t.success)
                total += 1
        out[m] = {
            "deficiency_hist": dict(sorted(hist.items())),
            "mean_deficiency": sum(d * c for d, c in hist.items()) / total,
            "success_rate": successes / total,
        }
    return out
