#!/usr/bin/env python3
"""Generates data/City_net.tntp and data/City_trips.tntp.

A deterministic city-scale instance of the same size class as the Anaheim
benchmark (38 zones, ~400 nodes, ~900 links, ~1.4e3 OD pairs). Zones hang
off a street grid with arterials every fourth row/column. Capacities are
drawn around the free-flow all-or-nothing load so that some links are
congested yet the demand stays routable within capacity, which the script
checks with a max-concurrent-flow LP before writing anything.

Usage: make_city_instance.py [--out DIR] [--seed N]
"""

import argparse
import pathlib

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog
from scipy.sparse.csgraph import dijkstra

ZONES = 38
ROWS, COLS = 14, 15
REMOVED_SEGMENTS = 10
BPR_B, BPR_POWER = 0.15, 4.0


def build_grid(rng):
    """Undirected grid segments as (u, v, arterial) with u, v grid indices."""
    segs = []
    for r in range(ROWS):
        for c in range(COLS):
            u = r * COLS + c
            if c + 1 < COLS:
                segs.append((u, u + 1, r % 4 == 1))
            if r + 1 < ROWS:
                segs.append((u, u + COLS, c % 4 == 1))
    # Drop a few local segments while the grid stays connected.
    order = rng.permutation(len(segs))
    removed = set()
    for i in order:
        if len(removed) == REMOVED_SEGMENTS:
            break
        if segs[i][2]:
            continue
        trial = removed | {i}
        keep = [s for j, s in enumerate(segs) if j not in trial]
        rows = [a for a, b, _ in keep] + [b for a, b, _ in keep]
        cols = [b for a, b, _ in keep] + [a for a, b, _ in keep]
        g = sp.csr_matrix((np.ones(len(rows)), (rows, cols)),
                          shape=(ROWS * COLS, ROWS * COLS))
        ncomp, _ = sp.csgraph.connected_components(g, directed=False)
        if ncomp == 1:
            removed = trial
    return [s for j, s in enumerate(segs) if j not in removed]


def build_links(rng):
    grid = build_grid(rng)
    links = []  # (tail, head, length_km, speed_kmh, base_cap, kind)
    for u, v, arterial in grid:
        length = rng.uniform(0.4, 0.9)
        speed = 60.0 if arterial else 40.0
        cap = rng.uniform(3000, 4500) if arterial else rng.uniform(900, 1600)
        a, b = u + ZONES + 1, v + ZONES + 1
        links.append((a, b, length, speed, cap, "street"))
        links.append((b, a, length, speed, cap, "street"))
    # Each zone attaches to two grid nodes in distinct cells.
    cells = rng.choice(ROWS * COLS, size=ZONES, replace=False)
    for z, cell in enumerate(cells, start=1):
        r, c = divmod(int(cell), COLS)
        other = r * COLS + (c + 1 if c + 1 < COLS else c - 1)
        for g in (int(cell), other):
            node = g + ZONES + 1
            links.append((z, node, 0.5, 30.0, 20000.0, "connector"))
            links.append((node, z, 0.5, 30.0, 20000.0, "connector"))
    return links


def build_demand(rng):
    d = rng.uniform(10.0, 150.0, size=(ZONES, ZONES))
    np.fill_diagonal(d, 0.0)
    return np.round(d, 2)


def aon_flows(n_nodes, links, fft, demand):
    tails = np.array([l[0] - 1 for l in links])
    heads = np.array([l[1] - 1 for l in links])
    g = sp.csr_matrix((fft, (tails, heads)), shape=(n_nodes, n_nodes))
    _, pred = dijkstra(g, directed=True, indices=np.arange(ZONES),
                       return_predecessors=True)
    index = {(t, h): i for i, (t, h) in enumerate(zip(tails, heads))}
    flows = np.zeros(len(links))
    for o in range(ZONES):
        for dst in range(ZONES):
            if demand[o, dst] <= 0:
                continue
            v = dst
            while v != o:
                u = pred[o, v]
                flows[index[(u, v)]] += demand[o, dst]
                v = u
    return flows


def max_concurrent_scale(n_nodes, links, cap, demand):
    """Largest λ with λ·demand routable under cap (origin-aggregated LP)."""
    m = len(links)
    tails = np.array([l[0] - 1 for l in links])
    heads = np.array([l[1] - 1 for l in links])
    incidence = sp.csr_matrix(
        (np.r_[np.ones(m), -np.ones(m)],
         (np.r_[tails, heads], np.r_[np.arange(m), np.arange(m)])),
        shape=(n_nodes, m))
    # Per origin: out - in = λ · supply at every node.
    supply = np.zeros((ZONES, n_nodes))
    for o in range(ZONES):
        supply[o, :ZONES] = -demand[o]
        supply[o, o] = demand[o].sum()
    a_eq = sp.hstack([sp.kron(sp.identity(ZONES), incidence),
                      sp.csr_matrix(-supply.reshape(-1, 1))]).tocsr()
    b_eq = np.zeros(ZONES * n_nodes)
    a_ub = sp.hstack([sp.kron(np.ones((1, ZONES)), sp.identity(m)),
                      sp.csr_matrix((m, 1))]).tocsr()
    nvar = ZONES * m + 1
    c = np.zeros(nvar)
    c[-1] = -1.0
    res = linprog(c, A_ub=a_ub, b_ub=cap, A_eq=a_eq, b_eq=b_eq,
                  bounds=[(0, None)] * nvar, method="highs")
    if res.status != 0:
        raise RuntimeError(res.message)
    return res.x[-1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve()
                                         .parent.parent / "data"))
    ap.add_argument("--seed", type=int, default=20160424)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    links = build_links(rng)
    demand = build_demand(rng)
    n_nodes = ZONES + ROWS * COLS
    fft = np.round([60.0 * l[2] / l[3] for l in links], 6)
    aon = aon_flows(n_nodes, links, fft, demand)
    base = np.array([l[4] for l in links])
    street = np.array([l[5] == "street" for l in links])
    cap = base.copy()
    cap[street] = np.maximum(base[street],
                             aon[street] * rng.uniform(0.7, 1.2, street.sum()))
    cap = np.round(cap, 1)

    scale = max_concurrent_scale(n_nodes, links, cap, demand)
    binding = int(np.sum(aon > cap))
    print(f"nodes={n_nodes} links={len(links)} pairs={int((demand > 0).sum())} "
          f"demand={demand.sum():.2f} aon_over_capacity={binding} "
          f"routable_scale={scale:.4f}")
    if not (1.0 < scale):
        raise SystemExit("capacities do not admit the demand")
    if binding == 0:
        raise SystemExit("no link is congested at free flow")

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "City_net.tntp", "w") as f:
        f.write(f"<NUMBER OF ZONES> {ZONES}\n<NUMBER OF NODES> {n_nodes}\n"
                f"<FIRST THRU NODE> 1\n<NUMBER OF LINKS> {len(links)}\n"
                f"<ORIGINAL HEADER>~ synthetic city grid, seed {args.seed}\n"
                "<END OF METADATA>\n\n\n"
                "~\tinit_node\tterm_node\tcapacity\tlength\tfree_flow_time\t"
                "b\tpower\tspeed\ttoll\tlink_type\t;\n")
        for (t, h, length, speed, _cap, kind), c, tt in zip(links, cap, fft):
            f.write(f"\t{t}\t{h}\t{c:.1f}\t{length:.4f}\t{tt:.6f}\t{BPR_B}\t"
                    f"{BPR_POWER:g}\t{speed:g}\t0\t{1 if kind == 'street' else 2}\t;\n")
    with open(out / "City_trips.tntp", "w") as f:
        f.write(f"<NUMBER OF ZONES> {ZONES}\n<TOTAL OD FLOW> {demand.sum():.2f}\n"
                "<END OF METADATA>\n\n")
        for o in range(ZONES):
            f.write(f"\nOrigin \t{o + 1}\n")
            entries = [f"{d + 1:5d} : {demand[o, d]:10.2f};"
                       for d in range(ZONES) if demand[o, d] > 0]
            for i in range(0, len(entries), 5):
                f.write("    ".join(entries[i:i + 5]) + "\n")


if __name__ == "__main__":
    main()
