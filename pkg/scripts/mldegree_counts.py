"""ML-degree counts for small graphs by total-degree homotopy.

C_5 takes about half a minute per seed on one core; pass --with-c5 to include it.
"""

import argparse
import time

from mldegree.critsolve import count_ml_degree, status_counts
from mldegree.graphs import Graph, add_pendant, complete_graph, cycle_graph, path_graph, star_graph


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--with-c5", action="store_true")
    args = ap.parse_args()
    graphs = {
        "C_3": cycle_graph(3), "K_4": complete_graph(4), "path-4": path_graph(4),
        "star-4": star_graph(4), "C_4": cycle_graph(4),
        "C_4+chord": Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]),
        "C_4+pendant": add_pendant(cycle_graph(4)),
    }
    if args.with_c5:
        graphs["C_5"] = cycle_graph(5)
    for name, g in graphs.items():
        t = time.perf_counter()
        res = count_ml_degree(g, args.seeds)
        dt = time.perf_counter() - t
        statuses = status_counts([p for r in res.per_seed for p in r.paths])
        print(f"{name:<12} count={res.count:<3} paths={res.paths_tracked:<5} "
              f"{statuses} {dt:.1f}s")


if __name__ == "__main__":
    main()
