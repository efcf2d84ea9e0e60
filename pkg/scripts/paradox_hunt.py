"""Generate planted logical paradoxes and verify the full proof chain.

For every generated scenario: detect the paradox, build the constraint
system, solve it, and tally the structural statistics.  Every run must
end UNSAT; a SAT result would be a counterexample worth a bug report.

Usage: python scripts/paradox_hunt.py [count] [seed]
"""

import sys
from collections import Counter

from ppscontext.contextuality import build_constraint_system, solve
from ppscontext.generate import paradox_corpus
from ppscontext.paradox import detect_paradox


def run(count: int = 100, seed: int = 2026) -> int:
    node_counts = Counter()
    branch_counts = Counter()
    part_ranks = Counter()
    sat_hits = 0

    for scenario in paradox_corpus(seed=seed, count=count):
        verdict = detect_paradox(scenario)
        assert verdict.is_paradox, "generator produced a non-paradox"
        system = build_constraint_system(scenario, verdict)
        cert = solve(system)
        node_counts[len(system.nodes)] += 1
        branch_counts[cert.search_nodes] += 1
        for node in system.nodes:
            part_ranks[node.rank] += 1
        if cert.status != "UNSAT":
            sat_hits += 1
            print(f"counterexample?! dim={scenario.dim} witness={cert.witness}")

    print(f"scenarios: {count} (seed {seed})")
    print(f"UNSAT: {count - sat_hits}, SAT: {sat_hits}")
    print(f"system sizes: {dict(sorted(node_counts.items()))}")
    print(f"search branches: {dict(sorted(branch_counts.items()))}")
    print(f"node ranks seen: {dict(sorted(part_ranks.items()))}")
    return 1 if sat_hits else 0


if __name__ == "__main__":
    count = int(sys.argv[1]) if len(sys.argv) > 1 else 100
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 2026
    raise SystemExit(run(count, seed))
