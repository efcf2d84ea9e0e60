"""End-to-end walkthrough of the three-box scenario.

Prints the conditional probabilities, the paradox verdict, the derived
eight-ray constraint system, and the UNSAT certificate, then
cross-checks the certainties against the Monte-Carlo sampler.
"""

from ppscontext.cli import main
from ppscontext.measurement import simulate_frequencies
from ppscontext.scenarios import three_box


def run() -> None:
    print("# prove")
    main(["prove", "--builtin", "three-box"])
    print("\n# abl")
    main(["abl", "--builtin", "three-box"])

    scenario = three_box()
    for pvm in scenario.measurements:
        freqs = simulate_frequencies(scenario, pvm, 1_000_000, seed=42)
        accepted = sum(count for _, count in freqs.values())
        print(f"\n# sampler, {pvm.name}: {accepted} accepted runs")
        for k, (freq, count) in sorted(freqs.items()):
            print(f"  outcome {k}: frequency {freq:.6f} ({count} runs)")


if __name__ == "__main__":
    run()
