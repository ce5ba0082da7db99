"""Run the numerical check battery and show what it guards.

Every identity, inequality and regret bound in the library gets a
seeded randomized verification; the final probe demonstrates that the
trade-off bound check is tight enough to notice a halved constant.
"""

from driftsched import run_suite

reports = run_suite(seed=0)
width = max(len(r.name) for r in reports)
print(f"{'check':<{width}}  {'status':<6} {'samples':>7}  worst margin")
for r in reports:
    status = "pass" if r.passed else "FAIL"
    print(f"{r.name:<{width}}  {status:<6} {r.samples:>7}  {r.max_violation:+.3e}")
print(f"\n{sum(r.passed for r in reports)}/{len(reports)} checks passed")

print("\nmutation probe: halving the stability constant inside the")
print("trade-off bound check must break it (and nothing else):")
mutated = run_suite(seed=0, tradeoff_c2_factor=0.5)
failing = [r.name for r in mutated if not r.passed]
print(f"  failing checks -> {failing}")
