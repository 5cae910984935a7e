"""Secret sharing over the Z4 and Z3 arguments, and why epsilon stays large at 20000 rounds."""
from cqmkit.hbb import ProtocolConfig, run_attack_noncontextual, run_honest
from cqmkit.mermin import simple

z4 = simple(4, 2, 5)
for W in (2000, 20000, 200000):
    tr = run_honest(ProtocolConfig(z4, 2, 0.5, 0.02, W, 0))
    per_entry = W * 0.5 / 6 / 4 ** 4
    print(f"honest Z4 W={W}: {tr.summary()}  (~{per_entry:.1f} test counts per table entry)")

z3 = simple(3, 2, 4)
tr, eve = run_attack_noncontextual(ProtocolConfig(z3, 2, 0.5, 0.02, 20000, 0))
print(f"Z3 attack: {tr.summary()}, Eve knows {eve.plaintexts_known:.0%} of plaintexts")
