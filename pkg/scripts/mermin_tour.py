"""Walk through the five Z_d Mermin arguments: verdicts, LHV mixtures, quantum tables."""
from cqmkit import contextuality as ctx
from cqmkit.abgroup import FinAbGroup
from cqmkit.mermin import (analytic_model, avn_certificate, avn_equations, compare_models,
                           decide_contextual, quantum_model, scenario, simple)

for d, t, N in [(2, 2, 3), (4, 2, 5), (6, 3, 7), (3, 2, 4), (6, 5, 7)]:
    arg = simple(d, t, N)
    dc = decide_contextual(arg)
    am = analytic_model(arg)
    line = f"Z{d}, {t}y=1, N={N}: "
    if dc["contextual"]:
        line += f"contextual, AvN={avn_certificate(arg, am)['avn']}"
    else:
        line += f"local, y={dc['solution']}, mixture of {len(dc['lhv'])} assignments verified={dc['lhv_verified']}"
    if d ** N <= 4096:
        ok, dev = compare_models(quantum_model(arg), am)
        line += f", quantum tables match ({dev:.1e})"
    print(line)

# Z4 contextuality is invisible to Z3-valued assignments
arg = simple(4, 2, 5)
z3 = ctx.global_assignment(scenario(arg), avn_equations(arg), FinAbGroup((3,)))
print("Z3 assignment for the Z4 scenario:", z3 is not None)
