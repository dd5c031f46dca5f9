"""Decide a few golden-mean words against a periodic-point lower bound.

Run with ``python3 demos/decide_golden_mean.py``.  Each verdict comes with a
certificate, and replaying the certificate recomputes it from scratch.
"""
from effshift.analytics import per_vector_transfer
from effshift.engine import decide_pattern, replay_decision
from effshift.grid import word
from effshift.properties import PeriodsAtLeastRefuter
from effshift.zoo import golden_mean

z = golden_mean()
ref = list(per_vector_transfer(z, 8).counts)
print("periodic point counts of the golden mean, periods 1..8:", ref)

refuter = PeriodsAtLeastRefuter(ref)
for text in ("10", "11", "0100", "00001", "10110"):
    v = decide_pattern(z.presentation, refuter, word(text), 1_000_000)
    ok = v.certificate is not None and replay_decision(z.presentation, refuter, v.certificate)
    print(f"{text:>6}: {v.outcome.name.lower():>9}  spent {v.budget_used:>6}  replay ok: {ok}")

# With only periods up to 4 in the reference, some legal words never resolve:
# no periodic point of small period contains them, so no refutation exists.
short = PeriodsAtLeastRefuter(ref[:4])
v = decide_pattern(z.presentation, short, word("00001"), 50_000)
print("00001 against periods <= 4:", v.outcome.name.lower())
