"""Complexity and entropy bounds read off finite word counts."""
from fractions import Fraction

from effshift.analytics import complexity_table, entropy_interval_si, recover_slope_max
from effshift.zoo import fibonacci, golden_mean, sturmian_window

print("Fibonacci factor complexity:", [c for _, c in complexity_table(fibonacci(), 12)])

counts = dict(complexity_table(golden_mean(), 16))
iv = entropy_interval_si(counts[16], 16, 1)
lo, hi = iv.rational_bounds(1 << 16)
print(f"golden mean: N_16 = {counts[16]}, entropy in [{float(lo):.5f}, {float(hi):.5f}]")

m, (a, b) = recover_slope_max(sturmian_window(0, Fraction(3, 10)), 10)
print(f"slope 3/10: at most {m} ones in 10 cells, so alpha lies in [{a}, {b}]")
