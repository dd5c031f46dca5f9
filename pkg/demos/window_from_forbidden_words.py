"""Pin down a rotation window using nothing but a stream of forbidden words."""
from fractions import Fraction

from effshift.analytics import recover_window
from effshift.streams import co_language
from effshift.zoo import sturmian_window

alpha = Fraction(2, 5)
z = sturmian_window(alpha, alpha + Fraction(1, 2))
for budget in (1, 10, 100, 1000):
    wb = recover_window(z.presentation.patterns(), budget)
    print(f"{budget:>5} forbidden words read: alpha in [{wb.lo}, {wb.hi}]")

wb = recover_window(co_language(z.presentation), 50_000)
print(f"from the enumerated co-language: alpha in [{wb.lo}, {wb.hi}]")
